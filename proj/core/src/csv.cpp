// Copyright 2026 The scorelab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "scorelab/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "scorelab/errors.hpp"

namespace scorelab {

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<CsvCell> row) {
  if (row.size() != header_.size())
    throw ShapeError(fmt::format("csv: row has {} cells, header has {}", row.size(), header_.size()));
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::string out;
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (i) out += ',';
    out += header_[i];
  }
  out += '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      std::visit(
          [&out](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, double>)
              out += format_double(c);
            else if constexpr (std::is_same_v<T, std::int64_t>)
              out += fmt::format("{}", c);
            else
              out += c;
          },
          row[i]);
    }
    out += '\n';
  }
  return out;
}

void CsvTable::write(const std::filesystem::path& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw FormatError("csv: cannot open " + path.string() + " for writing");
  const std::string s = str();
  f.write(s.data(), static_cast<std::streamsize>(s.size()));
  if (!f) throw FormatError("csv: write failed for " + path.string());
}

CsvTable curve_table(const Curve& curve) {
  CsvTable t({"t", "value", "stderr", "n_mc"});
  for (const auto& p : curve) t.add_row({p.t, p.value, p.std_error, std::int64_t{p.n_mc}});
  return t;
}

CsvTable losses_table(const std::vector<EpochRecord>& epochs) {
  CsvTable t({"epoch", "dsm", "penalty", "total"});
  for (const auto& e : epochs) t.add_row({std::int64_t{e.epoch}, e.dsm, e.penalty, e.total});
  return t;
}

CsvTable samples_table(const Batch& samples) {
  std::vector<std::string> header;
  for (Eigen::Index i = 0; i < samples.rows(); ++i) header.push_back(fmt::format("x{}", i + 1));
  CsvTable t(std::move(header));
  for (Eigen::Index j = 0; j < samples.cols(); ++j) {
    std::vector<CsvCell> row;
    for (Eigen::Index i = 0; i < samples.rows(); ++i) row.emplace_back(samples(i, j));
    t.add_row(std::move(row));
  }
  return t;
}

CsvTable field_table(const std::vector<FieldRow>& rows) {
  CsvTable t({"x1", "x2", "t", "s1", "s2", "d1", "d2", "s1_scaled", "s2_scaled", "d1_scaled",
              "d2_scaled"});
  for (const auto& r : rows)
    t.add_row({r.x1, r.x2, r.t, r.s1, r.s2, r.d1, r.d2, r.s1_scaled, r.s2_scaled, r.d1_scaled,
               r.d2_scaled});
  return t;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

Batch read_samples_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw FormatError("csv: cannot open " + path.string());
  std::string line;
  if (!std::getline(f, line)) throw FormatError("csv: " + path.string() + " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  std::vector<int> keep;
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] != "sample_id") keep.push_back(static_cast<int>(i));
  if (keep.empty()) throw FormatError("csv: " + path.string() + " has no data columns");

  std::vector<double> values;
  long n = 0, lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size())
      throw FormatError(fmt::format("csv: {}:{}: expected {} cells, got {}", path.string(), lineno,
                                    header.size(), cells.size()));
    for (int i : keep) {
      const std::string& c = cells[i];
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
      if (ec != std::errc() || ptr != c.data() + c.size())
        throw FormatError(fmt::format("csv: {}:{}: bad number '{}'", path.string(), lineno, c));
      values.push_back(v);
    }
    ++n;
  }
  const Eigen::Index d = static_cast<Eigen::Index>(keep.size());
  return Eigen::Map<const Matrix>(values.data(), d, n);
}

}  // namespace scorelab
