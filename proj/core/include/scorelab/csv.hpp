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

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "scorelab/diagnostics.hpp"
#include "scorelab/train.hpp"
#include "scorelab/types.hpp"

namespace scorelab {

// Numeric tables: '.' decimal point, 17 significant digits, '\n' line ends,
// one header row.
using CsvCell = std::variant<double, std::int64_t, std::string>;

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::vector<CsvCell> row);
  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }

  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<CsvCell>> rows_;
};

std::string format_double(double v);

// Columns t, value, stderr, n_mc.
CsvTable curve_table(const Curve& curve);
// Columns epoch, dsm, penalty, total.
CsvTable losses_table(const std::vector<EpochRecord>& epochs);
// Columns x1..xD, one row per sample.
CsvTable samples_table(const Batch& samples);
CsvTable field_table(const std::vector<FieldRow>& rows);

// Reads a purely numeric CSV with a header row into a D x n batch (one
// sample per row in the file). Columns named "sample_id" are skipped.
Batch read_samples_csv(const std::filesystem::path& path);

}  // namespace scorelab
