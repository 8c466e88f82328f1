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

#include "scorelab/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "json_codec.hpp"
#include "scorelab/errors.hpp"

namespace scorelab {

namespace {

constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

static_assert(std::endian::native == std::endian::little,
              "checkpoint encoding assumes a little-endian host");

}  // namespace

std::string base64_encode(const std::string& bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) |
                       (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                       static_cast<unsigned char>(bytes[i + 2]);
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  const std::size_t rest = bytes.size() - i;
  if (rest > 0) {
    unsigned v = static_cast<unsigned char>(bytes[i]) << 16;
    if (rest == 2) v |= static_cast<unsigned char>(bytes[i + 1]) << 8;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += rest == 2 ? kAlphabet[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

std::string base64_decode(const std::string& text) {
  std::array<int, 256> table;
  table.fill(-1);
  for (int i = 0; i < 64; ++i) table[static_cast<unsigned char>(kAlphabet[i])] = i;
  if (text.size() % 4 != 0) throw FormatError("base64: length is not a multiple of 4");
  std::string out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int pad = 0;
    unsigned v = 0;
    for (int k = 0; k < 4; ++k) {
      const char c = text[i + k];
      if (c == '=' && i + 4 == text.size() && k >= 2) {
        ++pad;
        v <<= 6;
        continue;
      }
      const int x = table[static_cast<unsigned char>(c)];
      if (x < 0 || pad > 0) throw FormatError("base64: invalid character");
      v = (v << 6) | static_cast<unsigned>(x);
    }
    out += static_cast<char>((v >> 16) & 0xff);
    if (pad < 2) out += static_cast<char>((v >> 8) & 0xff);
    if (pad < 1) out += static_cast<char>(v & 0xff);
  }
  return out;
}

std::string encode_checkpoint(const Checkpoint& ckpt) {
  const Vector& theta = ckpt.net.parameters();
  std::string raw(static_cast<std::size_t>(theta.size()) * sizeof(double), '\0');
  std::memcpy(raw.data(), theta.data(), raw.size());
  codec::Json j;
  j["format"] = "scorelab-checkpoint";
  j["version"] = 1;
  j["architecture"] = codec::to_json(ckpt.net.architecture());
  j["seed"] = ckpt.seed;
  j["epoch"] = ckpt.epoch;
  j["parameter_count"] = theta.size();
  j["theta_encoding"] = "float64-le/base64";
  j["theta"] = base64_encode(raw);
  return j.dump(2) + "\n";
}

Checkpoint decode_checkpoint(const std::string& text) {
  codec::Json j;
  try {
    j = codec::Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint: not valid JSON: ") + e.what());
  }
  try {
    if (j.value("format", "") != "scorelab-checkpoint" || j.value("version", 0) != 1)
      throw FormatError("checkpoint: unknown format or version");
    if (j.value("theta_encoding", "") != "float64-le/base64")
      throw FormatError("checkpoint: unsupported theta encoding");
    NetArchitecture arch = codec::architecture_from_json(j.at("architecture"), "architecture");
    const std::string raw = base64_decode(j.at("theta").get<std::string>());
    const auto count = j.at("parameter_count").get<std::size_t>();
    if (raw.size() != count * sizeof(double) || count != arch.parameter_count())
      throw FormatError(fmt::format("checkpoint: payload holds {} bytes, expected {} parameters",
                                    raw.size(), arch.parameter_count()));
    Vector theta(static_cast<Eigen::Index>(count));
    std::memcpy(theta.data(), raw.data(), raw.size());
    return {ScoreNet(std::move(arch), std::move(theta)), j.at("seed").get<std::uint64_t>(),
            j.value("epoch", 0)};
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out << encode_checkpoint(ckpt);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open checkpoint " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return decode_checkpoint(ss.str());
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const NetArchitecture& expected) {
  Checkpoint ckpt = load_checkpoint(path);
  if (!(ckpt.net.architecture() == expected))
    throw FormatError("checkpoint " + path.string() +
                      ": architecture does not match the configured network");
  return ckpt;
}

}  // namespace scorelab
