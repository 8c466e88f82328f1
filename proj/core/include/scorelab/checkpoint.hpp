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

#include "scorelab/net.hpp"

namespace scorelab {

// Checkpoint container: a JSON document
//
//   {
//     "format": "scorelab-checkpoint", "version": 1,
//     "architecture": {...}, "seed": <init seed>, "epoch": <n>,
//     "parameter_count": <n>,
//     "theta_encoding": "float64-le/base64",
//     "theta": "<base64 of parameter_count little-endian IEEE-754 doubles>"
//   }
//
// Round-trips theta bit-exactly.
struct Checkpoint {
  ScoreNet net;
  std::uint64_t seed = 0;
  int epoch = 0;
};

std::string encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(const std::string& text);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
// Throws FormatError on malformed input.
Checkpoint load_checkpoint(const std::filesystem::path& path);
// As above, and also throws FormatError when the stored architecture differs
// from `expected`.
Checkpoint load_checkpoint(const std::filesystem::path& path, const NetArchitecture& expected);

std::string base64_encode(const std::string& bytes);
std::string base64_decode(const std::string& text);

}  // namespace scorelab
