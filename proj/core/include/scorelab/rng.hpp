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
#include <random>
#include <string_view>

#include "scorelab/types.hpp"

namespace scorelab {

using Engine = std::mt19937_64;

// SplitMix64 finalizer; used for all seed derivations.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// FNV-1a over the purpose string, folded with the root seed. Adding a new
// purpose never changes the streams of existing ones.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::string_view purpose) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : purpose) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return mix64(root ^ mix64(h));
}

// Sub-stream `index` of a derived seed (per-sample / per-grid-point streams).
constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  return mix64(mix64(root) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

inline Engine make_engine(std::uint64_t seed) { return Engine(seed); }

inline void fill_normal(Engine& engine, Eigen::Ref<Matrix> out) {
  std::normal_distribution<double> normal(0.0, 1.0);
  // Column-major order: sample by sample.
  for (Eigen::Index j = 0; j < out.cols(); ++j)
    for (Eigen::Index i = 0; i < out.rows(); ++i) out(i, j) = normal(engine);
}

inline Vector normal_vector(Engine& engine, int dim) {
  Vector v(dim);
  fill_normal(engine, v);
  return v;
}

inline Matrix normal_matrix(Engine& engine, int rows, int cols) {
  Matrix m(rows, cols);
  fill_normal(engine, m);
  return m;
}

}  // namespace scorelab
