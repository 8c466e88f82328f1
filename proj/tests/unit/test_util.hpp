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

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "scorelab/metrics.hpp"
#include "scorelab/net.hpp"
#include "scorelab/rng.hpp"
#include "scorelab/types.hpp"

namespace scorelab::testing {

// Central difference of a scalar function along one coordinate.
inline double central_diff(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Central-difference gradient of f: R^n -> R.
inline Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                          double h) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    g(i) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

// Central-difference Jacobian of f: R^n -> R^m.
inline Matrix fd_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& x,
                          double h) {
  const Vector f0 = f(x);
  Matrix j(f0.size(), x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    j.col(i) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return j;
}

inline double rel_err(double a, double b, double floor = 1e-12) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

inline double rel_err(const Vector& a, const Vector& b, double floor = 1e-12) {
  return (a - b).norm() / std::max({a.norm(), b.norm(), floor});
}

// Small tanh network with randomized (nonzero) biases so every code path
// carries signal.
inline ScoreNet random_net(const NetArchitecture& arch, std::uint64_t seed) {
  ScoreNet net = ScoreNet::initialized(arch, seed);
  Engine eng(seed ^ 0xabcdefULL);
  Vector theta = net.parameters();
  theta += 0.1 * normal_vector(eng, static_cast<int>(theta.size()));
  net.set_parameters(theta);
  return net;
}

// widths [3, 8, 2]: D = 2, one time feature, one hidden layer of 8.
inline NetArchitecture tiny_arch(Activation act = Activation::kTanh) {
  NetArchitecture a;
  a.data_dim = 2;
  a.hidden = {8};
  a.activation = act;
  a.embedding.features = 1;
  a.embedding.freq_min = 1.0;
  a.embedding.freq_max = 1.0;
  return a;
}

// Brute-force density and coverage straight from the definitions.
inline DensityCoverage naive_density_coverage(const Batch& real, const Batch& fake, int k) {
  auto d = [](const Batch& a, int i, const Batch& b, int j) {
    double s = 0.0;
    for (int r = 0; r < a.rows(); ++r) s += (a(r, i) - b(r, j)) * (a(r, i) - b(r, j));
    return std::sqrt(s);
  };
  const int nr = static_cast<int>(real.cols()), nf = static_cast<int>(fake.cols());
  std::vector<double> radius(nr);
  for (int i = 0; i < nr; ++i) {
    std::vector<double> all;
    for (int j = 0; j < nr; ++j)
      if (j != i) all.push_back(d(real, i, real, j));
    std::sort(all.begin(), all.end());
    radius[i] = all[k - 1];
  }
  double hits = 0.0;
  for (int j = 0; j < nf; ++j)
    for (int i = 0; i < nr; ++i) hits += d(fake, j, real, i) <= radius[i] ? 1.0 : 0.0;
  double covered = 0.0;
  for (int i = 0; i < nr; ++i) {
    bool any = false;
    for (int j = 0; j < nf; ++j) any = any || d(fake, j, real, i) <= radius[i];
    covered += any ? 1.0 : 0.0;
  }
  return {hits / (static_cast<double>(k) * nf), covered / nr};
}

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace scorelab::testing
