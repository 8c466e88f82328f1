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

#include "scorelab/target.hpp"
#include "scorelab/types.hpp"

namespace scorelab {

// Sample-quality metrics in data space (identity features). Sample sets are
// D x n matrices, one point per column.

struct FrechetResult {
  double value = 0.0;
  // True when a covariance was singular and +1e-9 I was added.
  bool regularized = false;
};

// |mu1 - mu2|^2 + tr(C1 + C2 - 2 (C1 C2)^{1/2}), with the trace of the
// square root taken from the eigenvalues of C1^{1/2} C2 C1^{1/2}.
double frechet_distance(const Vector& mu1, const Matrix& c1, const Vector& mu2, const Matrix& c2);

// Fits mean and (n - 1)-normalized covariance to each set. Each set needs
// at least D + 1 points.
FrechetResult frechet_gaussian(const Batch& real, const Batch& fake);

struct DensityCoverage {
  double density = 0.0;
  double coverage = 0.0;
};

// r_k(real_i) is the distance from real_i to its k-th nearest other real
// point. density = sum_j #{i : |fake_j - real_i| <= r_k(real_i)} / (k n_fake),
// coverage = fraction of real points with some fake point inside r_k.
// Brute force, O(n_real (n_real + n_fake)).
DensityCoverage density_coverage(const Batch& real, const Batch& fake, int k);

// Entropy (nats) of the empirical distribution of argmax component
// assignments of the fake samples under the target mixture at t = 0.
double assignment_entropy(const Batch& fake, const GaussianMixture& target);

struct MetricReport {
  double frechet = 0.0;
  bool frechet_regularized = false;
  double density = 0.0;
  double coverage = 0.0;
  double entropy = 0.0;
  int k_neighbors = 5;
  int n_real = 0;
  int n_fake = 0;
};

MetricReport evaluate_metrics(const Batch& real, const Batch& fake, const GaussianMixture& target,
                              int k = 5);

}  // namespace scorelab
