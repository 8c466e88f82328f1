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
#include <string>
#include <vector>

#include "scorelab/rng.hpp"
#include "scorelab/sde.hpp"
#include "scorelab/types.hpp"

namespace scorelab {

// Analytic data distribution sum_k w_k N(m_k, C_k).
struct GaussianMixture {
  std::vector<double> weights;
  std::vector<Vector> means;
  std::vector<Matrix> covariances;

  int dim() const { return means.empty() ? 0 : static_cast<int>(means.front().size()); }
  int size() const { return static_cast<int>(weights.size()); }

  // Throws ConfigError on non-normalized weights, asymmetric or indefinite
  // covariances, or inconsistent dimensions.
  void validate() const;

  bool operator==(const GaussianMixture& other) const;
};

// Named corpus targets.
GaussianMixture unit_gaussian(int dim);
// Means (+-2, 0, ..., 0), identity covariances, equal weights.
GaussianMixture symmetric_pair(int dim = 2);
// Components on a circle in the first two coordinates.
GaussianMixture ring_mixture(int components = 5, double radius = 3.0, double stddev = 0.3);
// Means (+-2, 0), covariances with eigenvalues (1, 0.05) rotated by +-45 degrees.
GaussianMixture anisotropic_pair();
// Preset by name: "unit", "symmetric", "ring", "anisotropic".
GaussianMixture mixture_preset(const std::string& name, int dim = 2);
// The four-target corpus used by the oracle checks.
std::vector<std::pair<std::string, GaussianMixture>> mixture_corpus();

// Time-t marginal p_t of a mixture pushed through the Gaussian transition
// kernel. Components keep their weights; means become alpha m_k and
// covariances alpha^2 C_k + sigma^2 I. Precisions and log-normalizers are
// precomputed.
class MarginalMixture {
 public:
  MarginalMixture(double t, std::vector<double> weights, std::vector<Vector> means,
                  std::vector<Matrix> covariances);

  double t() const { return t_; }
  int dim() const { return static_cast<int>(means_.front().size()); }
  int size() const { return static_cast<int>(weights_.size()); }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<Vector>& means() const { return means_; }
  const std::vector<Matrix>& covariances() const { return covariances_; }
  const std::vector<Matrix>& precisions() const { return precisions_; }
  const std::vector<Matrix>& cholesky_factors() const { return cholesky_; }

  double log_density(const Vector& x) const;
  // Responsibilities gamma_k(x), computed with log-sum-exp.
  Vector component_posterior(const Vector& x) const;
  Vector score(const Vector& x) const;
  // d score / dx; symmetric.
  Matrix jacobian(const Vector& x) const;
  double divergence(const Vector& x) const;
  // grad_x tr(J).
  Vector divergence_gradient(const Vector& x) const;
  // grad_x (v^T J v).
  Vector quadratic_gradient(const Vector& x, const Vector& v) const;

 private:
  struct Local {
    Vector gamma;
    std::vector<Vector> u;  // u_k = -P_k (x - m_k)
    Vector mean_u;          // sum_k gamma_k u_k = score
  };
  Local local(const Vector& x) const;
  Vector log_terms(const Vector& x) const;

  double t_;
  std::vector<double> weights_;
  std::vector<Vector> means_;
  std::vector<Matrix> covariances_;
  std::vector<Matrix> precisions_;
  std::vector<Matrix> cholesky_;
  std::vector<double> log_norm_;  // log w_k - log det(2 pi C_k) / 2
  std::vector<double> trace_precision_;
};

// Requires t in [0, t_max].
MarginalMixture marginal_at(const GaussianMixture& gm, const SdeSchedule& sched, double t);

Vector exact_score(const MarginalMixture& mm, const Vector& x);
double exact_divergence(const MarginalMixture& mm, const Vector& x);
Vector component_posterior(const MarginalMixture& mm, const Vector& x);

// d/dt of the exact score at fixed x: Richardson-extrapolated central
// differences with steps h and h/2. Requires t >= h and t <= t_max; the
// marginal closed form is evaluated up to t + h, so t = t_max is admitted.
Vector exact_dt_score(const GaussianMixture& gm, const SdeSchedule& sched, double t,
                      const Vector& x, double h = 1e-5);

// n draws (columns). Component index by weights, then mean + L z with L the
// Cholesky factor. Deterministic given seed.
// `labels`, when given, receives the drawn component indices.
Batch sample(const GaussianMixture& gm, int n, std::uint64_t seed,
             std::vector<int>* labels = nullptr);
Batch sample(const MarginalMixture& mm, int n, std::uint64_t seed,
             std::vector<int>* labels = nullptr);
// Draws from a caller-owned engine (training loop).
Batch sample(const GaussianMixture& gm, int n, Engine& engine,
             std::vector<int>* labels = nullptr);

}  // namespace scorelab
