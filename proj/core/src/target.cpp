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

#include "scorelab/target.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "scorelab/errors.hpp"

namespace scorelab {

void GaussianMixture::validate() const {
  if (weights.empty()) throw ConfigError("target.weights", "mixture has no components");
  if (means.size() != weights.size() || covariances.size() != weights.size())
    throw ConfigError("target", "weights, means and covariances differ in length");
  const int d = dim();
  if (d < 1) throw ConfigError("target.means", "dimension must be at least 1");
  double total = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (!(weights[k] > 0.0))
      throw ConfigError(fmt::format("target.weights[{}]", k), "must be positive");
    total += weights[k];
    if (means[k].size() != d)
      throw ConfigError(fmt::format("target.means[{}]", k), "dimension mismatch");
    const Matrix& c = covariances[k];
    if (c.rows() != d || c.cols() != d)
      throw ConfigError(fmt::format("target.covariances[{}]", k), "must be D x D");
    if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-12)
      throw ConfigError(fmt::format("target.covariances[{}]", k), "not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(c, Eigen::EigenvaluesOnly);
    if (!(eig.eigenvalues().minCoeff() > 0.0))
      throw ConfigError(fmt::format("target.covariances[{}]", k), "not positive definite");
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw ConfigError("target.weights", fmt::format("sum to {} instead of 1", total));
}

bool GaussianMixture::operator==(const GaussianMixture& other) const {
  if (weights != other.weights || means.size() != other.means.size()) return false;
  for (std::size_t k = 0; k < means.size(); ++k) {
    if (means[k].size() != other.means[k].size() || means[k] != other.means[k]) return false;
    if (covariances[k].rows() != other.covariances[k].rows() ||
        covariances[k] != other.covariances[k])
      return false;
  }
  return true;
}

GaussianMixture unit_gaussian(int dim) {
  return {{1.0}, {Vector::Zero(dim)}, {Matrix::Identity(dim, dim)}};
}

GaussianMixture symmetric_pair(int dim) {
  Vector m = Vector::Zero(dim);
  m(0) = 2.0;
  return {{0.5, 0.5}, {m, -m}, {Matrix::Identity(dim, dim), Matrix::Identity(dim, dim)}};
}

GaussianMixture ring_mixture(int components, double radius, double stddev) {
  GaussianMixture gm;
  for (int k = 0; k < components; ++k) {
    const double angle = 2.0 * std::numbers::pi * k / components;
    gm.weights.push_back(1.0 / components);
    gm.means.push_back(Eigen::Vector2d(radius * std::cos(angle), radius * std::sin(angle)));
    gm.covariances.push_back(stddev * stddev * Matrix::Identity(2, 2));
  }
  return gm;
}

GaussianMixture anisotropic_pair() {
  const double c = std::sqrt(0.5);
  Matrix rot(2, 2);
  rot << c, -c, c, c;
  const Matrix lam = Eigen::Vector2d(1.0, 0.05).asDiagonal();
  Matrix c1 = rot * lam * rot.transpose();
  Matrix c2 = rot.transpose() * lam * rot;
  // Symmetrize exactly; the rotation leaves ~1e-17 asymmetry.
  c1 = 0.5 * (c1 + c1.transpose()).eval();
  c2 = 0.5 * (c2 + c2.transpose()).eval();
  return {{0.5, 0.5}, {Eigen::Vector2d(2.0, 0.0), Eigen::Vector2d(-2.0, 0.0)}, {c1, c2}};
}

GaussianMixture mixture_preset(const std::string& name, int dim) {
  if (name == "unit") return unit_gaussian(dim);
  if (name == "symmetric") return symmetric_pair(dim);
  if (name == "ring") {
    if (dim != 2) throw ConfigError("target.dim", "ring preset is two-dimensional");
    return ring_mixture();
  }
  if (name == "anisotropic") {
    if (dim != 2) throw ConfigError("target.dim", "anisotropic preset is two-dimensional");
    return anisotropic_pair();
  }
  throw ConfigError("target.preset", "unknown preset \"" + name + "\"");
}

std::vector<std::pair<std::string, GaussianMixture>> mixture_corpus() {
  return {{"unit", unit_gaussian(2)},
          {"symmetric", symmetric_pair(2)},
          {"ring", ring_mixture()},
          {"anisotropic", anisotropic_pair()}};
}

MarginalMixture::MarginalMixture(double t, std::vector<double> weights,
                                 std::vector<Vector> means, std::vector<Matrix> covariances)
    : t_(t),
      weights_(std::move(weights)),
      means_(std::move(means)),
      covariances_(std::move(covariances)) {
  const int d = dim();
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    Eigen::LLT<Matrix> llt(covariances_[k]);
    if (llt.info() != Eigen::Success)
      throw NumericalError(fmt::format("marginal covariance {} is not positive definite", k));
    Matrix l = llt.matrixL();
    double log_det = 2.0 * l.diagonal().array().log().sum();
    precisions_.push_back(llt.solve(Matrix::Identity(d, d)));
    precisions_.back() = 0.5 * (precisions_.back() + precisions_.back().transpose()).eval();
    trace_precision_.push_back(precisions_.back().trace());
    cholesky_.push_back(std::move(l));
    const double w = weights_[k];
    log_norm_.push_back((w > 0.0 ? std::log(w) : -INFINITY) -
                        0.5 * (d * std::log(2.0 * std::numbers::pi) + log_det));
  }
}

Vector MarginalMixture::log_terms(const Vector& x) const {
  Vector out(size());
  for (int k = 0; k < size(); ++k) {
    const Vector r = x - means_[k];
    out(k) = log_norm_[k] - 0.5 * r.dot(precisions_[k] * r);
  }
  return out;
}

double MarginalMixture::log_density(const Vector& x) const {
  const Vector lt = log_terms(x);
  const double m = lt.maxCoeff();
  return m + std::log((lt.array() - m).exp().sum());
}

Vector MarginalMixture::component_posterior(const Vector& x) const {
  const Vector lt = log_terms(x);
  const double m = lt.maxCoeff();
  Vector g = (lt.array() - m).exp();
  return g / g.sum();
}

MarginalMixture::Local MarginalMixture::local(const Vector& x) const {
  Local loc;
  loc.gamma = component_posterior(x);
  loc.mean_u = Vector::Zero(dim());
  loc.u.reserve(size());
  for (int k = 0; k < size(); ++k) {
    loc.u.push_back(-(precisions_[k] * (x - means_[k])));
    loc.mean_u += loc.gamma(k) * loc.u.back();
  }
  return loc;
}

Vector MarginalMixture::score(const Vector& x) const { return local(x).mean_u; }

Matrix MarginalMixture::jacobian(const Vector& x) const {
  // J = sum_k gamma_k (-P_k + u_k u_k^T) - ubar ubar^T
  const Local loc = local(x);
  Matrix j = -loc.mean_u * loc.mean_u.transpose();
  for (int k = 0; k < size(); ++k)
    j += loc.gamma(k) * (loc.u[k] * loc.u[k].transpose() - precisions_[k]);
  return j;
}

double MarginalMixture::divergence(const Vector& x) const {
  const Local loc = local(x);
  double div = -loc.mean_u.squaredNorm();
  for (int k = 0; k < size(); ++k)
    div += loc.gamma(k) * (loc.u[k].squaredNorm() - trace_precision_[k]);
  return div;
}

Vector MarginalMixture::divergence_gradient(const Vector& x) const {
  // With a_k = |u_k|^2 - tr P_k and d gamma_k / dx = gamma_k (u_k - ubar):
  // grad div = sum_k gamma_k [a_k (u_k - ubar) - 2 P_k u_k] - 2 J ubar.
  const Local loc = local(x);
  const Matrix j = jacobian(x);
  Vector g = -2.0 * (j * loc.mean_u);
  for (int k = 0; k < size(); ++k) {
    const double a = loc.u[k].squaredNorm() - trace_precision_[k];
    g += loc.gamma(k) * (a * (loc.u[k] - loc.mean_u) - 2.0 * (precisions_[k] * loc.u[k]));
  }
  return g;
}

Vector MarginalMixture::quadratic_gradient(const Vector& x, const Vector& v) const {
  // v^T J v = sum_k gamma_k q_k - (ubar.v)^2 with q_k = (u_k.v)^2 - v^T P_k v.
  const Local loc = local(x);
  const Matrix j = jacobian(x);
  const double ubar_v = loc.mean_u.dot(v);
  Vector g = -2.0 * ubar_v * (j * v);
  for (int k = 0; k < size(); ++k) {
    const double uv = loc.u[k].dot(v);
    const Vector pv = precisions_[k] * v;
    const double q = uv * uv - v.dot(pv);
    g += loc.gamma(k) * (q * (loc.u[k] - loc.mean_u) - 2.0 * uv * pv);
  }
  return g;
}

namespace {

MarginalMixture marginal_unchecked(const GaussianMixture& gm, const SdeSchedule& sched,
                                   double t) {
  const KernelParams kp = sched.kernel_params_unchecked(t);
  const int d = gm.dim();
  std::vector<Vector> means;
  std::vector<Matrix> covs;
  for (int k = 0; k < gm.size(); ++k) {
    means.push_back(kp.alpha * gm.means[k]);
    covs.push_back(kp.alpha * kp.alpha * gm.covariances[k] +
                   kp.sigma * kp.sigma * Matrix::Identity(d, d));
  }
  return MarginalMixture(t, gm.weights, std::move(means), std::move(covs));
}

}  // namespace

MarginalMixture marginal_at(const GaussianMixture& gm, const SdeSchedule& sched, double t) {
  if (!(t >= 0.0 && t <= sched.t_max()))
    throw RangeError(fmt::format("marginal_at: t = {} outside [0, {}]", t, sched.t_max()));
  return marginal_unchecked(gm, sched, t);
}

Vector exact_score(const MarginalMixture& mm, const Vector& x) { return mm.score(x); }

double exact_divergence(const MarginalMixture& mm, const Vector& x) { return mm.divergence(x); }

Vector component_posterior(const MarginalMixture& mm, const Vector& x) {
  return mm.component_posterior(x);
}

Vector exact_dt_score(const GaussianMixture& gm, const SdeSchedule& sched, double t,
                      const Vector& x, double h) {
  if (!(h > 0.0)) throw RangeError("exact_dt_score: step must be positive");
  if (!(t >= h && t <= sched.t_max()))
    throw RangeError(fmt::format("exact_dt_score: t = {} too close to the boundary for step {}",
                                 t, h));
  auto central = [&](double step) -> Vector {
    const Vector up = marginal_unchecked(gm, sched, t + step).score(x);
    const Vector down = marginal_unchecked(gm, sched, t - step).score(x);
    return (up - down) / (2.0 * step);
  };
  const Vector coarse = central(h);
  const Vector fine = central(0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

namespace {

template <class Means, class Factors>
Batch sample_impl(const std::vector<double>& weights, const Means& means, const Factors& chol,
                  int n, Engine& engine, std::vector<int>* labels) {
  if (n < 1) throw RangeError("sample: n must be at least 1");
  const int d = static_cast<int>(means.front().size());
  std::discrete_distribution<int> pick(weights.begin(), weights.end());
  std::normal_distribution<double> normal(0.0, 1.0);
  Batch out(d, n);
  if (labels) labels->assign(n, 0);
  Vector z(d);
  for (int i = 0; i < n; ++i) {
    const int k = pick(engine);
    for (int r = 0; r < d; ++r) z(r) = normal(engine);
    out.col(i) = means[k] + chol[k] * z;
    if (labels) (*labels)[i] = k;
  }
  return out;
}

std::vector<Matrix> cholesky_of(const GaussianMixture& gm) {
  std::vector<Matrix> out;
  for (const Matrix& c : gm.covariances) {
    Eigen::LLT<Matrix> llt(c);
    if (llt.info() != Eigen::Success)
      throw NumericalError("sample: covariance is not positive definite");
    out.push_back(llt.matrixL());
  }
  return out;
}

}  // namespace

Batch sample(const GaussianMixture& gm, int n, Engine& engine, std::vector<int>* labels) {
  return sample_impl(gm.weights, gm.means, cholesky_of(gm), n, engine, labels);
}

Batch sample(const GaussianMixture& gm, int n, std::uint64_t seed, std::vector<int>* labels) {
  Engine engine(seed);
  return sample(gm, n, engine, labels);
}

Batch sample(const MarginalMixture& mm, int n, std::uint64_t seed, std::vector<int>* labels) {
  Engine engine(seed);
  return sample_impl(mm.weights(), mm.means(), mm.cholesky_factors(), n, engine, labels);
}

}  // namespace scorelab
