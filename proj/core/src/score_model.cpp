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

#include "scorelab/score_model.hpp"

#include <fmt/format.h>

#include "scorelab/errors.hpp"

namespace scorelab {

Batch ScoreModel::score_batch(const Batch& x, double t) const {
  Batch out(dim(), x.cols());
  for (Eigen::Index i = 0; i < x.cols(); ++i) out.col(i) = score(x.col(i), t);
  return out;
}

Vector ScoreModel::vjp(const Vector& x, double t, const Vector& u) const {
  return jacobian(x, t).transpose() * u;
}

Matrix ScoreModel::jacobian(const Vector& x, double t) const {
  const int d = dim();
  Matrix j(d, d);
  for (int i = 0; i < d; ++i) j.col(i) = jvp(x, t, Vector::Unit(d, i), 0.0);
  return j;
}

Vector ScoreModel::time_derivative(const Vector& x, double t) const {
  return jvp(x, t, Vector::Zero(dim()), 1.0);
}

Vector ScoreModel::divergence_gradient(const Vector& x, double t) const {
  const int d = dim();
  Vector g = Vector::Zero(d);
  for (int i = 0; i < d; ++i) g += quadratic_gradient(x, t, Vector::Unit(d, i));
  return g;
}

FpTerms ScoreModel::fp_terms(const Vector& x, double t, std::span<const Vector> probes) const {
  FpTerms out;
  out.value = score(x, t);
  out.jacobian = jacobian(x, t);
  out.time_derivative = time_derivative(x, t);
  if (probes.empty()) {
    out.divergence = out.jacobian.trace();
    out.divergence_gradient = divergence_gradient(x, t);
  } else {
    out.divergence_gradient = Vector::Zero(dim());
    for (const Vector& v : probes) {
      out.divergence += v.dot(out.jacobian * v);
      out.divergence_gradient += quadratic_gradient(x, t, v);
    }
    out.divergence /= static_cast<double>(probes.size());
    out.divergence_gradient /= static_cast<double>(probes.size());
  }
  return out;
}

Matrix NetScoreModel::jacobian(const Vector& x, double t) const {
  const int d = dim();
  JetInput in{Batch(x), RowVector::Constant(1, t), {}, {}};
  for (int i = 0; i < d; ++i) in.directions.push_back({Batch(Vector::Unit(d, i)), {}});
  const JetValues out = net_.forward_jet(in);
  Matrix j(d, d);
  for (int i = 0; i < d; ++i) j.col(i) = out.first[i].col(0);
  return j;
}

Vector NetScoreModel::quadratic_gradient(const Vector& x, double t, const Vector& v) const {
  // d/dx_i (v^T J v) = v^T (d^2 s)[v, e_i].
  const int d = dim();
  JetInput in{Batch(x), RowVector::Constant(1, t), {{Batch(v), {}}}, {}};
  for (int i = 0; i < d; ++i) {
    in.directions.push_back({Batch(Vector::Unit(d, i)), {}});
    in.pairs.emplace_back(0, 1 + i);
  }
  const JetValues out = net_.forward_jet(in);
  Vector g(d);
  for (int i = 0; i < d; ++i) g(i) = v.dot(out.second[i].col(0));
  return g;
}

FpTerms NetScoreModel::fp_terms(const Vector& x, double t, std::span<const Vector> probes) const {
  const int d = dim();
  for (const Vector& v : probes)
    if (v.size() != d) throw ShapeError("fp_terms: probe dimension mismatch");
  // Directions: [time, e_1..e_D, v_1..v_K].
  JetInput in{Batch(x), RowVector::Constant(1, t), {}, {}};
  in.directions.push_back({{}, RowVector::Ones(1)});
  for (int i = 0; i < d; ++i) in.directions.push_back({Batch(Vector::Unit(d, i)), {}});
  const int k = static_cast<int>(probes.size());
  for (const Vector& v : probes) in.directions.push_back({Batch(v), {}});
  if (k == 0) {
    for (int j = 0; j < d; ++j)
      for (int i = 0; i < d; ++i) in.pairs.emplace_back(1 + j, 1 + i);
  } else {
    for (int q = 0; q < k; ++q)
      for (int i = 0; i < d; ++i) in.pairs.emplace_back(1 + d + q, 1 + i);
  }
  const JetValues out = net_.forward_jet(in);

  FpTerms r;
  r.value = out.value.col(0);
  r.time_derivative = out.first[0].col(0);
  r.jacobian.resize(d, d);
  for (int i = 0; i < d; ++i) r.jacobian.col(i) = out.first[1 + i].col(0);
  r.divergence_gradient = Vector::Zero(d);
  if (k == 0) {
    r.divergence = r.jacobian.trace();
    for (int j = 0; j < d; ++j)
      for (int i = 0; i < d; ++i) r.divergence_gradient(i) += out.second[j * d + i](j, 0);
  } else {
    for (int q = 0; q < k; ++q) {
      const Vector& v = probes[q];
      r.divergence += v.dot(out.first[1 + d + q].col(0));
      for (int i = 0; i < d; ++i) r.divergence_gradient(i) += v.dot(out.second[q * d + i].col(0));
    }
    r.divergence /= k;
    r.divergence_gradient /= k;
  }
  return r;
}

MixtureScoreModel::MixtureScoreModel(GaussianMixture gm, SdeSchedule sched, double dt_step)
    : gm_(std::move(gm)), sched_(std::move(sched)), dt_step_(dt_step) {
  gm_.validate();
}

Vector MixtureScoreModel::score(const Vector& x, double t) const {
  return marginal_at(gm_, sched_, t).score(x);
}

Batch MixtureScoreModel::score_batch(const Batch& x, double t) const {
  const MarginalMixture mm = marginal_at(gm_, sched_, t);
  Batch out(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.cols(); ++i) out.col(i) = mm.score(x.col(i));
  return out;
}

Vector MixtureScoreModel::jvp(const Vector& x, double t, const Vector& vx, double vt) const {
  Vector out = marginal_at(gm_, sched_, t).jacobian(x) * vx;
  if (vt != 0.0) out += vt * time_derivative(x, t);
  return out;
}

Matrix MixtureScoreModel::jacobian(const Vector& x, double t) const {
  return marginal_at(gm_, sched_, t).jacobian(x);
}

Vector MixtureScoreModel::time_derivative(const Vector& x, double t) const {
  return exact_dt_score(gm_, sched_, t, x, dt_step_);
}

Vector MixtureScoreModel::quadratic_gradient(const Vector& x, double t, const Vector& v) const {
  return marginal_at(gm_, sched_, t).quadratic_gradient(x, v);
}

Vector MixtureScoreModel::divergence_gradient(const Vector& x, double t) const {
  return marginal_at(gm_, sched_, t).divergence_gradient(x);
}

FpTerms MixtureScoreModel::fp_terms(const Vector& x, double t,
                                    std::span<const Vector> probes) const {
  const MarginalMixture mm = marginal_at(gm_, sched_, t);
  FpTerms r;
  r.value = mm.score(x);
  r.jacobian = mm.jacobian(x);
  r.time_derivative = time_derivative(x, t);
  if (probes.empty()) {
    r.divergence = mm.divergence(x);
    r.divergence_gradient = mm.divergence_gradient(x);
  } else {
    r.divergence_gradient = Vector::Zero(dim());
    for (const Vector& v : probes) {
      r.divergence += v.dot(r.jacobian * v);
      r.divergence_gradient += mm.quadratic_gradient(x, v);
    }
    r.divergence /= static_cast<double>(probes.size());
    r.divergence_gradient /= static_cast<double>(probes.size());
  }
  return r;
}

AffineScoreModel::AffineScoreModel(Matrix a, Vector b) : a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows() != a_.cols()) throw ShapeError("AffineScoreModel: A must be square");
  if (b_.size() == 0) b_ = Vector::Zero(a_.rows());
  if (b_.size() != a_.rows()) throw ShapeError("AffineScoreModel: b has wrong dimension");
}

}  // namespace scorelab
