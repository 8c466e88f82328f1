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

#include <memory>
#include <span>

#include "scorelab/net.hpp"
#include "scorelab/sde.hpp"
#include "scorelab/target.hpp"
#include "scorelab/types.hpp"

namespace scorelab {

// Differential data of a score field at one point (x, t).
struct FpTerms {
  Vector value;                // s
  Matrix jacobian;             // ds/dx, D x D
  Vector time_derivative;      // ds/dt
  double divergence = 0.0;     // tr J, or the probe average of v^T J v
  Vector divergence_gradient;  // grad_x of `divergence`
};

// A time-dependent vector field s(x, t) on R^D with the derivatives the
// objective and diagnostics need. Implementations: a trained network, the
// analytic mixture score, and affine fields.
class ScoreModel {
 public:
  virtual ~ScoreModel() = default;

  virtual int dim() const = 0;
  virtual Vector score(const Vector& x, double t) const = 0;
  // J vx + (ds/dt) vt.
  virtual Vector jvp(const Vector& x, double t, const Vector& vx, double vt) const = 0;
  // grad_x (v^T J(x) v).
  virtual Vector quadratic_gradient(const Vector& x, double t, const Vector& v) const = 0;

  // Columns of x at a common t. Default loops over score().
  virtual Batch score_batch(const Batch& x, double t) const;
  // u^T J. Default: jacobian()^T u.
  virtual Vector vjp(const Vector& x, double t, const Vector& u) const;
  // Default: D unit-vector JVPs.
  virtual Matrix jacobian(const Vector& x, double t) const;
  virtual Vector time_derivative(const Vector& x, double t) const;
  // grad_x tr J. Default: sum of quadratic_gradient over unit vectors.
  virtual Vector divergence_gradient(const Vector& x, double t) const;
  // Everything the FP error needs. With no probes the divergence and its
  // gradient are exact; otherwise they are Hutchinson probe averages.
  virtual FpTerms fp_terms(const Vector& x, double t, std::span<const Vector> probes) const;
};

// Wraps a ScoreNet; derivatives come from one jet pass.
class NetScoreModel final : public ScoreModel {
 public:
  explicit NetScoreModel(const ScoreNet& net) : net_(net) {}

  int dim() const override { return net_.dim(); }
  Vector score(const Vector& x, double t) const override { return net_.forward(x, t); }
  Batch score_batch(const Batch& x, double t) const override { return net_.forward_batch(x, t); }
  Vector jvp(const Vector& x, double t, const Vector& vx, double vt) const override {
    return net_.jvp(x, t, vx, vt);
  }
  Vector vjp(const Vector& x, double t, const Vector& u) const override {
    return net_.vjp(x, t, u);
  }
  Matrix jacobian(const Vector& x, double t) const override;
  Vector quadratic_gradient(const Vector& x, double t, const Vector& v) const override;
  FpTerms fp_terms(const Vector& x, double t, std::span<const Vector> probes) const override;

 private:
  const ScoreNet& net_;
};

// Exact score of the time-t marginal of a Gaussian mixture. The time
// derivative uses Richardson-extrapolated central differences with step
// `dt_step`.
class MixtureScoreModel final : public ScoreModel {
 public:
  MixtureScoreModel(GaussianMixture gm, SdeSchedule sched, double dt_step = 1e-5);

  int dim() const override { return gm_.dim(); }
  Vector score(const Vector& x, double t) const override;
  Batch score_batch(const Batch& x, double t) const override;
  Vector jvp(const Vector& x, double t, const Vector& vx, double vt) const override;
  Matrix jacobian(const Vector& x, double t) const override;
  Vector time_derivative(const Vector& x, double t) const override;
  Vector quadratic_gradient(const Vector& x, double t, const Vector& v) const override;
  Vector divergence_gradient(const Vector& x, double t) const override;
  FpTerms fp_terms(const Vector& x, double t, std::span<const Vector> probes) const override;

  const GaussianMixture& mixture() const { return gm_; }
  const SdeSchedule& schedule() const { return sched_; }

 private:
  GaussianMixture gm_;
  SdeSchedule sched_;
  double dt_step_;
};

// s(x, t) = A x + b, constant in t.
class AffineScoreModel final : public ScoreModel {
 public:
  explicit AffineScoreModel(Matrix a, Vector b = {});

  int dim() const override { return static_cast<int>(a_.rows()); }
  Vector score(const Vector& x, double) const override { return a_ * x + b_; }
  Vector jvp(const Vector&, double, const Vector& vx, double) const override { return a_ * vx; }
  Vector vjp(const Vector&, double, const Vector& u) const override {
    return a_.transpose() * u;
  }
  Matrix jacobian(const Vector&, double) const override { return a_; }
  Vector time_derivative(const Vector&, double) const override {
    return Vector::Zero(dim());
  }
  Vector quadratic_gradient(const Vector&, double, const Vector&) const override {
    return Vector::Zero(dim());
  }

 private:
  Matrix a_;
  Vector b_;
};

}  // namespace scorelab
