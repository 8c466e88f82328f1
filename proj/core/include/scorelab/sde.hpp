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

#include <string>

#include "scorelab/types.hpp"

namespace scorelab {

enum class SdeKind { kVP, kVE };

std::string to_string(SdeKind kind);
SdeKind sde_kind_from_string(const std::string& name);

// Transition kernel parameters: x(t) | x(0) ~ N(alpha * x(0), sigma^2 I).
struct KernelParams {
  double alpha = 1.0;
  double sigma = 0.0;
};

// sigma(t) and its first two time derivatives; used by networks whose
// output is scaled by 1/sigma(t).
struct SigmaJet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

// Forward noising SDE dx = f(x,t) dt + g(t) dw.
//
// VP uses the linear schedule beta(t) = beta_min + t (beta_max - beta_min),
// f = -beta(t) x / 2 and g = sqrt(beta(t)). VE uses the geometric schedule
// sigma(t) = sigma_min (sigma_max / sigma_min)^t with zero drift.
//
// Both drifts are linear in x, so f(x,t) = drift_coefficient(t) * x.
class SdeSchedule {
 public:
  struct Params {
    SdeKind kind = SdeKind::kVP;
    double beta_min = 0.1;
    double beta_max = 20.0;
    double sigma_min = 0.01;
    double sigma_max = 50.0;
    double t_min = 1e-5;
    double t_max = 1.0;

    bool operator==(const Params&) const = default;
  };

  // Throws ConfigError when an invariant is violated.
  explicit SdeSchedule(const Params& params);
  SdeSchedule() : SdeSchedule(Params{}) {}

  static SdeSchedule vp(double beta_min = 0.1, double beta_max = 20.0, double t_min = 1e-5);
  static SdeSchedule ve(double sigma_min = 0.01, double sigma_max = 50.0, double t_min = 1e-5);

  const Params& params() const { return params_; }
  SdeKind kind() const { return params_.kind; }
  double t_min() const { return params_.t_min; }
  double t_max() const { return params_.t_max; }

  // beta(t); VP only (zero for VE).
  double beta(double t) const;

  // f(x, t). Requires t in [t_min, t_max].
  Vector drift(const Vector& x, double t) const;
  // c(t) with f(x,t) = c(t) x. No range check.
  double drift_coefficient(double t) const;
  // div_x f = D * c(t), closed form.
  double drift_divergence(int dim, double t) const;

  // g(t). Requires t in [t_min, t_max].
  double diffusion(double t) const;
  // g(t)^2 without range check.
  double diffusion_squared(double t) const;

  // Requires t in [0, t_max].
  KernelParams kernel_params(double t) const;
  // Closed form valid for any t >= 0; no upper range check.
  KernelParams kernel_params_unchecked(double t) const;

  SigmaJet sigma_jet(double t) const;

  // alpha(t) x0 + sigma(t) z.
  Vector perturb(const Vector& x0, double t, const Vector& z) const;

  bool operator==(const SdeSchedule& other) const { return params_ == other.params_; }

 private:
  void check_training_range(double t, const char* what) const;

  Params params_;
};

}  // namespace scorelab
