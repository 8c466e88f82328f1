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

#include "scorelab/sde.hpp"

#include <cmath>

#include <fmt/format.h>

#include "scorelab/errors.hpp"

namespace scorelab {

std::string to_string(SdeKind kind) { return kind == SdeKind::kVP ? "VP" : "VE"; }

SdeKind sde_kind_from_string(const std::string& name) {
  if (name == "VP") return SdeKind::kVP;
  if (name == "VE") return SdeKind::kVE;
  throw ConfigError("schedule.kind", "expected \"VP\" or \"VE\", got \"" + name + "\"");
}

SdeSchedule::SdeSchedule(const Params& params) : params_(params) {
  if (params.kind == SdeKind::kVP) {
    if (!(params.beta_min > 0.0))
      throw ConfigError("schedule.beta_min", "must be positive");
    if (!(params.beta_max > params.beta_min))
      throw ConfigError("schedule.beta_max", "must exceed beta_min");
  } else {
    if (!(params.sigma_min > 0.0))
      throw ConfigError("schedule.sigma_min", "must be positive");
    if (!(params.sigma_max > params.sigma_min))
      throw ConfigError("schedule.sigma_max", "must exceed sigma_min");
  }
  if (!(params.t_max > 0.0 && params.t_max <= 1.0))
    throw ConfigError("schedule.t_max", "must lie in (0, 1]");
  if (!(params.t_min > 0.0 && params.t_min < params.t_max))
    throw ConfigError("schedule.t_min", "must lie in (0, t_max)");
}

SdeSchedule SdeSchedule::vp(double beta_min, double beta_max, double t_min) {
  Params p;
  p.kind = SdeKind::kVP;
  p.beta_min = beta_min;
  p.beta_max = beta_max;
  p.t_min = t_min;
  return SdeSchedule(p);
}

SdeSchedule SdeSchedule::ve(double sigma_min, double sigma_max, double t_min) {
  Params p;
  p.kind = SdeKind::kVE;
  p.sigma_min = sigma_min;
  p.sigma_max = sigma_max;
  p.t_min = t_min;
  return SdeSchedule(p);
}

void SdeSchedule::check_training_range(double t, const char* what) const {
  // t = 0 is admitted as well: the closed forms are regular there and the
  // hand-checked examples use it.
  if (!(t >= 0.0 && t <= params_.t_max))
    throw RangeError(fmt::format("{}: t = {} outside [0, {}]", what, t, params_.t_max));
}

double SdeSchedule::beta(double t) const {
  if (params_.kind != SdeKind::kVP) return 0.0;
  return params_.beta_min + t * (params_.beta_max - params_.beta_min);
}

double SdeSchedule::drift_coefficient(double t) const {
  return params_.kind == SdeKind::kVP ? -0.5 * beta(t) : 0.0;
}

Vector SdeSchedule::drift(const Vector& x, double t) const {
  check_training_range(t, "drift");
  return drift_coefficient(t) * x;
}

double SdeSchedule::drift_divergence(int dim, double t) const {
  return static_cast<double>(dim) * drift_coefficient(t);
}

double SdeSchedule::diffusion_squared(double t) const {
  if (params_.kind == SdeKind::kVP) return beta(t);
  const double log_ratio = std::log(params_.sigma_max / params_.sigma_min);
  const double s = kernel_params_unchecked(t).sigma;
  return s * s * 2.0 * log_ratio;
}

double SdeSchedule::diffusion(double t) const {
  check_training_range(t, "diffusion");
  return std::sqrt(diffusion_squared(t));
}

KernelParams SdeSchedule::kernel_params_unchecked(double t) const {
  if (params_.kind == SdeKind::kVP) {
    const double integral =
        params_.beta_min * t + 0.5 * (params_.beta_max - params_.beta_min) * t * t;
    const double alpha = std::exp(-0.5 * integral);
    // 1 - alpha^2 via expm1 keeps relative accuracy at tiny t.
    const double sigma = std::sqrt(-std::expm1(-integral));
    return {alpha, sigma};
  }
  return {1.0, params_.sigma_min * std::pow(params_.sigma_max / params_.sigma_min, t)};
}

KernelParams SdeSchedule::kernel_params(double t) const {
  check_training_range(t, "kernel_params");
  return kernel_params_unchecked(t);
}

SigmaJet SdeSchedule::sigma_jet(double t) const {
  const KernelParams k = kernel_params_unchecked(t);
  if (params_.kind == SdeKind::kVE) {
    const double r = std::log(params_.sigma_max / params_.sigma_min);
    return {k.sigma, r * k.sigma, r * r * k.sigma};
  }
  // u = sigma^2 = 1 - alpha^2, u' = beta alpha^2, u'' = (beta' - beta^2) alpha^2.
  const double b = beta(t);
  const double a2 = k.alpha * k.alpha;
  const double du = b * a2;
  const double d2u = (params_.beta_max - params_.beta_min - b * b) * a2;
  const double s = k.sigma;
  const double d1 = du / (2.0 * s);
  const double d2 = d2u / (2.0 * s) - du * du / (4.0 * s * s * s);
  return {s, d1, d2};
}

Vector SdeSchedule::perturb(const Vector& x0, double t, const Vector& z) const {
  if (x0.size() != z.size())
    throw ShapeError(fmt::format("perturb: x0 has dim {}, z has dim {}", x0.size(), z.size()));
  const KernelParams k = kernel_params(t);
  return k.alpha * x0 + k.sigma * z;
}

}  // namespace scorelab
