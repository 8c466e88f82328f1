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
#include <vector>

#include "scorelab/objective.hpp"
#include "scorelab/score_model.hpp"
#include "scorelab/sde.hpp"
#include "scorelab/target.hpp"

namespace scorelab {

// One point of a noise-level curve. Grid point i draws from
// Engine(derive_seed(seed, i)), so curves computed with a common seed share
// their (x0, z, probe) draws across models.
struct CurvePoint {
  double t = 0.0;
  double value = 0.0;
  double std_error = 0.0;
  int n_mc = 0;
};

using Curve = std::vector<CurvePoint>;

// n points log-spaced on [lo, hi], endpoints included.
std::vector<double> log_grid(double lo, double hi, int n);
// 40 points on [1e-4, 1].
std::vector<double> default_t_grid();

// r_FP(t). probes == 0 evaluates divergences exactly.
Curve curve_rfp(const ScoreModel& model, const GaussianMixture& target, const SdeSchedule& sched,
                const std::vector<double>& t_grid, int n_mc, std::uint64_t seed, int probes = 0,
                GradMode mode = GradMode::kExact, double fd_step_x = 1e-4);

// Conditional DSM loss E |sigma(t) s(x_t, t) + z|^2 at each t.
Curve curve_dsm(const ScoreModel& model, const GaussianMixture& target, const SdeSchedule& sched,
                const std::vector<double>& t_grid, int n_mc, std::uint64_t seed);

// Mean Hutchinson estimate of |J|_F^2 at each t.
Curve curve_frobenius(const ScoreModel& model, const GaussianMixture& target,
                      const SdeSchedule& sched, const std::vector<double>& t_grid, int n_mc,
                      int probes, std::uint64_t seed);

// sqrt(E |s - s*|^2 / D) against the exact marginal score. The standard
// error is propagated from the mean square by the delta method.
Curve score_error(const ScoreModel& model, const GaussianMixture& target, const SdeSchedule& sched,
                  const std::vector<double>& t_grid, int n_mc, std::uint64_t seed);

struct FieldGrid {
  double x1_min = -4.0, x1_max = 4.0;
  double x2_min = -4.0, x2_max = 4.0;
  int n1 = 41, n2 = 41;
};

// d_i = ds_i/dx_i. Scaled columns: s * sigma(t) and d * sigma(t)^2.
struct FieldRow {
  double x1, x2, t;
  double s1, s2, d1, d2;
  double s1_scaled, s2_scaled, d1_scaled, d2_scaled;
};

// Score and per-coordinate divergence contributions on a regular 2-D grid,
// x1 varying fastest, for each t in t_list. Throws ShapeError unless D = 2.
std::vector<FieldRow> score_field_dump(const ScoreModel& model, const SdeSchedule& sched,
                                       const std::vector<double>& t_list, const FieldGrid& grid);

// Mean of log10(value) over points with t < t_below.
double mean_log10_below(const Curve& curve, double t_below);
// Mean of value over points with t < t_below.
double mean_below(const Curve& curve, double t_below);

}  // namespace scorelab
