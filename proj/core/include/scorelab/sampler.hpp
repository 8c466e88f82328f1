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

#include "scorelab/score_model.hpp"
#include "scorelab/sde.hpp"

namespace scorelab {

enum class ScoreSource { kNetwork, kOracle };

struct SamplerConfig {
  int n_steps = 1000;
  // Negative values mean "use the schedule's t_max / t_min".
  double t_start = -1.0;
  double t_end = -1.0;
  int n_samples = 10000;
  std::uint64_t seed = 0;
  ScoreSource score_source = ScoreSource::kNetwork;
  // States are recorded at the first grid time at or below each entry.
  std::vector<double> trajectory_times;

  void validate(const SdeSchedule& sched) const;
};

// Sample j draws from its own stream Engine(derive_seed(seed, j)): first the
// prior vector, then one noise vector per reverse step.
std::uint64_t sample_stream_seed(std::uint64_t seed, std::uint64_t sample_index);

// VP: N(0, I). VE: N(0, sigma_max^2 I).
Batch prior_sample(const SdeSchedule& sched, int dim, int n, std::uint64_t seed);

// x - [f - g^2 score] dt + g sqrt(dt) noise, stepping from t to t - dt.
Vector reverse_step(const Vector& x, const Vector& drift, double g, const Vector& score,
                    double dt, const Vector& noise);
Vector reverse_step(const Vector& x, double t, double dt, const Vector& score,
                    const SdeSchedule& sched, const Vector& noise);

struct TrajectorySlice {
  double t = 0.0;
  Batch states;
};

struct GenerateResult {
  Batch samples;
  std::vector<TrajectorySlice> trajectory;
};

// Euler-Maruyama on the reverse-time SDE over a uniform grid of n_steps from
// t_start down to t_end. Throws NumericalError on non-finite states.
GenerateResult generate(const SamplerConfig& cfg, const ScoreModel& score,
                        const SdeSchedule& sched);

}  // namespace scorelab
