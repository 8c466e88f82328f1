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
#include <filesystem>
#include <string>
#include <vector>

#include "scorelab/diagnostics.hpp"
#include "scorelab/sampler.hpp"
#include "scorelab/train.hpp"

namespace scorelab {

struct DiagnosticsConfig {
  // Empty means default_t_grid().
  std::vector<double> t_grid;
  int n_mc = 256;
  // Probes for the r_FP curve; 0 evaluates divergences exactly.
  int rfp_probes = 0;
  int frob_probes = 1;
  double fd_step_x = 1e-4;
  // Field dumps are written for these times (D = 2 only).
  std::vector<double> field_times;
  FieldGrid field_grid;

  std::vector<double> grid() const { return t_grid.empty() ? default_t_grid() : t_grid; }
};

struct MetricsConfig {
  int k = 5;
  // Size of the reference set drawn from the target.
  int n_real = 10000;
};

struct SweepConfig {
  // None is run once with lambda 0; every other penalty once per lambda.
  std::vector<Penalty> penalties;
  std::vector<double> lambdas;
  std::vector<std::uint64_t> seeds;
  // Residual and Frobenius summaries average over grid points below this t.
  double small_t = 1e-2;
};

// A full experiment description. Stream seeds are derived from `seed`:
// "init" and "train" inside train(), "sampler", "diagnostics" and
// "metrics.real" in the runner.
struct ExperimentConfig {
  std::string name = "run";
  std::uint64_t seed = 0;
  TrainConfig train;
  SamplerConfig sampler;
  DiagnosticsConfig diagnostics;
  MetricsConfig metrics;
  bool has_sweep = false;
  SweepConfig sweep;

  // Throws ConfigError naming the offending field.
  void validate() const;
};

// Missing keys take defaults; train.lr defaults by penalty; objective.lambda
// is required unless the penalty is None. Unknown keys are errors.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Every field written explicitly; parse_config(dump_config(c)) reproduces c.
std::string dump_config(const ExperimentConfig& cfg);

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

}  // namespace scorelab
