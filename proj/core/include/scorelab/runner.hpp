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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scorelab/config.hpp"
#include "scorelab/metrics.hpp"

namespace scorelab {

namespace fs = std::filesystem;

// $SCORELAB_OUT when set, else "./runs".
fs::path output_root();

struct RunRecord {
  std::string run_id;
  fs::path dir;
  std::uint64_t seed = 0;
  // (purpose, derived seed) for every stream the run consumed.
  std::vector<std::pair<std::string, std::uint64_t>> seed_ledger;
  // Paths relative to `dir`.
  std::vector<std::string> artifacts;
  std::vector<double> epoch_seconds;
  bool failed = false;
  std::string failure;
};

// Writes config.json, losses.csv, timings.csv, checkpoints/epoch_N.ckpt and
// record.json into `dir`. A diverged run leaves the epochs completed so far
// and returns with failed = true. timings.csv is the only
// nondeterministic artifact.
RunRecord run_train(const ExperimentConfig& cfg, const fs::path& dir);

// samples.csv, plus trajectories.csv (sample_id, t, x1..xD) when
// sampler.trajectory_times is set. Network scores need a checkpoint.
RunRecord run_sample(const ExperimentConfig& cfg, const std::optional<fs::path>& checkpoint,
                     const fs::path& dir);

// rfp.csv, dsm.csv, frob.csv, score_err.csv, rfp_fd.csv when `fd`, and
// field_<i>.csv per diagnostics.field_times entry. Without a checkpoint the
// exact mixture score is diagnosed.
RunRecord run_diagnose(const ExperimentConfig& cfg, const std::optional<fs::path>& checkpoint,
                       const fs::path& dir, bool fd = false);

// report.json at `out`.
MetricReport run_metrics(const ExperimentConfig& cfg, const fs::path& real_csv,
                         const fs::path& fake_csv, const fs::path& out);

// target.json (explicit mixture) and samples.csv with metrics.n_real draws.
RunRecord target_dump(const ExperimentConfig& cfg, const fs::path& dir);

struct SweepCell {
  Penalty penalty = Penalty::kNone;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string failure;
  double rfp_small_log10 = 0.0;  // mean log10 r_FP over t < small_t
  double frob_small = 0.0;       // mean Frobenius curve over t < small_t
  double dsm_min_t = 0.0;        // conditional DSM at the smallest grid t
  double final_dsm = 0.0;
  double epoch_seconds = 0.0;    // median
  MetricReport metrics;
};

struct SweepResult {
  std::vector<SweepCell> cells;
  bool any_failed = false;
};

// Trains and evaluates every (penalty, lambda, seed) cell. Cells use the
// penalty's default learning rate. Writes cells.csv (one row per cell),
// summary.csv (mean and std over seeds per (penalty, lambda)) and
// per-cell run directories under `dir`.
SweepResult run_sweep(const ExperimentConfig& cfg, const fs::path& dir);

// The experiment config of one sweep cell.
ExperimentConfig sweep_cell_config(const ExperimentConfig& cfg, Penalty penalty, double lambda,
                                   std::uint64_t seed);

}  // namespace scorelab
