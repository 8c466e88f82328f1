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
#include <functional>
#include <vector>

#include "scorelab/errors.hpp"
#include "scorelab/net.hpp"
#include "scorelab/objective.hpp"
#include "scorelab/sde.hpp"
#include "scorelab/target.hpp"

namespace scorelab {

struct AdamState {
  Vector m;
  Vector v;
  long step = 0;

  bool operator==(const AdamState& o) const {
    return step == o.step && m.size() == o.m.size() && m == o.m && v == o.v;
  }
};

struct AdamParams {
  double lr = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// One bias-corrected Adam update of theta in place.
void adam_step(Vector& theta, const Vector& grad, AdamState& state, const AdamParams& p);

struct TrainConfig {
  int epochs = 200;
  int batch_size = 128;
  double lr = 5e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  // Fresh target samples per epoch.
  int dataset_size = 10000;
  std::uint64_t seed = 0;
  int checkpoint_every = 50;
  ObjectiveSpec objective;
  SdeSchedule::Params schedule;
  GaussianMixture target;
  NetArchitecture net;

  // Throws ConfigError naming the train.* field.
  void validate() const;
};

// Learning-rate default: 1e-3 for the FP penalty, 5e-4 otherwise.
double default_learning_rate(Penalty penalty);

struct EpochRecord {
  int epoch = 0;
  double dsm = 0.0;
  double penalty = 0.0;
  double total = 0.0;
  double seconds = 0.0;
};

struct TrainResult {
  ScoreNet net;
  std::vector<EpochRecord> epochs;
  AdamState optimizer;
};

class TrainingDiverged : public NumericalError {
 public:
  TrainingDiverged(int epoch, int step, LossParts parts, std::vector<EpochRecord> history);

  int epoch() const { return epoch_; }
  int step() const { return step_; }
  const LossParts& parts() const { return parts_; }
  const std::vector<EpochRecord>& history() const { return history_; }

 private:
  int epoch_, step_;
  LossParts parts_;
  std::vector<EpochRecord> history_;
};

struct TrainHooks {
  // Called every checkpoint_every epochs and after the final epoch.
  std::function<void(int epoch, const ScoreNet&)> checkpoint;
  // Called after each epoch.
  std::function<void(const EpochRecord&)> epoch_done;
};

// Seed streams: network init from derive_seed(seed, "init"), minibatches
// from derive_seed(seed, "train"). Per step: draw_batch, one Adam step on
// total_loss. Deterministic given the config.
TrainResult train(const TrainConfig& cfg, const TrainHooks& hooks = {});

// Same, starting from a given network.
TrainResult train(const TrainConfig& cfg, ScoreNet initial, const TrainHooks& hooks = {});

}  // namespace scorelab
