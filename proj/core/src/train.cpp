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

#include "scorelab/train.hpp"

#include <chrono>
#include <cmath>

#include <fmt/format.h>

namespace scorelab {

void adam_step(Vector& theta, const Vector& grad, AdamState& state, const AdamParams& p) {
  if (grad.size() != theta.size()) throw ShapeError("adam_step: gradient size mismatch");
  if (state.m.size() != theta.size()) {
    state.m = Vector::Zero(theta.size());
    state.v = Vector::Zero(theta.size());
    state.step = 0;
  }
  ++state.step;
  state.m = p.beta1 * state.m + (1.0 - p.beta1) * grad;
  state.v = p.beta2 * state.v + (1.0 - p.beta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(p.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(p.beta2, static_cast<double>(state.step));
  theta.array() -=
      p.lr * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + p.eps);
}

double default_learning_rate(Penalty penalty) { return penalty == Penalty::kFP ? 1e-3 : 5e-4; }

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("train.epochs", "must be at least 1");
  if (batch_size < 1) throw ConfigError("train.batch_size", "must be at least 1");
  if (dataset_size < 1) throw ConfigError("train.dataset_size", "must be at least 1");
  if (!(lr > 0.0)) throw ConfigError("train.lr", "must be positive");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0))
    throw ConfigError("train.adam_betas", "beta1 must lie in [0, 1)");
  if (!(adam_beta2 >= 0.0 && adam_beta2 < 1.0))
    throw ConfigError("train.adam_betas", "beta2 must lie in [0, 1)");
  if (!(adam_eps > 0.0)) throw ConfigError("train.adam_eps", "must be positive");
  if (checkpoint_every < 1) throw ConfigError("train.checkpoint_every", "must be at least 1");
  objective.validate();
  SdeSchedule check(schedule);
  target.validate();
  net.validate();
  if (net.data_dim != target.dim())
    throw ConfigError("net.data_dim", "differs from the target dimension");
}

TrainingDiverged::TrainingDiverged(int epoch, int step, LossParts parts,
                                   std::vector<EpochRecord> history)
    : NumericalError(fmt::format(
          "non-finite loss at epoch {} step {} (dsm = {}, penalty = {}, total = {})", epoch,
          step, parts.dsm, parts.penalty, parts.total)),
      epoch_(epoch),
      step_(step),
      parts_(parts),
      history_(std::move(history)) {}

TrainResult train(const TrainConfig& cfg, const TrainHooks& hooks) {
  cfg.validate();
  return train(cfg, ScoreNet::initialized(cfg.net, derive_seed(cfg.seed, "init")), hooks);
}

TrainResult train(const TrainConfig& cfg, ScoreNet initial, const TrainHooks& hooks) {
  cfg.validate();
  const SdeSchedule sched(cfg.schedule);
  const AdamParams adam{cfg.lr, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps};
  const bool needs_probes = cfg.objective.penalty == Penalty::kFP ||
                            cfg.objective.penalty == Penalty::kJAC ||
                            cfg.objective.penalty == Penalty::kDIV;
  const int probes = needs_probes ? cfg.objective.probes : 0;

  TrainResult result{std::move(initial), {}, {}};
  ScoreNet& net = result.net;
  Engine engine(derive_seed(cfg.seed, "train"));
  Vector grad(net.parameters().size());

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    EpochRecord rec;
    rec.epoch = epoch;
    int seen = 0, step = 0;
    while (seen < cfg.dataset_size) {
      const int n = std::min(cfg.batch_size, cfg.dataset_size - seen);
      const BatchSample batch = draw_batch(cfg.target, sched, n, probes, engine);
      grad.setZero();
      const LossParts parts = loss_and_gradient(net, sched, batch, cfg.objective, &grad);
      if (!std::isfinite(parts.total) || !grad.allFinite())
        throw TrainingDiverged(epoch, step, parts, result.epochs);
      adam_step(net.mutable_parameters(), grad, result.optimizer, adam);
      rec.dsm += parts.dsm * n;
      rec.penalty += parts.penalty * n;
      seen += n;
      ++step;
    }
    rec.dsm /= seen;
    rec.penalty /= seen;
    rec.total = rec.dsm + cfg.objective.lambda * rec.penalty;
    rec.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.epochs.push_back(rec);
    if (hooks.epoch_done) hooks.epoch_done(rec);
    if (hooks.checkpoint && (epoch % cfg.checkpoint_every == 0 || epoch == cfg.epochs))
      hooks.checkpoint(epoch, net);
  }
  return result;
}

}  // namespace scorelab
