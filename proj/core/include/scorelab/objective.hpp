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
#include <span>
#include <string>
#include <vector>

#include "scorelab/net.hpp"
#include "scorelab/rng.hpp"
#include "scorelab/score_model.hpp"
#include "scorelab/sde.hpp"
#include "scorelab/target.hpp"

namespace scorelab {

enum class Penalty { kNone, kFP, kSN, kJAC, kDIV };
enum class GradMode { kExact, kFiniteDifference };
// Norm inside the FP penalty: kL2 averages |eps|, kSquaredL2 averages |eps|^2.
enum class FpNorm { kL2, kSquaredL2 };

std::string to_string(Penalty p);
Penalty penalty_from_string(const std::string& name);
std::string to_string(GradMode m);
GradMode grad_mode_from_string(const std::string& name);
std::string to_string(FpNorm n);
FpNorm fp_norm_from_string(const std::string& name);

struct ObjectiveSpec {
  Penalty penalty = Penalty::kNone;
  double lambda = 0.0;
  int probes = 1;
  double fd_step_x = 1e-4;
  GradMode grad_mode = GradMode::kExact;
  FpNorm fp_norm = FpNorm::kL2;

  // Throws ConfigError naming the objective.* field.
  void validate() const;
  bool operator==(const ObjectiveSpec&) const = default;
};

// A training minibatch, one sample per column. xt = alpha(t) x0 + sigma(t) z
// exactly; probes[k] holds the k-th probe vector of every sample.
struct BatchSample {
  Batch x0;
  RowVector t;
  Batch z;
  Batch xt;
  RowVector sigma;
  std::vector<Batch> probes;

  int size() const { return static_cast<int>(x0.cols()); }
  int dim() const { return static_cast<int>(x0.rows()); }
  // The probes of sample b as a list of vectors.
  std::vector<Vector> probes_of(int b) const;
};

BatchSample make_batch(const SdeSchedule& sched, Batch x0, RowVector t, Batch z,
                       std::vector<Batch> probes = {});

// Draw order: x0 from the target, t ~ U[t_min, t_max] per sample, z, then
// probe sets k = 0..K-1.
BatchSample draw_batch(const GaussianMixture& target, const SdeSchedule& sched, int batch_size,
                       int probes, Engine& engine);

// mean_b |sigma(t_b) s(xt_b, t_b) + z_b|^2
double loss_dsm(const ScoreModel& model, const BatchSample& batch);

// (1/K) sum_k <v_k, J v_k>
double hutchinson_div(const ScoreModel& model, const Vector& x, double t,
                      std::span<const Vector> probes);
// (1/K) sum_k |v_k^T J|^2
double hutchinson_frob(const ScoreModel& model, const Vector& x, double t,
                       std::span<const Vector> probes);

// L[s] = g^2/2 div s + g^2/2 |s|^2 - <f, s> - div f. No probes means the
// exact trace.
double operator_L(const ScoreModel& model, const SdeSchedule& sched, const Vector& x, double t,
                  std::span<const Vector> probes);

// eps = ds/dt - grad_x L[s].
Vector fp_error(const ScoreModel& model, const SdeSchedule& sched, const Vector& x, double t,
                std::span<const Vector> probes, GradMode mode = GradMode::kExact,
                double fd_step_x = 1e-4);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int n = 0;
};

// (1/D) E |eps|^2 over x0 ~ target, x(t) | x0. Fresh probes per draw;
// probes == 0 uses exact traces.
McEstimate residual_rfp(const ScoreModel& model, const GaussianMixture& target,
                        const SdeSchedule& sched, double t, int n_mc, std::uint64_t seed,
                        int probes = 1, GradMode mode = GradMode::kExact,
                        double fd_step_x = 1e-4);

// FP:  (1/D) mean |eps|      (or |eps|^2 with FpNorm::kSquaredL2)
// SN:  (1/D) mean |s|^2
// JAC: (1/D) mean hutchinson_frob
// DIV: (1/D) mean hutchinson_div^2
// A batch without probes uses exact traces.
double penalty(const ScoreModel& model, const SdeSchedule& sched, const BatchSample& batch,
               const ObjectiveSpec& spec);

// loss_dsm + lambda * penalty
double total_loss(const ScoreModel& model, const SdeSchedule& sched, const BatchSample& batch,
                  const ObjectiveSpec& spec);

struct LossParts {
  double dsm = 0.0;
  double penalty = 0.0;
  double total = 0.0;
};

// Training path: the same quantities evaluated in one batched jet pass of
// the network, with the exact theta-gradient of `total` accumulated into
// *grad (when non-null). FP terms always use exact derivatives here.
LossParts loss_and_gradient(const ScoreNet& net, const SdeSchedule& sched,
                            const BatchSample& batch, const ObjectiveSpec& spec, Vector* grad);

}  // namespace scorelab
