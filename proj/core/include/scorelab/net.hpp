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
#include <string>
#include <utility>
#include <vector>

#include "scorelab/sde.hpp"
#include "scorelab/types.hpp"

namespace scorelab {

enum class Activation { kTanh, kSilu };

std::string to_string(Activation act);
Activation activation_from_string(const std::string& name);

// How the MLP output m(x, t) becomes the score.
//   kNone:     s = m
//   kInvSigma: s = -m / sigma(t)   (network predicts the noise direction)
enum class OutputScale { kNone, kInvSigma };

std::string to_string(OutputScale scale);
OutputScale output_scale_from_string(const std::string& name);

// Sinusoidal features of t. Feature 2j is sin(w_j t), feature 2j+1 is
// cos(w_j t), with ceil(E/2) frequencies log-spaced in [freq_min, freq_max].
struct TimeEmbedding {
  int features = 32;
  double freq_min = 1.0;
  double freq_max = 100.0;

  Vector frequencies() const;
  // Writes e(t), e'(t), e''(t) into the given columns (each of length E).
  void evaluate(double t, double* value, double* d1, double* d2) const;

  bool operator==(const TimeEmbedding&) const = default;
};

struct NetArchitecture {
  int data_dim = 2;
  std::vector<int> hidden = {128, 128, 128};
  Activation activation = Activation::kTanh;
  TimeEmbedding embedding;
  OutputScale output_scale = OutputScale::kNone;
  // Only consulted when output_scale == kInvSigma.
  SdeSchedule::Params schedule;

  // [D + E, hidden..., D]
  std::vector<int> widths() const;
  // sum over layers of (fan_in + 1) * fan_out
  std::size_t parameter_count() const;
  // Throws ConfigError.
  void validate() const;

  // `schedule` only takes part when output_scale == kInvSigma.
  bool operator==(const NetArchitecture& other) const;
};

// One forward-mode direction: input tangent (vx, vt). An empty `x` means a
// zero x-tangent; an empty `t` means a zero t-tangent.
struct JetDirection {
  Batch x;
  RowVector t;
};

// Input to a jet evaluation over a batch of B points (columns of `x`).
// `pairs` lists the mixed second-order tangents d^2 s[d1, d2] to propagate,
// indexing into `directions`.
struct JetInput {
  Batch x;
  RowVector t;
  std::vector<JetDirection> directions;
  std::vector<std::pair<int, int>> pairs;
};

// Network output and its tangents, each D x B.
//   value       s(x, t)
//   first[d]    J_x vx_d + (ds/dt) vt_d
//   second[p]   second directional derivative along directions d1 and d2
struct JetValues {
  Batch value;
  std::vector<Batch> first;
  std::vector<Batch> second;

  // Zero-filled values with the same shapes.
  JetValues zeros_like() const;
};

// Forward state kept for the reverse pass.
struct JetCache {
  int batch = 0;
  int blocks = 0;
  std::vector<std::pair<int, int>> pairs;
  std::vector<Matrix> inputs;       // stacked layer inputs
  std::vector<Matrix> preacts;      // stacked pre-activations
  Matrix raw_output;                // stacked m before output scaling
  std::vector<double> scale, scale_d1, scale_d2;  // c(t_b) and derivatives
  RowVector t;
  std::vector<RowVector> dir_t;     // vt per direction (zero-filled)
};

// Fixed-architecture MLP score model s(x, t; theta) = MLP([x; e(t)]) with
// closed-form value, tangent and adjoint rules per layer.
//
// theta layout, layer by layer: W (fan_out x fan_in, column-major) then b.
class ScoreNet {
 public:
  ScoreNet(NetArchitecture arch, Vector theta);

  // He-style init: W ~ N(0, 2 / fan_in), b = 0.
  static ScoreNet initialized(const NetArchitecture& arch, std::uint64_t seed);

  const NetArchitecture& architecture() const { return arch_; }
  int dim() const { return arch_.data_dim; }
  const Vector& parameters() const { return theta_; }
  Vector& mutable_parameters() { return theta_; }
  void set_parameters(const Vector& theta);

  Vector forward(const Vector& x, double t) const;
  Batch forward_batch(const Batch& x, const RowVector& t) const;
  Batch forward_batch(const Batch& x, double t) const;
  // J_x vx + (ds/dt) vt.
  Vector jvp(const Vector& x, double t, const Vector& vx, double vt) const;
  // u^T J_x (the x-block of the input adjoint).
  Vector vjp(const Vector& x, double t, const Vector& u) const;

  JetValues forward_jet(const JetInput& in, JetCache* cache = nullptr) const;
  // Accumulates d(loss)/d(theta) into grad_theta (if non-null) and
  // d(loss)/dx into grad_x (if non-null), given output adjoints.
  void backward_jet(const JetCache& cache, const JetValues& adjoint, Vector* grad_theta,
                    Batch* grad_x = nullptr) const;

 private:
  struct LayerView {
    Eigen::Map<const Matrix> w;
    Eigen::Map<const Vector> b;
  };
  LayerView layer(std::size_t l) const;

  NetArchitecture arch_;
  std::vector<int> widths_;
  std::vector<std::size_t> offsets_;
  Vector theta_;
};

// Scalar loss over jet outputs together with its output adjoints.
struct LossAndAdjoint {
  double loss = 0.0;
  JetValues adjoint;
};
using JetLoss = std::function<LossAndAdjoint(const JetValues&)>;

// Reverse-mode d(loss)/d(theta), including the paths through tangent
// propagation. Returns the loss value through `loss_out` when non-null.
Vector grad_params(const ScoreNet& net, const JetInput& input, const JetLoss& loss,
                   double* loss_out = nullptr);

}  // namespace scorelab
