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

#include "scorelab/sampler.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "scorelab/errors.hpp"
#include "scorelab/rng.hpp"

namespace scorelab {

namespace {

double resolved_start(const SamplerConfig& cfg, const SdeSchedule& sched) {
  return cfg.t_start < 0.0 ? sched.t_max() : cfg.t_start;
}
double resolved_end(const SamplerConfig& cfg, const SdeSchedule& sched) {
  return cfg.t_end < 0.0 ? sched.t_min() : cfg.t_end;
}

double prior_scale(const SdeSchedule& sched) {
  return sched.kind() == SdeKind::kVP ? 1.0 : sched.params().sigma_max;
}

}  // namespace

void SamplerConfig::validate(const SdeSchedule& sched) const {
  if (n_steps < 1) throw ConfigError("sampler.n_steps", "must be at least 1");
  if (n_samples < 1) throw ConfigError("sampler.n_samples", "must be at least 1");
  const double ts = resolved_start(*this, sched), te = resolved_end(*this, sched);
  if (!(ts <= sched.t_max())) throw ConfigError("sampler.t_start", "exceeds t_max");
  if (!(te >= sched.t_min())) throw ConfigError("sampler.t_end", "below t_min");
  if (!(ts > te)) throw ConfigError("sampler.t_start", "must exceed t_end");
}

std::uint64_t sample_stream_seed(std::uint64_t seed, std::uint64_t sample_index) {
  return derive_seed(seed, sample_index);
}

Batch prior_sample(const SdeSchedule& sched, int dim, int n, std::uint64_t seed) {
  if (n < 1) throw RangeError("prior_sample: n must be at least 1");
  const double scale = prior_scale(sched);
  Batch out(dim, n);
  for (int j = 0; j < n; ++j) {
    Engine engine(sample_stream_seed(seed, static_cast<std::uint64_t>(j)));
    out.col(j) = scale * normal_vector(engine, dim);
  }
  return out;
}

Vector reverse_step(const Vector& x, const Vector& drift, double g, const Vector& score,
                    double dt, const Vector& noise) {
  return x - (drift - g * g * score) * dt + g * std::sqrt(dt) * noise;
}

Vector reverse_step(const Vector& x, double t, double dt, const Vector& score,
                    const SdeSchedule& sched, const Vector& noise) {
  return reverse_step(x, sched.drift_coefficient(t) * x, std::sqrt(sched.diffusion_squared(t)),
                      score, dt, noise);
}

GenerateResult generate(const SamplerConfig& cfg, const ScoreModel& score,
                        const SdeSchedule& sched) {
  cfg.validate(sched);
  const int d = score.dim();
  const int n = cfg.n_samples;
  const double t_start = resolved_start(cfg, sched);
  const double t_end = resolved_end(cfg, sched);
  const double dt = (t_start - t_end) / cfg.n_steps;
  const double scale = prior_scale(sched);

  std::vector<Engine> streams;
  streams.reserve(n);
  Batch x(d, n);
  for (int j = 0; j < n; ++j) {
    streams.emplace_back(sample_stream_seed(cfg.seed, static_cast<std::uint64_t>(j)));
    x.col(j) = scale * normal_vector(streams.back(), d);
  }

  std::vector<double> pending = cfg.trajectory_times;
  std::sort(pending.begin(), pending.end(), std::greater<>());
  GenerateResult result;
  auto record = [&](double t) {
    while (!pending.empty() && t <= pending.front() + 1e-12) {
      result.trajectory.push_back({t, x});
      pending.erase(pending.begin());
    }
  };

  Batch noise(d, n);
  for (int i = 0; i < cfg.n_steps; ++i) {
    const double t = t_start - i * dt;
    record(t);
    const Batch s = score.score_batch(x, t);
    for (int j = 0; j < n; ++j) noise.col(j) = normal_vector(streams[j], d);
    const double a = sched.drift_coefficient(t);
    const double g = std::sqrt(sched.diffusion_squared(t));
    // x - (a x - g^2 s) dt + g sqrt(dt) noise, batched.
    x = x - (a * x - g * g * s) * dt + (g * std::sqrt(dt)) * noise;
    if (!x.allFinite())
      throw NumericalError(fmt::format("generate: non-finite state after step {}", i));
  }
  record(t_end);
  result.samples = std::move(x);
  return result;
}

}  // namespace scorelab
