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

#include "scorelab/diagnostics.hpp"

#include <cmath>

#include "scorelab/errors.hpp"
#include "scorelab/rng.hpp"

namespace scorelab {

namespace {

void check_args(const ScoreModel& model, const GaussianMixture& target,
                const std::vector<double>& t_grid, int n_mc) {
  if (model.dim() != target.dim()) throw ShapeError("diagnostics: model and target dimensions differ");
  if (n_mc < 1) throw RangeError("diagnostics: n_mc must be >= 1");
  if (t_grid.empty()) throw RangeError("diagnostics: empty t grid");
}

CurvePoint summarize(double t, const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double se = v.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  return {t, mean, se, static_cast<int>(v.size())};
}

// x0 ~ target, z ~ N(0, I), x_t = alpha x0 + sigma z.
struct Draws {
  Batch z;
  Batch xt;
  double sigma;
};

Draws draw(const GaussianMixture& target, const SdeSchedule& sched, double t, int n, Engine& eng) {
  const Batch x0 = sample(target, n, eng);
  Batch z = normal_matrix(eng, target.dim(), n);
  const auto kp = sched.kernel_params(t);
  Batch xt = kp.alpha * x0 + kp.sigma * z;
  return {std::move(z), std::move(xt), kp.sigma};
}

}  // namespace

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi >= lo) || n < 1) throw RangeError("log_grid: need 0 < lo <= hi, n >= 1");
  std::vector<double> g(n);
  if (n == 1) {
    g[0] = lo;
    return g;
  }
  const double a = std::log10(lo), b = std::log10(hi);
  for (int i = 0; i < n; ++i) g[i] = std::pow(10.0, a + (b - a) * i / (n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

std::vector<double> default_t_grid() { return log_grid(1e-4, 1.0, 40); }

Curve curve_rfp(const ScoreModel& model, const GaussianMixture& target, const SdeSchedule& sched,
                const std::vector<double>& t_grid, int n_mc, std::uint64_t seed, int probes,
                GradMode mode, double fd_step_x) {
  check_args(model, target, t_grid, n_mc);
  Curve out;
  out.reserve(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const McEstimate e = residual_rfp(model, target, sched, t_grid[i], n_mc, derive_seed(seed, i),
                                      probes, mode, fd_step_x);
    out.push_back({t_grid[i], e.mean, e.std_error, e.n});
  }
  return out;
}

Curve curve_dsm(const ScoreModel& model, const GaussianMixture& target, const SdeSchedule& sched,
                const std::vector<double>& t_grid, int n_mc, std::uint64_t seed) {
  check_args(model, target, t_grid, n_mc);
  Curve out;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double t = t_grid[i];
    Engine eng(derive_seed(seed, i));
    const Draws d = draw(target, sched, t, n_mc, eng);
    const Batch s = model.score_batch(d.xt, t);
    std::vector<double> v(n_mc);
    for (int j = 0; j < n_mc; ++j) v[j] = (d.sigma * s.col(j) + d.z.col(j)).squaredNorm();
    out.push_back(summarize(t, v));
  }
  return out;
}

Curve curve_frobenius(const ScoreModel& model, const GaussianMixture& target,
                      const SdeSchedule& sched, const std::vector<double>& t_grid, int n_mc,
                      int probes, std::uint64_t seed) {
  check_args(model, target, t_grid, n_mc);
  if (probes < 1) throw RangeError("curve_frobenius: probes must be >= 1");
  const int dim = target.dim();
  Curve out;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double t = t_grid[i];
    Engine eng(derive_seed(seed, i));
    const Draws d = draw(target, sched, t, n_mc, eng);
    std::vector<double> v(n_mc);
    std::vector<Vector> vs(probes);
    for (int j = 0; j < n_mc; ++j) {
      for (auto& p : vs) p = normal_vector(eng, dim);
      v[j] = hutchinson_frob(model, d.xt.col(j), t, vs);
    }
    out.push_back(summarize(t, v));
  }
  return out;
}

Curve score_error(const ScoreModel& model, const GaussianMixture& target, const SdeSchedule& sched,
                  const std::vector<double>& t_grid, int n_mc, std::uint64_t seed) {
  check_args(model, target, t_grid, n_mc);
  const double dim = target.dim();
  Curve out;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double t = t_grid[i];
    Engine eng(derive_seed(seed, i));
    const Draws d = draw(target, sched, t, n_mc, eng);
    const MarginalMixture mm = marginal_at(target, sched, t);
    const Batch s = model.score_batch(d.xt, t);
    std::vector<double> v(n_mc);
    for (int j = 0; j < n_mc; ++j)
      v[j] = (s.col(j) - mm.score(d.xt.col(j))).squaredNorm() / dim;
    CurvePoint p = summarize(t, v);
    const double rms = std::sqrt(p.value);
    p.std_error = rms > 0.0 ? p.std_error / (2.0 * rms) : 0.0;
    p.value = rms;
    out.push_back(p);
  }
  return out;
}

std::vector<FieldRow> score_field_dump(const ScoreModel& model, const SdeSchedule& sched,
                                       const std::vector<double>& t_list, const FieldGrid& grid) {
  if (model.dim() != 2) throw ShapeError("score_field_dump: field dumps require D = 2");
  if (grid.n1 < 1 || grid.n2 < 1) throw RangeError("score_field_dump: empty grid");
  auto coord = [](double lo, double hi, int n, int i) {
    return n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  };
  const Vector e1 = Vector::Unit(2, 0), e2 = Vector::Unit(2, 1);
  std::vector<FieldRow> rows;
  rows.reserve(t_list.size() * grid.n1 * grid.n2);
  for (double t : t_list) {
    const double sig = sched.kernel_params(t).sigma;
    const double sig2 = sig * sig;
    for (int j = 0; j < grid.n2; ++j) {
      for (int i = 0; i < grid.n1; ++i) {
        Vector x(2);
        x << coord(grid.x1_min, grid.x1_max, grid.n1, i), coord(grid.x2_min, grid.x2_max, grid.n2, j);
        const Vector s = model.score(x, t);
        const double d1 = model.jvp(x, t, e1, 0.0)(0);
        const double d2 = model.jvp(x, t, e2, 0.0)(1);
        rows.push_back({x(0), x(1), t, s(0), s(1), d1, d2, sig * s(0), sig * s(1), sig2 * d1,
                        sig2 * d2});
      }
    }
  }
  return rows;
}

double mean_log10_below(const Curve& curve, double t_below) {
  double acc = 0.0;
  int n = 0;
  for (const auto& p : curve)
    if (p.t < t_below) {
      acc += std::log10(p.value);
      ++n;
    }
  if (n == 0) throw RangeError("mean_log10_below: no grid points below threshold");
  return acc / n;
}

double mean_below(const Curve& curve, double t_below) {
  double acc = 0.0;
  int n = 0;
  for (const auto& p : curve)
    if (p.t < t_below) {
      acc += p.value;
      ++n;
    }
  if (n == 0) throw RangeError("mean_below: no grid points below threshold");
  return acc / n;
}

}  // namespace scorelab
