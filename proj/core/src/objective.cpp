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

#include "scorelab/objective.hpp"

#include <cmath>
#include <iostream>

#include <fmt/format.h>

#include "scorelab/errors.hpp"

namespace scorelab {

std::string to_string(Penalty p) {
  switch (p) {
    case Penalty::kNone: return "None";
    case Penalty::kFP: return "FP";
    case Penalty::kSN: return "SN";
    case Penalty::kJAC: return "JAC";
    case Penalty::kDIV: return "DIV";
  }
  return "?";
}

Penalty penalty_from_string(const std::string& name) {
  if (name == "None") return Penalty::kNone;
  if (name == "FP") return Penalty::kFP;
  if (name == "SN") return Penalty::kSN;
  if (name == "JAC") return Penalty::kJAC;
  if (name == "DIV") return Penalty::kDIV;
  throw ConfigError("objective.penalty",
                    "expected one of None, FP, SN, JAC, DIV; got \"" + name + "\"");
}

std::string to_string(GradMode m) { return m == GradMode::kExact ? "exact" : "finite_difference"; }

GradMode grad_mode_from_string(const std::string& name) {
  if (name == "exact") return GradMode::kExact;
  if (name == "finite_difference") return GradMode::kFiniteDifference;
  throw ConfigError("objective.grad_mode",
                    "expected \"exact\" or \"finite_difference\", got \"" + name + "\"");
}

std::string to_string(FpNorm n) { return n == FpNorm::kL2 ? "l2" : "squared_l2"; }

FpNorm fp_norm_from_string(const std::string& name) {
  if (name == "l2") return FpNorm::kL2;
  if (name == "squared_l2") return FpNorm::kSquaredL2;
  throw ConfigError("objective.fp_norm", "expected \"l2\" or \"squared_l2\", got \"" + name + "\"");
}

void ObjectiveSpec::validate() const {
  if (!(lambda >= 0.0)) throw ConfigError("objective.lambda", "must be nonnegative");
  if (penalty == Penalty::kNone && lambda != 0.0)
    throw ConfigError("objective.lambda", "must be 0 when penalty is None");
  if (probes < 1) throw ConfigError("objective.probes", "must be at least 1");
  if (!(fd_step_x > 0.0)) throw ConfigError("objective.fd_step_x", "must be positive");
}

std::vector<Vector> BatchSample::probes_of(int b) const {
  std::vector<Vector> out;
  out.reserve(probes.size());
  for (const Batch& p : probes) out.push_back(p.col(b));
  return out;
}

BatchSample make_batch(const SdeSchedule& sched, Batch x0, RowVector t, Batch z,
                       std::vector<Batch> probes) {
  if (x0.rows() != z.rows() || x0.cols() != z.cols() || t.size() != x0.cols())
    throw ShapeError("make_batch: x0, t and z disagree in shape");
  for (const Batch& p : probes)
    if (p.rows() != x0.rows() || p.cols() != x0.cols())
      throw ShapeError("make_batch: probe block has wrong shape");
  BatchSample b;
  b.xt.resize(x0.rows(), x0.cols());
  b.sigma.resize(x0.cols());
  for (Eigen::Index i = 0; i < x0.cols(); ++i) {
    const KernelParams k = sched.kernel_params(t(i));
    b.xt.col(i) = k.alpha * x0.col(i) + k.sigma * z.col(i);
    b.sigma(i) = k.sigma;
  }
  b.x0 = std::move(x0);
  b.t = std::move(t);
  b.z = std::move(z);
  b.probes = std::move(probes);
  return b;
}

BatchSample draw_batch(const GaussianMixture& target, const SdeSchedule& sched, int batch_size,
                       int probes, Engine& engine) {
  Batch x0 = sample(target, batch_size, engine);
  std::uniform_real_distribution<double> uniform(sched.t_min(), sched.t_max());
  RowVector t(batch_size);
  for (int i = 0; i < batch_size; ++i) t(i) = uniform(engine);
  Batch z = normal_matrix(engine, target.dim(), batch_size);
  std::vector<Batch> pr;
  for (int k = 0; k < probes; ++k) pr.push_back(normal_matrix(engine, target.dim(), batch_size));
  return make_batch(sched, std::move(x0), std::move(t), std::move(z), std::move(pr));
}

double loss_dsm(const ScoreModel& model, const BatchSample& batch) {
  if (batch.size() < 1) throw ShapeError("loss_dsm: empty batch");
  double sum = 0.0;
  for (int b = 0; b < batch.size(); ++b) {
    const Vector s = model.score(batch.xt.col(b), batch.t(b));
    sum += (batch.sigma(b) * s + batch.z.col(b)).squaredNorm();
  }
  return sum / batch.size();
}

double hutchinson_div(const ScoreModel& model, const Vector& x, double t,
                      std::span<const Vector> probes) {
  if (probes.empty()) throw ShapeError("hutchinson_div: need at least one probe");
  double sum = 0.0;
  for (const Vector& v : probes) sum += v.dot(model.jvp(x, t, v, 0.0));
  return sum / static_cast<double>(probes.size());
}

double hutchinson_frob(const ScoreModel& model, const Vector& x, double t,
                       std::span<const Vector> probes) {
  if (probes.empty()) throw ShapeError("hutchinson_frob: need at least one probe");
  double sum = 0.0;
  for (const Vector& v : probes) sum += model.vjp(x, t, v).squaredNorm();
  return sum / static_cast<double>(probes.size());
}

double operator_L(const ScoreModel& model, const SdeSchedule& sched, const Vector& x, double t,
                  std::span<const Vector> probes) {
  const Vector s = model.score(x, t);
  const double div = probes.empty() ? model.jacobian(x, t).trace()
                                    : hutchinson_div(model, x, t, probes);
  const double g2 = sched.diffusion_squared(t);
  const double a = sched.drift_coefficient(t);
  return 0.5 * g2 * div + 0.5 * g2 * s.squaredNorm() - a * x.dot(s) -
         sched.drift_divergence(model.dim(), t);
}

namespace {

// grad_x L[s] from exact local derivatives. With f = a x:
//   grad <f, s> = a s + a J^T x,  grad |s|^2 / 2 = J^T s.
Vector grad_operator_L(const FpTerms& ft, const SdeSchedule& sched, const Vector& x, double t) {
  const double g2 = sched.diffusion_squared(t);
  const double a = sched.drift_coefficient(t);
  return 0.5 * g2 * ft.divergence_gradient + g2 * (ft.jacobian.transpose() * ft.value) -
         a * ft.value - a * (ft.jacobian.transpose() * x);
}

}  // namespace

Vector fp_error(const ScoreModel& model, const SdeSchedule& sched, const Vector& x, double t,
                std::span<const Vector> probes, GradMode mode, double fd_step_x) {
  const int d = model.dim();
  if (x.size() != d) throw ShapeError("fp_error: x has wrong dimension");
  if (mode == GradMode::kExact) {
    const FpTerms ft = model.fp_terms(x, t, probes);
    return ft.time_derivative - grad_operator_L(ft, sched, x, t);
  }
  if (d > 32) {
    static bool warned = false;
    if (!warned) {
      std::cerr << "warning: finite-difference grad_x L costs " << 2 * d
                << " operator evaluations per point\n";
      warned = true;
    }
  }
  Vector grad(d);
  Vector xp = x, xm = x;
  for (int i = 0; i < d; ++i) {
    xp(i) = x(i) + fd_step_x;
    xm(i) = x(i) - fd_step_x;
    grad(i) = (operator_L(model, sched, xp, t, probes) - operator_L(model, sched, xm, t, probes)) /
              (2.0 * fd_step_x);
    xp(i) = xm(i) = x(i);
  }
  return model.time_derivative(x, t) - grad;
}

McEstimate residual_rfp(const ScoreModel& model, const GaussianMixture& target,
                        const SdeSchedule& sched, double t, int n_mc, std::uint64_t seed,
                        int probes, GradMode mode, double fd_step_x) {
  if (n_mc < 1) throw RangeError("residual_rfp: n_mc must be at least 1");
  const int d = model.dim();
  const KernelParams k = sched.kernel_params(t);
  Engine engine(seed);
  double sum = 0.0, sum_sq = 0.0;
  std::vector<Vector> pr(static_cast<std::size_t>(std::max(probes, 0)));
  for (int i = 0; i < n_mc; ++i) {
    const Vector x0 = sample(target, 1, engine).col(0);
    const Vector z = normal_vector(engine, d);
    for (Vector& v : pr) v = normal_vector(engine, d);
    const Vector x = k.alpha * x0 + k.sigma * z;
    const double r = fp_error(model, sched, x, t, pr, mode, fd_step_x).squaredNorm() / d;
    sum += r;
    sum_sq += r * r;
  }
  McEstimate est;
  est.n = n_mc;
  est.mean = sum / n_mc;
  if (n_mc > 1) {
    const double var = std::max(0.0, (sum_sq - n_mc * est.mean * est.mean) / (n_mc - 1));
    est.std_error = std::sqrt(var / n_mc);
  }
  return est;
}

double penalty(const ScoreModel& model, const SdeSchedule& sched, const BatchSample& batch,
               const ObjectiveSpec& spec) {
  if (spec.penalty == Penalty::kNone) return 0.0;
  const int d = batch.dim();
  double sum = 0.0;
  for (int b = 0; b < batch.size(); ++b) {
    const Vector x = batch.xt.col(b);
    const double t = batch.t(b);
    const std::vector<Vector> pr = batch.probes_of(b);
    switch (spec.penalty) {
      case Penalty::kSN:
        sum += model.score(x, t).squaredNorm();
        break;
      case Penalty::kJAC:
        sum += pr.empty() ? model.jacobian(x, t).squaredNorm() : hutchinson_frob(model, x, t, pr);
        break;
      case Penalty::kDIV: {
        const double div = pr.empty() ? model.jacobian(x, t).trace() : hutchinson_div(model, x, t, pr);
        sum += div * div;
        break;
      }
      case Penalty::kFP: {
        const Vector eps = fp_error(model, sched, x, t, pr, spec.grad_mode, spec.fd_step_x);
        sum += spec.fp_norm == FpNorm::kL2 ? eps.norm() : eps.squaredNorm();
        break;
      }
      case Penalty::kNone:
        break;
    }
  }
  return sum / (static_cast<double>(d) * batch.size());
}

double total_loss(const ScoreModel& model, const SdeSchedule& sched, const BatchSample& batch,
                  const ObjectiveSpec& spec) {
  const double dsm = loss_dsm(model, batch);
  if (spec.penalty == Penalty::kNone) return dsm;
  return dsm + spec.lambda * penalty(model, sched, batch, spec);
}

LossParts loss_and_gradient(const ScoreNet& net, const SdeSchedule& sched,
                            const BatchSample& batch, const ObjectiveSpec& spec, Vector* grad) {
  const int d = batch.dim();
  const int nb = batch.size();
  const int k = static_cast<int>(batch.probes.size());
  if (nb < 1) throw ShapeError("loss_and_gradient: empty batch");
  if (d != net.dim()) throw ShapeError("loss_and_gradient: batch dimension differs from network");
  const bool needs_probes = spec.penalty == Penalty::kFP || spec.penalty == Penalty::kJAC ||
                            spec.penalty == Penalty::kDIV;
  if (needs_probes && k < 1) throw ShapeError("loss_and_gradient: penalty needs probe vectors");

  // Direction layout per penalty:
  //   DIV: [v_1..v_K]
  //   JAC: [e_1..e_D]
  //   FP:  [time, e_1..e_D, v_1..v_K] with pairs (v_q, e_i) at q * D + i
  JetInput in{batch.xt, batch.t, {}, {}};
  int dir_time = -1, dir_unit = -1, dir_probe = -1;
  auto unit_block = [&](int i) {
    Batch e = Batch::Zero(d, nb);
    e.row(i).setOnes();
    return e;
  };
  if (spec.penalty == Penalty::kFP) {
    dir_time = 0;
    in.directions.push_back({{}, RowVector::Ones(nb)});
  }
  if (spec.penalty == Penalty::kFP || spec.penalty == Penalty::kJAC) {
    dir_unit = static_cast<int>(in.directions.size());
    for (int i = 0; i < d; ++i) in.directions.push_back({unit_block(i), {}});
  }
  if (spec.penalty == Penalty::kFP || spec.penalty == Penalty::kDIV) {
    dir_probe = static_cast<int>(in.directions.size());
    for (int q = 0; q < k; ++q) in.directions.push_back({batch.probes[q], {}});
  }
  if (spec.penalty == Penalty::kFP)
    for (int q = 0; q < k; ++q)
      for (int i = 0; i < d; ++i) in.pairs.emplace_back(dir_probe + q, dir_unit + i);

  JetCache cache;
  const JetValues out = net.forward_jet(in, grad ? &cache : nullptr);
  JetValues adj;
  if (grad) adj = out.zeros_like();

  LossParts parts;
  // DSM
  for (int b = 0; b < nb; ++b) {
    const Vector r = batch.sigma(b) * out.value.col(b) + batch.z.col(b);
    parts.dsm += r.squaredNorm();
    if (grad) adj.value.col(b) += (2.0 * batch.sigma(b) / nb) * r;
  }
  parts.dsm /= nb;

  const double norm = 1.0 / (static_cast<double>(d) * nb);
  const double lam = spec.lambda;
  double pen = 0.0;
  switch (spec.penalty) {
    case Penalty::kNone:
      break;
    case Penalty::kSN:
      for (int b = 0; b < nb; ++b) {
        pen += out.value.col(b).squaredNorm();
        if (grad) adj.value.col(b) += (2.0 * lam * norm) * out.value.col(b);
      }
      break;
    case Penalty::kDIV:
      for (int b = 0; b < nb; ++b) {
        double est = 0.0;
        for (int q = 0; q < k; ++q) est += batch.probes[q].col(b).dot(out.first[dir_probe + q].col(b));
        est /= k;
        pen += est * est;
        if (grad)
          for (int q = 0; q < k; ++q)
            adj.first[dir_probe + q].col(b) += (2.0 * lam * norm * est / k) * batch.probes[q].col(b);
      }
      break;
    case Penalty::kJAC:
      for (int b = 0; b < nb; ++b) {
        for (int q = 0; q < k; ++q) {
          const Vector v = batch.probes[q].col(b);
          for (int i = 0; i < d; ++i) {
            const double c = v.dot(out.first[dir_unit + i].col(b));
            pen += c * c / k;
            if (grad) adj.first[dir_unit + i].col(b) += (2.0 * lam * norm * c / k) * v;
          }
        }
      }
      break;
    case Penalty::kFP:
      for (int b = 0; b < nb; ++b) {
        const double t = batch.t(b);
        const double g2 = sched.diffusion_squared(t);
        const double a = sched.drift_coefficient(t);
        const Vector x = batch.xt.col(b);
        const Vector s = out.value.col(b);
        Vector grad_l(d);
        for (int i = 0; i < d; ++i) {
          double dg = 0.0;
          for (int q = 0; q < k; ++q)
            dg += batch.probes[q].col(b).dot(out.second[q * d + i].col(b));
          dg /= k;
          const Vector si = out.first[dir_unit + i].col(b);
          grad_l(i) = 0.5 * g2 * dg + g2 * s.dot(si) - a * s(i) - a * x.dot(si);
        }
        const Vector eps = out.first[dir_time].col(b) - grad_l;
        const double en = eps.norm();
        pen += spec.fp_norm == FpNorm::kL2 ? en : en * en;
        if (!grad) continue;
        Vector eps_bar;
        if (spec.fp_norm == FpNorm::kL2)
          eps_bar = en > 0.0 ? Vector((lam * norm / en) * eps) : Vector::Zero(d);
        else
          eps_bar = (2.0 * lam * norm) * eps;
        adj.first[dir_time].col(b) += eps_bar;
        const Vector gl_bar = -eps_bar;
        for (int i = 0; i < d; ++i) {
          for (int q = 0; q < k; ++q)
            adj.second[q * d + i].col(b) += (0.5 * g2 * gl_bar(i) / k) * batch.probes[q].col(b);
          adj.first[dir_unit + i].col(b) += gl_bar(i) * (g2 * s - a * x);
          adj.value.col(b) += (gl_bar(i) * g2) * out.first[dir_unit + i].col(b);
        }
        adj.value.col(b) -= a * gl_bar;
      }
      break;
  }
  parts.penalty = pen * norm;
  parts.total = spec.penalty == Penalty::kNone ? parts.dsm : parts.dsm + lam * parts.penalty;
  if (grad) net.backward_jet(cache, adj, grad);
  return parts;
}

}  // namespace scorelab
