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

#include "scorelab/net.hpp"

#include <cmath>

#include <fmt/format.h>

#include "scorelab/errors.hpp"
#include "scorelab/rng.hpp"

namespace scorelab {

std::string to_string(Activation act) { return act == Activation::kTanh ? "tanh" : "silu"; }

Activation activation_from_string(const std::string& name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "silu") return Activation::kSilu;
  throw ConfigError("net.activation",
                    "expected \"tanh\" or \"silu\" (activations must be twice differentiable), "
                    "got \"" + name + "\"");
}

std::string to_string(OutputScale scale) {
  return scale == OutputScale::kNone ? "none" : "inv_sigma";
}

OutputScale output_scale_from_string(const std::string& name) {
  if (name == "none") return OutputScale::kNone;
  if (name == "inv_sigma") return OutputScale::kInvSigma;
  throw ConfigError("net.output_scale", "expected \"none\" or \"inv_sigma\", got \"" + name + "\"");
}

Vector TimeEmbedding::frequencies() const {
  const int n = (features + 1) / 2;
  Vector w(n);
  for (int j = 0; j < n; ++j) {
    const double frac = n == 1 ? 0.0 : static_cast<double>(j) / (n - 1);
    w(j) = freq_min * std::pow(freq_max / freq_min, frac);
  }
  return w;
}

void TimeEmbedding::evaluate(double t, double* value, double* d1, double* d2) const {
  const Vector w = frequencies();
  for (int f = 0; f < features; ++f) {
    const double om = w(f / 2);
    const double sn = std::sin(om * t);
    const double cs = std::cos(om * t);
    if (f % 2 == 0) {
      value[f] = sn;
      d1[f] = om * cs;
      d2[f] = -om * om * sn;
    } else {
      value[f] = cs;
      d1[f] = -om * sn;
      d2[f] = -om * om * cs;
    }
  }
}

std::vector<int> NetArchitecture::widths() const {
  std::vector<int> w;
  w.push_back(data_dim + embedding.features);
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(data_dim);
  return w;
}

std::size_t NetArchitecture::parameter_count() const {
  const std::vector<int> w = widths();
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < w.size(); ++l)
    n += static_cast<std::size_t>(w[l] + 1) * static_cast<std::size_t>(w[l + 1]);
  return n;
}

void NetArchitecture::validate() const {
  if (data_dim < 1) throw ConfigError("net.data_dim", "must be at least 1");
  if (embedding.features < 0) throw ConfigError("net.embedding.features", "must be >= 0");
  if (embedding.features > 0 &&
      !(embedding.freq_min > 0.0 && embedding.freq_max >= embedding.freq_min))
    throw ConfigError("net.embedding", "need 0 < freq_min <= freq_max");
  for (std::size_t i = 0; i < hidden.size(); ++i)
    if (hidden[i] < 1) throw ConfigError(fmt::format("net.hidden[{}]", i), "must be positive");
  if (output_scale == OutputScale::kInvSigma) SdeSchedule check(schedule);
}

bool NetArchitecture::operator==(const NetArchitecture& other) const {
  return data_dim == other.data_dim && hidden == other.hidden && activation == other.activation &&
         embedding == other.embedding && output_scale == other.output_scale &&
         (output_scale == OutputScale::kNone || schedule == other.schedule);
}

JetValues JetValues::zeros_like() const {
  JetValues z;
  z.value = Batch::Zero(value.rows(), value.cols());
  for (const Batch& b : first) z.first.push_back(Batch::Zero(b.rows(), b.cols()));
  for (const Batch& b : second) z.second.push_back(Batch::Zero(b.rows(), b.cols()));
  return z;
}

ScoreNet::ScoreNet(NetArchitecture arch, Vector theta)
    : arch_(std::move(arch)), widths_(arch_.widths()), theta_(std::move(theta)) {
  arch_.validate();
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    offsets_.push_back(off);
    off += static_cast<std::size_t>(widths_[l] + 1) * widths_[l + 1];
  }
  if (static_cast<std::size_t>(theta_.size()) != off)
    throw ShapeError(fmt::format("ScoreNet: theta has {} entries, architecture needs {}",
                                 theta_.size(), off));
}

ScoreNet ScoreNet::initialized(const NetArchitecture& arch, std::uint64_t seed) {
  arch.validate();
  const std::vector<int> w = arch.widths();
  Vector theta = Vector::Zero(static_cast<Eigen::Index>(arch.parameter_count()));
  Engine engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Index off = 0;
  for (std::size_t l = 0; l + 1 < w.size(); ++l) {
    const double scale = std::sqrt(2.0 / w[l]);
    const Eigen::Index nw = static_cast<Eigen::Index>(w[l]) * w[l + 1];
    for (Eigen::Index i = 0; i < nw; ++i) theta(off + i) = scale * normal(engine);
    off += nw + w[l + 1];  // biases stay zero
  }
  return ScoreNet(arch, std::move(theta));
}

void ScoreNet::set_parameters(const Vector& theta) {
  if (theta.size() != theta_.size()) throw ShapeError("set_parameters: size mismatch");
  theta_ = theta;
}

ScoreNet::LayerView ScoreNet::layer(std::size_t l) const {
  const int in = widths_[l], out = widths_[l + 1];
  const double* p = theta_.data() + offsets_[l];
  return {Eigen::Map<const Matrix>(p, out, in), Eigen::Map<const Vector>(p + out * in, out)};
}

namespace {

// phi and its first three derivatives, elementwise over the primal block.
struct ActDerivs {
  Eigen::ArrayXXd v, d1, d2, d3;
};

ActDerivs activation_derivs(Activation act, const Eigen::Ref<const Matrix>& a, bool third) {
  ActDerivs r;
  const Eigen::ArrayXXd x = a.array();
  if (act == Activation::kTanh) {
    r.v = x.tanh();
    r.d1 = 1.0 - r.v.square();
    r.d2 = -2.0 * r.v * r.d1;
    if (third) r.d3 = -2.0 * (r.d1.square() + r.v * r.d2);
  } else {
    const Eigen::ArrayXXd s = 1.0 / (1.0 + (-x).exp());
    const Eigen::ArrayXXd s1 = s * (1.0 - s);
    const Eigen::ArrayXXd s2 = s1 * (1.0 - 2.0 * s);
    r.v = x * s;
    r.d1 = s + x * s1;
    r.d2 = 2.0 * s1 + x * s2;
    if (third) {
      const Eigen::ArrayXXd s3 = s2 * (1.0 - 2.0 * s) - 2.0 * s1.square();
      r.d3 = 3.0 * s2 + x * s3;
    }
  }
  return r;
}

}  // namespace

JetValues ScoreNet::forward_jet(const JetInput& in, JetCache* cache) const {
  const int d = arch_.data_dim;
  const int e = arch_.embedding.features;
  const int batch = static_cast<int>(in.x.cols());
  const int nd = static_cast<int>(in.directions.size());
  const int np = static_cast<int>(in.pairs.size());
  const int nb = 1 + nd + np;
  if (in.x.rows() != d)
    throw ShapeError(fmt::format("forward_jet: x has {} rows, network expects {}", in.x.rows(), d));
  if (in.t.size() != batch) throw ShapeError("forward_jet: t length differs from batch size");

  std::vector<RowVector> vt(nd);
  for (int k = 0; k < nd; ++k) {
    const JetDirection& dir = in.directions[k];
    if (dir.x.size() != 0 && (dir.x.rows() != d || dir.x.cols() != batch))
      throw ShapeError(fmt::format("forward_jet: direction {} x-tangent has wrong shape", k));
    if (dir.t.size() != 0 && dir.t.size() != batch)
      throw ShapeError(fmt::format("forward_jet: direction {} t-tangent has wrong length", k));
    vt[k] = dir.t.size() ? dir.t : RowVector::Zero(batch);
  }
  for (const auto& [a, b] : in.pairs)
    if (a < 0 || a >= nd || b < 0 || b >= nd)
      throw ShapeError("forward_jet: pair index out of range");

  auto blk = [batch](auto& m, int j) { return m.middleCols(static_cast<Eigen::Index>(j) * batch, batch); };

  Matrix h = Matrix::Zero(d + e, static_cast<Eigen::Index>(batch) * nb);
  blk(h, 0).topRows(d) = in.x;
  for (int k = 0; k < nd; ++k)
    if (in.directions[k].x.size()) blk(h, 1 + k).topRows(d) = in.directions[k].x;
  if (e > 0) {
    Vector ev(e), e1(e), e2(e);
    for (int b = 0; b < batch; ++b) {
      arch_.embedding.evaluate(in.t(b), ev.data(), e1.data(), e2.data());
      h.block(d, b, e, 1) = ev;
      for (int k = 0; k < nd; ++k)
        if (vt[k](b) != 0.0) h.block(d, (1 + k) * batch + b, e, 1) = vt[k](b) * e1;
      for (int p = 0; p < np; ++p) {
        const double w = vt[in.pairs[p].first](b) * vt[in.pairs[p].second](b);
        if (w != 0.0) h.block(d, (1 + nd + p) * batch + b, e, 1) = w * e2;
      }
    }
  }

  if (cache) {
    cache->batch = batch;
    cache->blocks = nb;
    cache->pairs = in.pairs;
    cache->inputs.clear();
    cache->preacts.clear();
    cache->t = in.t;
    cache->dir_t = vt;
  }

  const std::size_t layers = widths_.size() - 1;
  Matrix a;
  for (std::size_t l = 0; l < layers; ++l) {
    const LayerView lv = layer(l);
    a.noalias() = lv.w * h;
    blk(a, 0).colwise() += lv.b;
    if (cache) {
      cache->inputs.push_back(h);
      cache->preacts.push_back(a);
    }
    if (l + 1 == layers) break;
    const ActDerivs ad = activation_derivs(arch_.activation, blk(a, 0), false);
    Matrix next(a.rows(), a.cols());
    blk(next, 0) = ad.v.matrix();
    for (int k = 0; k < nd; ++k)
      blk(next, 1 + k) = (ad.d1 * blk(a, 1 + k).array()).matrix();
    for (int p = 0; p < np; ++p) {
      const auto [d1, d2] = in.pairs[p];
      blk(next, 1 + nd + p) = (ad.d2 * blk(a, 1 + d1).array() * blk(a, 1 + d2).array() +
                               ad.d1 * blk(a, 1 + nd + p).array())
                                  .matrix();
    }
    h.swap(next);
  }

  JetValues out;
  if (arch_.output_scale == OutputScale::kNone) {
    out.value = blk(a, 0);
    for (int k = 0; k < nd; ++k) out.first.push_back(blk(a, 1 + k));
    for (int p = 0; p < np; ++p) out.second.push_back(blk(a, 1 + nd + p));
    if (cache) cache->raw_output = std::move(a);
    return out;
  }

  // s = c(t) m with c = -1/sigma(t).
  const SdeSchedule sched(arch_.schedule);
  RowVector c(batch), c1(batch), c2(batch);
  for (int b = 0; b < batch; ++b) {
    const SigmaJet sj = sched.sigma_jet(in.t(b));
    const double s = sj.value;
    c(b) = -1.0 / s;
    c1(b) = sj.d1 / (s * s);
    c2(b) = sj.d2 / (s * s) - 2.0 * sj.d1 * sj.d1 / (s * s * s);
  }
  auto scaled = [](const auto& m, const RowVector& w) -> Batch {
    return (m.array().rowwise() * w.array()).matrix();
  };
  out.value = scaled(blk(a, 0), c);
  for (int k = 0; k < nd; ++k)
    out.first.push_back(scaled(blk(a, 1 + k), c) +
                        scaled(blk(a, 0), c1.cwiseProduct(vt[k])));
  for (int p = 0; p < np; ++p) {
    const auto [d1, d2] = in.pairs[p];
    out.second.push_back(scaled(blk(a, 1 + nd + p), c) +
                         scaled(blk(a, 1 + d2), c1.cwiseProduct(vt[d1])) +
                         scaled(blk(a, 1 + d1), c1.cwiseProduct(vt[d2])) +
                         scaled(blk(a, 0), c2.cwiseProduct(vt[d1]).cwiseProduct(vt[d2])));
  }
  if (cache) {
    cache->raw_output = std::move(a);
    cache->scale.assign(c.data(), c.data() + batch);
    cache->scale_d1.assign(c1.data(), c1.data() + batch);
    cache->scale_d2.assign(c2.data(), c2.data() + batch);
  }
  return out;
}

void ScoreNet::backward_jet(const JetCache& cache, const JetValues& adjoint, Vector* grad_theta,
                            Batch* grad_x) const {
  const int batch = cache.batch;
  const int nb = cache.blocks;
  const int np = static_cast<int>(cache.pairs.size());
  const int nd = nb - 1 - np;
  const int d = arch_.data_dim;
  if (adjoint.value.rows() != d || adjoint.value.cols() != batch ||
      static_cast<int>(adjoint.first.size()) != nd ||
      static_cast<int>(adjoint.second.size()) != np)
    throw ShapeError("backward_jet: adjoint shapes do not match the cached forward pass");
  if (grad_theta && grad_theta->size() != theta_.size())
    throw ShapeError("backward_jet: gradient buffer has wrong size");

  auto blk = [batch](auto& m, int j) { return m.middleCols(static_cast<Eigen::Index>(j) * batch, batch); };

  Matrix abar(d, static_cast<Eigen::Index>(batch) * nb);
  if (arch_.output_scale == OutputScale::kNone) {
    blk(abar, 0) = adjoint.value;
    for (int k = 0; k < nd; ++k) blk(abar, 1 + k) = adjoint.first[k];
    for (int p = 0; p < np; ++p) blk(abar, 1 + nd + p) = adjoint.second[p];
  } else {
    const RowVector c = Eigen::Map<const RowVector>(cache.scale.data(), batch);
    const RowVector c1 = Eigen::Map<const RowVector>(cache.scale_d1.data(), batch);
    const RowVector c2 = Eigen::Map<const RowVector>(cache.scale_d2.data(), batch);
    auto scaled = [](const Batch& m, const RowVector& w) -> Batch {
      return (m.array().rowwise() * w.array()).matrix();
    };
    const std::vector<RowVector>& vt = cache.dir_t;
    Batch m0 = scaled(adjoint.value, c);
    for (int k = 0; k < nd; ++k) {
      m0 += scaled(adjoint.first[k], c1.cwiseProduct(vt[k]));
      blk(abar, 1 + k) = scaled(adjoint.first[k], c);
    }
    for (int p = 0; p < np; ++p) {
      const auto [d1, d2] = cache.pairs[p];
      const Batch& sp = adjoint.second[p];
      m0 += scaled(sp, c2.cwiseProduct(vt[d1]).cwiseProduct(vt[d2]));
      blk(abar, 1 + d1) += scaled(sp, c1.cwiseProduct(vt[d2]));
      blk(abar, 1 + d2) += scaled(sp, c1.cwiseProduct(vt[d1]));
      blk(abar, 1 + nd + p) = scaled(sp, c);
    }
    blk(abar, 0) = m0;
  }

  const std::size_t layers = widths_.size() - 1;
  Matrix hbar;
  for (std::size_t li = layers; li-- > 0;) {
    const LayerView lv = layer(li);
    if (grad_theta) {
      const int in = widths_[li], out = widths_[li + 1];
      double* g = grad_theta->data() + offsets_[li];
      Eigen::Map<Matrix> gw(g, out, in);
      Eigen::Map<Vector> gb(g + static_cast<std::size_t>(out) * in, out);
      gw.noalias() += abar * cache.inputs[li].transpose();
      gb += blk(abar, 0).rowwise().sum();
    }
    if (li == 0 && !grad_x) break;
    hbar.noalias() = lv.w.transpose() * abar;
    if (li == 0) break;

    // Reverse through the activation jet of layer li - 1.
    const Matrix& a = cache.preacts[li - 1];
    const ActDerivs ad = activation_derivs(arch_.activation, blk(a, 0), np > 0);
    Matrix next(a.rows(), a.cols());
    Eigen::ArrayXXd a0 = ad.d1 * blk(hbar, 0).array();
    for (int k = 0; k < nd; ++k) {
      a0 += ad.d2 * blk(a, 1 + k).array() * blk(hbar, 1 + k).array();
      blk(next, 1 + k) = (ad.d1 * blk(hbar, 1 + k).array()).matrix();
    }
    for (int p = 0; p < np; ++p) {
      const auto [d1, d2] = cache.pairs[p];
      const Eigen::ArrayXXd yp = blk(hbar, 1 + nd + p).array();
      a0 += (ad.d3 * blk(a, 1 + d1).array() * blk(a, 1 + d2).array() +
             ad.d2 * blk(a, 1 + nd + p).array()) *
            yp;
      blk(next, 1 + d1) += (ad.d2 * blk(a, 1 + d2).array() * yp).matrix();
      blk(next, 1 + d2) += (ad.d2 * blk(a, 1 + d1).array() * yp).matrix();
      blk(next, 1 + nd + p) = (ad.d1 * yp).matrix();
    }
    blk(next, 0) = a0.matrix();
    abar.swap(next);
  }
  if (grad_x) *grad_x = blk(hbar, 0).topRows(d);
}

Vector ScoreNet::forward(const Vector& x, double t) const {
  return forward_batch(Batch(x), RowVector::Constant(1, t)).col(0);
}

Batch ScoreNet::forward_batch(const Batch& x, const RowVector& t) const {
  JetInput in{x, t, {}, {}};
  return forward_jet(in).value;
}

Batch ScoreNet::forward_batch(const Batch& x, double t) const {
  return forward_batch(x, RowVector::Constant(x.cols(), t));
}

Vector ScoreNet::jvp(const Vector& x, double t, const Vector& vx, double vt) const {
  if (vx.size() != x.size()) throw ShapeError("jvp: tangent dimension mismatch");
  JetInput in{Batch(x), RowVector::Constant(1, t), {{Batch(vx), RowVector::Constant(1, vt)}}, {}};
  return forward_jet(in).first[0].col(0);
}

Vector ScoreNet::vjp(const Vector& x, double t, const Vector& u) const {
  if (u.size() != dim()) throw ShapeError("vjp: cotangent dimension mismatch");
  JetInput in{Batch(x), RowVector::Constant(1, t), {}, {}};
  JetCache cache;
  JetValues out = forward_jet(in, &cache);
  JetValues adj = out.zeros_like();
  adj.value.col(0) = u;
  Batch gx;
  backward_jet(cache, adj, nullptr, &gx);
  return gx.col(0);
}

Vector grad_params(const ScoreNet& net, const JetInput& input, const JetLoss& loss,
                   double* loss_out) {
  JetCache cache;
  const JetValues out = net.forward_jet(input, &cache);
  const LossAndAdjoint la = loss(out);
  Vector grad = Vector::Zero(net.parameters().size());
  net.backward_jet(cache, la.adjoint, &grad);
  if (loss_out) *loss_out = la.loss;
  return grad;
}

}  // namespace scorelab
