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

#include "scorelab/config.hpp"

#include <fstream>
#include <sstream>

#include "json_codec.hpp"

namespace scorelab {

using codec::Json;
using codec::optional;
using codec::reject_unknown;
using codec::required;

namespace {

ObjectiveSpec objective_from_json(const Json& j) {
  const std::string w = "objective";
  reject_unknown(j, w, {"penalty", "lambda", "probes", "fd_step_x", "grad_mode", "fp_norm"});
  ObjectiveSpec o;
  o.penalty = penalty_from_string(optional<std::string>(j, w, "penalty", "None"));
  o.lambda = o.penalty == Penalty::kNone ? optional<double>(j, w, "lambda", 0.0)
                                         : required<double>(j, w, "lambda");
  o.probes = optional<int>(j, w, "probes", o.probes);
  o.fd_step_x = optional<double>(j, w, "fd_step_x", o.fd_step_x);
  o.grad_mode = grad_mode_from_string(optional<std::string>(j, w, "grad_mode", "exact"));
  o.fp_norm = fp_norm_from_string(optional<std::string>(j, w, "fp_norm", "l2"));
  return o;
}

Json to_json(const ObjectiveSpec& o) {
  return Json{{"penalty", to_string(o.penalty)}, {"lambda", o.lambda},
              {"probes", o.probes},              {"fd_step_x", o.fd_step_x},
              {"grad_mode", to_string(o.grad_mode)}, {"fp_norm", to_string(o.fp_norm)}};
}

void train_from_json(const Json& j, TrainConfig& t) {
  const std::string w = "train";
  reject_unknown(j, w,
                 {"epochs", "batch_size", "lr", "adam_betas", "adam_eps", "dataset_size",
                  "checkpoint_every"});
  t.epochs = optional<int>(j, w, "epochs", t.epochs);
  t.batch_size = optional<int>(j, w, "batch_size", t.batch_size);
  t.lr = optional<double>(j, w, "lr", default_learning_rate(t.objective.penalty));
  const auto betas = optional<std::vector<double>>(j, w, "adam_betas", {t.adam_beta1, t.adam_beta2});
  if (betas.size() != 2) throw ConfigError("train.adam_betas", "expected two numbers");
  t.adam_beta1 = betas[0];
  t.adam_beta2 = betas[1];
  t.adam_eps = optional<double>(j, w, "adam_eps", t.adam_eps);
  t.dataset_size = optional<int>(j, w, "dataset_size", t.dataset_size);
  t.checkpoint_every = optional<int>(j, w, "checkpoint_every", t.checkpoint_every);
}

Json to_json(const TrainConfig& t) {
  return Json{{"epochs", t.epochs},
              {"batch_size", t.batch_size},
              {"lr", t.lr},
              {"adam_betas", {t.adam_beta1, t.adam_beta2}},
              {"adam_eps", t.adam_eps},
              {"dataset_size", t.dataset_size},
              {"checkpoint_every", t.checkpoint_every}};
}

ScoreSource score_source_from_string(const std::string& s) {
  if (s == "network") return ScoreSource::kNetwork;
  if (s == "oracle") return ScoreSource::kOracle;
  throw ConfigError("sampler.score_source", "expected \"network\" or \"oracle\", got \"" + s + "\"");
}

std::string to_string(ScoreSource s) { return s == ScoreSource::kNetwork ? "network" : "oracle"; }

SamplerConfig sampler_from_json(const Json& j) {
  const std::string w = "sampler";
  reject_unknown(j, w, {"n_steps", "t_start", "t_end", "n_samples", "score_source", "trajectory_times"});
  SamplerConfig s;
  s.n_steps = optional<int>(j, w, "n_steps", s.n_steps);
  s.t_start = optional<double>(j, w, "t_start", s.t_start);
  s.t_end = optional<double>(j, w, "t_end", s.t_end);
  s.n_samples = optional<int>(j, w, "n_samples", s.n_samples);
  s.score_source = score_source_from_string(optional<std::string>(j, w, "score_source", "network"));
  s.trajectory_times = optional<std::vector<double>>(j, w, "trajectory_times", {});
  return s;
}

Json to_json(const SamplerConfig& s) {
  return Json{{"n_steps", s.n_steps},     {"t_start", s.t_start},
              {"t_end", s.t_end},         {"n_samples", s.n_samples},
              {"score_source", to_string(s.score_source)},
              {"trajectory_times", s.trajectory_times}};
}

DiagnosticsConfig diagnostics_from_json(const Json& j) {
  const std::string w = "diagnostics";
  reject_unknown(j, w,
                 {"t_grid", "n_mc", "rfp_probes", "frob_probes", "fd_step_x", "field_times",
                  "field_grid"});
  DiagnosticsConfig d;
  if (j.contains("t_grid") && j.at("t_grid").is_object()) {
    const Json& g = j.at("t_grid");
    const std::string gw = "diagnostics.t_grid";
    reject_unknown(g, gw, {"min", "max", "points"});
    d.t_grid = log_grid(required<double>(g, gw, "min"), required<double>(g, gw, "max"),
                        required<int>(g, gw, "points"));
  } else {
    d.t_grid = optional<std::vector<double>>(j, w, "t_grid", {});
  }
  d.n_mc = optional<int>(j, w, "n_mc", d.n_mc);
  d.rfp_probes = optional<int>(j, w, "rfp_probes", d.rfp_probes);
  d.frob_probes = optional<int>(j, w, "frob_probes", d.frob_probes);
  d.fd_step_x = optional<double>(j, w, "fd_step_x", d.fd_step_x);
  d.field_times = optional<std::vector<double>>(j, w, "field_times", {});
  if (j.contains("field_grid")) {
    const Json& g = j.at("field_grid");
    const std::string gw = "diagnostics.field_grid";
    reject_unknown(g, gw, {"x1", "x2", "n1", "n2"});
    const auto x1 = optional<std::vector<double>>(g, gw, "x1", {d.field_grid.x1_min, d.field_grid.x1_max});
    const auto x2 = optional<std::vector<double>>(g, gw, "x2", {d.field_grid.x2_min, d.field_grid.x2_max});
    if (x1.size() != 2) throw ConfigError(gw + ".x1", "expected [min, max]");
    if (x2.size() != 2) throw ConfigError(gw + ".x2", "expected [min, max]");
    d.field_grid.x1_min = x1[0];
    d.field_grid.x1_max = x1[1];
    d.field_grid.x2_min = x2[0];
    d.field_grid.x2_max = x2[1];
    d.field_grid.n1 = optional<int>(g, gw, "n1", d.field_grid.n1);
    d.field_grid.n2 = optional<int>(g, gw, "n2", d.field_grid.n2);
  }
  return d;
}

Json to_json(const DiagnosticsConfig& d) {
  const auto& g = d.field_grid;
  return Json{{"t_grid", d.grid()},
              {"n_mc", d.n_mc},
              {"rfp_probes", d.rfp_probes},
              {"frob_probes", d.frob_probes},
              {"fd_step_x", d.fd_step_x},
              {"field_times", d.field_times},
              {"field_grid",
               {{"x1", {g.x1_min, g.x1_max}}, {"x2", {g.x2_min, g.x2_max}}, {"n1", g.n1}, {"n2", g.n2}}}};
}

SweepConfig sweep_from_json(const Json& j) {
  const std::string w = "sweep";
  reject_unknown(j, w, {"penalties", "lambdas", "seeds", "small_t"});
  SweepConfig s;
  for (const auto& name : required<std::vector<std::string>>(j, w, "penalties"))
    s.penalties.push_back(penalty_from_string(name));
  s.lambdas = optional<std::vector<double>>(j, w, "lambdas", {0.01, 0.1, 1.0});
  s.seeds = required<std::vector<std::uint64_t>>(j, w, "seeds");
  s.small_t = optional<double>(j, w, "small_t", s.small_t);
  return s;
}

Json to_json(const SweepConfig& s) {
  Json names = Json::array();
  for (Penalty p : s.penalties) names.push_back(to_string(p));
  return Json{{"penalties", names}, {"lambdas", s.lambdas}, {"seeds", s.seeds}, {"small_t", s.small_t}};
}

bool same_grid(const FieldGrid& a, const FieldGrid& b) {
  return a.x1_min == b.x1_min && a.x1_max == b.x1_max && a.x2_min == b.x2_min &&
         a.x2_max == b.x2_max && a.n1 == b.n1 && a.n2 == b.n2;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (name.empty() || name.find_first_of("/\\") != std::string::npos)
    throw ConfigError("name", "must be a nonempty string without path separators");
  train.validate();
  sampler.validate(SdeSchedule(train.schedule));
  const auto& d = diagnostics;
  if (d.n_mc < 1) throw ConfigError("diagnostics.n_mc", "must be at least 1");
  if (d.rfp_probes < 0) throw ConfigError("diagnostics.rfp_probes", "must be nonnegative");
  if (d.frob_probes < 1) throw ConfigError("diagnostics.frob_probes", "must be at least 1");
  if (!(d.fd_step_x > 0.0)) throw ConfigError("diagnostics.fd_step_x", "must be positive");
  for (double t : d.grid())
    if (!(t > 0.0 && t <= train.schedule.t_max))
      throw ConfigError("diagnostics.t_grid", "times must lie in (0, t_max]");
  if (!d.field_times.empty() && train.target.dim() != 2)
    throw ConfigError("diagnostics.field_times", "field dumps require a 2-D target");
  if (d.field_grid.n1 < 1 || d.field_grid.n2 < 1)
    throw ConfigError("diagnostics.field_grid", "grid sizes must be at least 1");
  if (metrics.k < 1) throw ConfigError("metrics.k", "must be at least 1");
  if (metrics.n_real <= metrics.k) throw ConfigError("metrics.n_real", "must exceed metrics.k");
  if (has_sweep) {
    if (sweep.penalties.empty()) throw ConfigError("sweep.penalties", "must not be empty");
    if (sweep.seeds.empty()) throw ConfigError("sweep.seeds", "must not be empty");
    for (double l : sweep.lambdas)
      if (!(l > 0.0)) throw ConfigError("sweep.lambdas", "must be positive");
    bool needs_lambda = false;
    for (Penalty p : sweep.penalties) needs_lambda |= p != Penalty::kNone;
    if (needs_lambda && sweep.lambdas.empty())
      throw ConfigError("sweep.lambdas", "required when a penalty other than None is swept");
    if (!(sweep.small_t > 0.0)) throw ConfigError("sweep.small_t", "must be positive");
  }
}

ExperimentConfig parse_config(const std::string& json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("<root>", "expected a JSON object");
  reject_unknown(j, "",
                 {"name", "seed", "schedule", "target", "net", "objective", "train", "sampler",
                  "diagnostics", "metrics", "sweep"});
  ExperimentConfig c;
  c.name = optional<std::string>(j, "", "name", c.name);
  c.seed = optional<std::uint64_t>(j, "", "seed", 0);
  c.train.seed = c.seed;
  c.train.schedule = codec::schedule_from_json(j.value("schedule", Json::object()), "schedule");
  c.train.target = codec::mixture_from_json(required<Json>(j, "", "target"), "target");
  Json net = j.value("net", Json::object());
  if (net.is_object() && !net.contains("data_dim")) net["data_dim"] = c.train.target.dim();
  c.train.net = codec::architecture_from_json(net, "net");
  c.train.net.schedule = c.train.schedule;
  c.train.objective = objective_from_json(j.value("objective", Json::object()));
  train_from_json(j.value("train", Json::object()), c.train);
  c.sampler = sampler_from_json(j.value("sampler", Json::object()));
  c.diagnostics = diagnostics_from_json(j.value("diagnostics", Json::object()));
  const Json m = j.value("metrics", Json::object());
  reject_unknown(m, "metrics", {"k", "n_real"});
  c.metrics.k = optional<int>(m, "metrics", "k", c.metrics.k);
  c.metrics.n_real = optional<int>(m, "metrics", "n_real", c.metrics.n_real);
  if (j.contains("sweep")) {
    c.has_sweep = true;
    c.sweep = sweep_from_json(j.at("sweep"));
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("<file>", "cannot open " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const ExperimentConfig& c) {
  Json j{{"name", c.name},
         {"seed", c.seed},
         {"schedule", codec::to_json(c.train.schedule)},
         {"target", codec::to_json(c.train.target)},
         {"net", codec::to_json(c.train.net)},
         {"objective", to_json(c.train.objective)},
         {"train", to_json(c.train)},
         {"sampler", to_json(c.sampler)},
         {"diagnostics", to_json(c.diagnostics)},
         {"metrics", {{"k", c.metrics.k}, {"n_real", c.metrics.n_real}}}};
  if (c.has_sweep) j["sweep"] = to_json(c.sweep);
  return j.dump(2) + "\n";
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  const TrainConfig &x = a.train, &y = b.train;
  const bool train_eq = x.epochs == y.epochs && x.batch_size == y.batch_size && x.lr == y.lr &&
                        x.adam_beta1 == y.adam_beta1 && x.adam_beta2 == y.adam_beta2 &&
                        x.adam_eps == y.adam_eps && x.dataset_size == y.dataset_size &&
                        x.seed == y.seed && x.checkpoint_every == y.checkpoint_every &&
                        x.objective == y.objective && x.schedule == y.schedule &&
                        x.target == y.target && x.net == y.net;
  const SamplerConfig &s = a.sampler, &r = b.sampler;
  const bool sampler_eq = s.n_steps == r.n_steps && s.t_start == r.t_start && s.t_end == r.t_end &&
                          s.n_samples == r.n_samples && s.score_source == r.score_source &&
                          s.trajectory_times == r.trajectory_times;
  const DiagnosticsConfig &d = a.diagnostics, &e = b.diagnostics;
  const bool diag_eq = d.grid() == e.grid() && d.n_mc == e.n_mc && d.rfp_probes == e.rfp_probes &&
                       d.frob_probes == e.frob_probes && d.fd_step_x == e.fd_step_x &&
                       d.field_times == e.field_times && same_grid(d.field_grid, e.field_grid);
  const bool sweep_eq =
      a.has_sweep == b.has_sweep &&
      (!a.has_sweep || (a.sweep.penalties == b.sweep.penalties && a.sweep.lambdas == b.sweep.lambdas &&
                        a.sweep.seeds == b.sweep.seeds && a.sweep.small_t == b.sweep.small_t));
  return a.name == b.name && a.seed == b.seed && train_eq && sampler_eq && diag_eq &&
         a.metrics.k == b.metrics.k && a.metrics.n_real == b.metrics.n_real && sweep_eq;
}

}  // namespace scorelab
