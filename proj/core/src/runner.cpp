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

#include "scorelab/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>

#include <fmt/format.h>

#include "json_codec.hpp"
#include "scorelab/checkpoint.hpp"
#include "scorelab/csv.hpp"
#include "scorelab/diagnostics.hpp"
#include "scorelab/rng.hpp"

namespace scorelab {

using codec::Json;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open " + path.string() + " for writing");
  f << text;
}

void write_record(const RunRecord& r) {
  Json seeds = Json::object();
  for (const auto& [purpose, s] : r.seed_ledger) seeds[purpose] = s;
  Json j{{"run_id", r.run_id}, {"seed", r.seed},     {"streams", seeds},
         {"artifacts", r.artifacts}, {"failed", r.failed}};
  if (r.failed) j["failure"] = r.failure;
  write_text(r.dir / "record.json", j.dump(2) + "\n");
}

RunRecord open_record(const ExperimentConfig& cfg, const fs::path& dir) {
  fs::create_directories(dir);
  RunRecord r;
  r.run_id = cfg.name;
  r.dir = dir;
  r.seed = cfg.seed;
  return r;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string ckpt_name(int epoch) { return fmt::format("checkpoints/epoch_{}.ckpt", epoch); }

struct Model {
  std::optional<ScoreNet> net;
  std::unique_ptr<ScoreModel> model;
};

Model load_model(const ExperimentConfig& cfg, const std::optional<fs::path>& checkpoint) {
  Model m;
  if (checkpoint) {
    m.net = load_checkpoint(*checkpoint, cfg.train.net).net;
    m.model = std::make_unique<NetScoreModel>(*m.net);
  } else {
    m.model = std::make_unique<MixtureScoreModel>(cfg.train.target, SdeSchedule(cfg.train.schedule));
  }
  return m;
}

Batch real_samples(const ExperimentConfig& cfg) {
  return sample(cfg.train.target, cfg.metrics.n_real, derive_seed(cfg.seed, "metrics.real"));
}

Json report_json(const MetricReport& m) {
  return Json{{"frechet", m.frechet},
              {"frechet_regularized", m.frechet_regularized},
              {"density", m.density},
              {"density_scale", "raw"},
              {"coverage", m.coverage},
              {"entropy", m.entropy},
              {"entropy_units", "nats"},
              {"k_neighbors", m.k_neighbors},
              {"n_real", m.n_real},
              {"n_fake", m.n_fake}};
}

}  // namespace

fs::path output_root() {
  const char* env = std::getenv("SCORELAB_OUT");
  return env && *env ? fs::path(env) : fs::path("runs");
}

RunRecord run_train(const ExperimentConfig& cfg, const fs::path& dir) {
  cfg.validate();
  RunRecord r = open_record(cfg, dir);
  r.seed_ledger = {{"init", derive_seed(cfg.seed, "init")}, {"train", derive_seed(cfg.seed, "train")}};
  fs::create_directories(dir / "checkpoints");
  write_text(dir / "config.json", dump_config(cfg));
  r.artifacts.push_back("config.json");

  const std::uint64_t init_seed = derive_seed(cfg.seed, "init");
  TrainHooks hooks;
  hooks.checkpoint = [&](int epoch, const ScoreNet& net) {
    save_checkpoint(dir / ckpt_name(epoch), Checkpoint{net, init_seed, epoch});
    r.artifacts.push_back(ckpt_name(epoch));
  };
  hooks.epoch_done = [&](const EpochRecord& e) { r.epoch_seconds.push_back(e.seconds); };

  std::vector<EpochRecord> epochs;
  try {
    epochs = train(cfg.train, hooks).epochs;
  } catch (const TrainingDiverged& e) {
    epochs = e.history();
    r.failed = true;
    r.failure = e.what();
  }
  losses_table(epochs).write(dir / "losses.csv");
  r.artifacts.push_back("losses.csv");
  CsvTable timings({"epoch", "seconds"});
  for (std::size_t i = 0; i < r.epoch_seconds.size(); ++i)
    timings.add_row({static_cast<std::int64_t>(i + 1), r.epoch_seconds[i]});
  timings.write(dir / "timings.csv");
  r.artifacts.push_back("timings.csv");
  write_record(r);
  return r;
}

RunRecord run_sample(const ExperimentConfig& cfg, const std::optional<fs::path>& checkpoint,
                     const fs::path& dir) {
  cfg.validate();
  if (cfg.sampler.score_source == ScoreSource::kNetwork && !checkpoint)
    throw ConfigError("sampler.score_source", "network scores need a checkpoint");
  RunRecord r = open_record(cfg, dir);
  const std::uint64_t seed = derive_seed(cfg.seed, "sampler");
  r.seed_ledger = {{"sampler", seed}};
  const Model m = load_model(cfg, cfg.sampler.score_source == ScoreSource::kNetwork
                                      ? checkpoint
                                      : std::nullopt);
  SamplerConfig sc = cfg.sampler;
  sc.seed = seed;
  const GenerateResult g = generate(sc, *m.model, SdeSchedule(cfg.train.schedule));
  samples_table(g.samples).write(dir / "samples.csv");
  r.artifacts.push_back("samples.csv");
  if (!cfg.sampler.trajectory_times.empty()) {
    std::vector<std::string> header{"sample_id", "t"};
    for (Eigen::Index i = 0; i < g.samples.rows(); ++i) header.push_back(fmt::format("x{}", i + 1));
    CsvTable tr(std::move(header));
    for (const auto& slice : g.trajectory)
      for (Eigen::Index j = 0; j < slice.states.cols(); ++j) {
        std::vector<CsvCell> row{static_cast<std::int64_t>(j), slice.t};
        for (Eigen::Index i = 0; i < slice.states.rows(); ++i) row.emplace_back(slice.states(i, j));
        tr.add_row(std::move(row));
      }
    tr.write(dir / "trajectories.csv");
    r.artifacts.push_back("trajectories.csv");
  }
  write_record(r);
  return r;
}

RunRecord run_diagnose(const ExperimentConfig& cfg, const std::optional<fs::path>& checkpoint,
                       const fs::path& dir, bool fd) {
  cfg.validate();
  RunRecord r = open_record(cfg, dir);
  const Model m = load_model(cfg, checkpoint);
  const SdeSchedule sched(cfg.train.schedule);
  const auto& d = cfg.diagnostics;
  const auto grid = d.grid();
  const GaussianMixture& gm = cfg.train.target;
  const std::uint64_t seed = derive_seed(cfg.seed, "diagnostics");
  r.seed_ledger = {{"diagnostics", seed}};

  auto emit = [&](const std::string& name, const Curve& c) {
    curve_table(c).write(dir / name);
    r.artifacts.push_back(name);
  };
  emit("rfp.csv", curve_rfp(*m.model, gm, sched, grid, d.n_mc, derive_seed(seed, "rfp"),
                            d.rfp_probes));
  if (fd)
    emit("rfp_fd.csv", curve_rfp(*m.model, gm, sched, grid, d.n_mc, derive_seed(seed, "rfp"),
                                 d.rfp_probes, GradMode::kFiniteDifference, d.fd_step_x));
  emit("dsm.csv", curve_dsm(*m.model, gm, sched, grid, d.n_mc, derive_seed(seed, "dsm")));
  emit("frob.csv", curve_frobenius(*m.model, gm, sched, grid, d.n_mc, d.frob_probes,
                                   derive_seed(seed, "frob")));
  emit("score_err.csv", score_error(*m.model, gm, sched, grid, d.n_mc, derive_seed(seed, "score_err")));
  for (std::size_t i = 0; i < d.field_times.size(); ++i) {
    const std::string name = fmt::format("field_{}.csv", i);
    field_table(score_field_dump(*m.model, sched, {d.field_times[i]}, d.field_grid)).write(dir / name);
    r.artifacts.push_back(name);
  }
  write_record(r);
  return r;
}

MetricReport run_metrics(const ExperimentConfig& cfg, const fs::path& real_csv,
                         const fs::path& fake_csv, const fs::path& out) {
  cfg.validate();
  const Batch real = read_samples_csv(real_csv);
  const Batch fake = read_samples_csv(fake_csv);
  if (real.rows() != cfg.train.target.dim() || fake.rows() != cfg.train.target.dim())
    throw ShapeError("metrics: sample files do not match the target dimension");
  const MetricReport m = evaluate_metrics(real, fake, cfg.train.target, cfg.metrics.k);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_text(out, report_json(m).dump(2) + "\n");
  return m;
}

RunRecord target_dump(const ExperimentConfig& cfg, const fs::path& dir) {
  cfg.validate();
  RunRecord r = open_record(cfg, dir);
  r.seed_ledger = {{"metrics.real", derive_seed(cfg.seed, "metrics.real")}};
  write_text(dir / "target.json", codec::to_json(cfg.train.target).dump(2) + "\n");
  samples_table(real_samples(cfg)).write(dir / "samples.csv");
  r.artifacts = {"target.json", "samples.csv"};
  write_record(r);
  return r;
}

ExperimentConfig sweep_cell_config(const ExperimentConfig& cfg, Penalty penalty, double lambda,
                                   std::uint64_t seed) {
  ExperimentConfig c = cfg;
  c.has_sweep = false;
  c.sweep = {};
  c.name = fmt::format("{}_{:g}_s{}", to_string(penalty), lambda, seed);
  c.seed = seed;
  c.train.seed = seed;
  c.train.objective.penalty = penalty;
  c.train.objective.lambda = lambda;
  c.train.lr = default_learning_rate(penalty);
  c.train.checkpoint_every = c.train.epochs;
  return c;
}

SweepResult run_sweep(const ExperimentConfig& cfg, const fs::path& dir) {
  cfg.validate();
  if (!cfg.has_sweep) throw ConfigError("sweep", "config has no sweep block");
  fs::create_directories(dir);
  write_text(dir / "config.json", dump_config(cfg));

  std::vector<std::pair<Penalty, double>> rows;
  for (Penalty p : cfg.sweep.penalties) {
    if (p == Penalty::kNone)
      rows.emplace_back(p, 0.0);
    else
      for (double l : cfg.sweep.lambdas) rows.emplace_back(p, l);
  }

  const SdeSchedule sched(cfg.train.schedule);
  SweepResult result;
  for (const auto& [penalty, lambda] : rows) {
    for (std::uint64_t seed : cfg.sweep.seeds) {
      const ExperimentConfig c = sweep_cell_config(cfg, penalty, lambda, seed);
      SweepCell cell;
      cell.penalty = penalty;
      cell.lambda = lambda;
      cell.seed = seed;
      try {
        const fs::path cell_dir = dir / c.name;
        const RunRecord rec = run_train(c, cell_dir);
        if (rec.failed) throw NumericalError(rec.failure);
        const ScoreNet net = load_checkpoint(cell_dir / ckpt_name(c.train.epochs), c.train.net).net;
        const NetScoreModel model(net);
        const auto grid = c.diagnostics.grid();
        const auto& d = c.diagnostics;
        const std::uint64_t dseed = derive_seed(seed, "diagnostics");
        const Curve rfp = curve_rfp(model, c.train.target, sched, grid, d.n_mc,
                                    derive_seed(dseed, "rfp"), d.rfp_probes);
        const Curve frob = curve_frobenius(model, c.train.target, sched, grid, d.n_mc,
                                           d.frob_probes, derive_seed(dseed, "frob"));
        const Curve dsm = curve_dsm(model, c.train.target, sched, {*std::min_element(grid.begin(), grid.end())},
                                    d.n_mc, derive_seed(dseed, "dsm"));
        cell.rfp_small_log10 = mean_log10_below(rfp, cfg.sweep.small_t);
        cell.frob_small = mean_below(frob, cfg.sweep.small_t);
        cell.dsm_min_t = dsm.front().value;
        const Batch losses = read_samples_csv(cell_dir / "losses.csv");
        cell.final_dsm = losses(1, losses.cols() - 1);
        cell.epoch_seconds = median(rec.epoch_seconds);
        SamplerConfig sc = c.sampler;
        sc.seed = derive_seed(seed, "sampler");
        const Batch fake = generate(sc, model, sched).samples;
        cell.metrics = evaluate_metrics(real_samples(c), fake, c.train.target, c.metrics.k);
      } catch (const std::exception& e) {
        cell.failed = true;
        cell.failure = e.what();
        result.any_failed = true;
        fmt::print(stderr, "sweep: cell {} failed: {}\n", c.name, e.what());
      }
      result.cells.push_back(std::move(cell));
    }
  }

  CsvTable cells({"penalty", "lambda", "seed", "failed", "rfp_small_log10", "frob_small",
                  "dsm_min_t", "final_dsm", "frechet", "density", "coverage", "entropy",
                  "epoch_seconds"});
  for (const auto& c : result.cells)
    cells.add_row({to_string(c.penalty), c.lambda, static_cast<std::int64_t>(c.seed),
                   std::int64_t{c.failed}, c.rfp_small_log10, c.frob_small, c.dsm_min_t,
                   c.final_dsm, c.metrics.frechet, c.metrics.density, c.metrics.coverage,
                   c.metrics.entropy, c.epoch_seconds});
  cells.write(dir / "cells.csv");

  using Getter = double (*)(const SweepCell&);
  const std::vector<std::pair<std::string, Getter>> stats{
      {"rfp_small_log10", [](const SweepCell& c) { return c.rfp_small_log10; }},
      {"frob_small", [](const SweepCell& c) { return c.frob_small; }},
      {"dsm_min_t", [](const SweepCell& c) { return c.dsm_min_t; }},
      {"final_dsm", [](const SweepCell& c) { return c.final_dsm; }},
      {"frechet", [](const SweepCell& c) { return c.metrics.frechet; }},
      {"density", [](const SweepCell& c) { return c.metrics.density; }},
      {"coverage", [](const SweepCell& c) { return c.metrics.coverage; }},
      {"entropy", [](const SweepCell& c) { return c.metrics.entropy; }},
      {"epoch_seconds", [](const SweepCell& c) { return c.epoch_seconds; }}};
  std::vector<std::string> header{"penalty", "lambda", "n_seeds", "n_failed", "failed"};
  for (const auto& [name, get] : stats) {
    header.push_back(name + "_mean");
    header.push_back(name + "_std");
  }
  CsvTable summary(std::move(header));
  for (const auto& [penalty, lambda] : rows) {
    std::vector<const SweepCell*> ok;
    std::int64_t n_failed = 0;
    for (const auto& c : result.cells) {
      if (c.penalty != penalty || c.lambda != lambda) continue;
      if (c.failed)
        ++n_failed;
      else
        ok.push_back(&c);
    }
    std::vector<CsvCell> row{to_string(penalty), lambda, static_cast<std::int64_t>(ok.size()),
                             n_failed, std::int64_t{n_failed > 0}};
    for (const auto& [name, get] : stats) {
      double mean = 0.0, ss = 0.0;
      for (const SweepCell* c : ok) mean += get(*c);
      mean = ok.empty() ? std::nan("") : mean / ok.size();
      for (const SweepCell* c : ok) ss += (get(*c) - mean) * (get(*c) - mean);
      const double sd = ok.size() > 1 ? std::sqrt(ss / (ok.size() - 1)) : 0.0;
      row.emplace_back(mean);
      row.emplace_back(ok.empty() ? std::nan("") : sd);
    }
    summary.add_row(std::move(row));
  }
  summary.write(dir / "summary.csv");
  return result;
}

}  // namespace scorelab
