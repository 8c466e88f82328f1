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

// scorelab command-line runner.
//
//   scorelab train -c cfg.json
//   scorelab sample -c cfg.json [--ckpt path]
//   scorelab diagnose -c cfg.json [--ckpt path] [--fd]
//   scorelab metrics -c cfg.json --real a.csv --fake b.csv
//   scorelab target-dump -c cfg.json
//   scorelab sweep -c cfg.json
//
// Outputs go to $SCORELAB_OUT/<name>/ (default ./runs/<name>/).

#include <CLI11.hpp>

#include <optional>

#include <fmt/format.h>

#include "scorelab/errors.hpp"
#include "scorelab/runner.hpp"

namespace {

using scorelab::fs::path;

std::optional<path> maybe(const std::string& s) {
  return s.empty() ? std::nullopt : std::optional<path>(s);
}

int report(const scorelab::RunRecord& r) {
  for (const auto& a : r.artifacts) fmt::print("{}\n", (r.dir / a).string());
  if (r.failed) {
    fmt::print(stderr, "run failed: {}\n", r.failure);
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scorelab: score-model training, sampling and diagnostics on Gaussian mixtures"};
  app.require_subcommand(1);
  std::string config, ckpt, real, fake, out;
  bool fd = false;

  auto* train = app.add_subcommand("train", "train a score network");
  train->add_option("-c,--config", config, "experiment config (JSON)")->required();

  auto* sample = app.add_subcommand("sample", "generate samples with the reverse SDE");
  sample->add_option("-c,--config", config)->required();
  sample->add_option("--ckpt", ckpt, "network checkpoint");

  auto* diagnose = app.add_subcommand("diagnose", "noise-level curves and field dumps");
  diagnose->add_option("-c,--config", config)->required();
  diagnose->add_option("--ckpt", ckpt, "network checkpoint; omit to diagnose the exact score");
  diagnose->add_flag("--fd", fd, "also write rfp_fd.csv using finite differences in x");

  auto* metrics = app.add_subcommand("metrics", "Frechet, density, coverage and entropy");
  metrics->add_option("-c,--config", config)->required();
  metrics->add_option("--real", real)->required()->check(CLI::ExistingFile);
  metrics->add_option("--fake", fake)->required()->check(CLI::ExistingFile);
  metrics->add_option("-o,--out", out, "report path (default <run dir>/report.json)");

  auto* dump = app.add_subcommand("target-dump", "write the target mixture and reference samples");
  dump->add_option("-c,--config", config)->required();

  auto* sweep = app.add_subcommand("sweep", "penalty x lambda x seed sweep");
  sweep->add_option("-c,--config", config)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const auto cfg = scorelab::load_config(config);
    const path run_dir = scorelab::output_root() / cfg.name;
    if (train->parsed()) return report(scorelab::run_train(cfg, run_dir));
    if (sample->parsed()) return report(scorelab::run_sample(cfg, maybe(ckpt), run_dir / "sample"));
    if (diagnose->parsed())
      return report(scorelab::run_diagnose(cfg, maybe(ckpt), run_dir / "curves", fd));
    if (metrics->parsed()) {
      const path dest = out.empty() ? run_dir / "report.json" : path(out);
      const auto m = scorelab::run_metrics(cfg, real, fake, dest);
      fmt::print("{}\nfrechet {:.6g}  density {:.6g}  coverage {:.6g}  entropy {:.6g}\n",
                 dest.string(), m.frechet, m.density, m.coverage, m.entropy);
      return 0;
    }
    if (dump->parsed()) return report(scorelab::target_dump(cfg, run_dir / "target"));
    if (sweep->parsed()) {
      const auto res = scorelab::run_sweep(cfg, run_dir / "sweep");
      fmt::print("{}\n", (run_dir / "sweep" / "summary.csv").string());
      return res.any_failed ? 3 : 0;
    }
  } catch (const scorelab::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 1;
}
