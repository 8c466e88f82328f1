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

#include <benchmark/benchmark.h>

#include "scorelab/sampler.hpp"
#include "scorelab/target.hpp"

namespace scorelab {
namespace {

void BM_GenerateOracle(benchmark::State& state) {
  const SdeSchedule sched = SdeSchedule::vp();
  const MixtureScoreModel oracle(symmetric_pair(), sched);
  SamplerConfig c;
  c.n_steps = static_cast<int>(state.range(0));
  c.n_samples = 1000;
  for (auto _ : state) benchmark::DoNotOptimize(generate(c, oracle, sched));
}
BENCHMARK(BM_GenerateOracle)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_GenerateNetwork(benchmark::State& state) {
  const SdeSchedule sched = SdeSchedule::vp();
  const ScoreNet net = ScoreNet::initialized(NetArchitecture{}, 3);
  const NetScoreModel model(net);
  SamplerConfig c;
  c.n_steps = 100;
  c.n_samples = 1000;
  for (auto _ : state) benchmark::DoNotOptimize(generate(c, model, sched));
}
BENCHMARK(BM_GenerateNetwork)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace scorelab
