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

#include "scorelab/objective.hpp"
#include "scorelab/rng.hpp"
#include "scorelab/target.hpp"

namespace scorelab {
namespace {

// One training step's loss and gradient at the default architecture.
void BM_LossAndGradient(benchmark::State& state) {
  const auto penalty = static_cast<Penalty>(state.range(0));
  const SdeSchedule sched = SdeSchedule::vp();
  NetArchitecture arch;
  const ScoreNet net = ScoreNet::initialized(arch, 1);
  ObjectiveSpec spec;
  spec.penalty = penalty;
  spec.lambda = penalty == Penalty::kNone ? 0.0 : 0.1;
  Engine engine(7);
  const BatchSample batch = draw_batch(symmetric_pair(), sched, 128, spec.probes, engine);
  Vector grad(net.parameters().size());
  for (auto _ : state) {
    benchmark::DoNotOptimize(loss_and_gradient(net, sched, batch, spec, &grad));
  }
  state.SetLabel(to_string(penalty));
}
BENCHMARK(BM_LossAndGradient)
    ->Arg(static_cast<int>(Penalty::kNone))
    ->Arg(static_cast<int>(Penalty::kSN))
    ->Arg(static_cast<int>(Penalty::kDIV))
    ->Arg(static_cast<int>(Penalty::kJAC))
    ->Arg(static_cast<int>(Penalty::kFP))
    ->Unit(benchmark::kMillisecond);

void BM_ForwardBatch(benchmark::State& state) {
  const ScoreNet net = ScoreNet::initialized(NetArchitecture{}, 1);
  const int n = static_cast<int>(state.range(0));
  const Batch x = Batch::Random(2, n);
  const RowVector t = RowVector::Constant(n, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward_batch(x, t));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_ForwardBatch)->Arg(128)->Arg(1024);

}  // namespace
}  // namespace scorelab
