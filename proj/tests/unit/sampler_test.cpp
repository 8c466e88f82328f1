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

#include <cmath>

#include <gtest/gtest.h>

#include "scorelab/errors.hpp"
#include "scorelab/metrics.hpp"
#include "unit/test_util.hpp"

namespace scorelab {
namespace {

using testing::vec;

TEST(PriorSample, VpUnitVariance) {
  const int n = 100000;
  const Batch x = prior_sample(SdeSchedule::vp(), 2, n, 1);
  for (int d = 0; d < 2; ++d) {
    const double var = (x.row(d).array() - x.row(d).mean()).square().sum() / (n - 1);
    EXPECT_LT(std::abs(var - 1.0), 4.0 * std::sqrt(2.0 / (n - 1)));
  }
}

TEST(PriorSample, DeterministicGivenSeed) {
  EXPECT_EQ(prior_sample(SdeSchedule::vp(), 3, 50, 9), prior_sample(SdeSchedule::vp(), 3, 50, 9));
}

TEST(PriorSample, VeScale) {
  const int n = 20000;
  const Batch x = prior_sample(SdeSchedule::ve(0.01, 50.0), 1, n, 2);
  const double var = (x.array() - x.mean()).square().sum() / (n - 1);
  EXPECT_LT(std::abs(var - 2500.0), 4.0 * 2500.0 * std::sqrt(2.0 / (n - 1)));
}

TEST(ReverseStep, FrozenDynamics) {
  const Vector x = vec({1.0, -2.0});
  EXPECT_EQ(reverse_step(x, Vector::Zero(2), 0.0, vec({5.0, 5.0}), 0.01, vec({1.0, 1.0})), x);
}

TEST(ReverseStep, VpZeroScoreZeroNoise) {
  const SdeSchedule vp = SdeSchedule::vp();
  const Vector x = vec({0.5, 2.0});
  const double t = 0.6, dt = 1e-3;
  const Vector out = reverse_step(x, t, dt, Vector::Zero(2), vp, Vector::Zero(2));
  EXPECT_LT((out - (x + 0.5 * vp.beta(t) * x * dt)).norm(), 1e-15);
}

TEST(Generate, OracleUnitGaussianEndpoint) {
  const SdeSchedule vp = SdeSchedule::vp();
  const MixtureScoreModel oracle(unit_gaussian(2), vp);
  SamplerConfig c;
  c.n_samples = 10000;
  c.seed = 3;
  c.score_source = ScoreSource::kOracle;
  const Batch x = generate(c, oracle, vp).samples;
  const int n = static_cast<int>(x.cols());
  for (int d = 0; d < 2; ++d) {
    const double mean = x.row(d).mean();
    const double var = (x.row(d).array() - mean).square().sum() / (n - 1);
    EXPECT_LT(std::abs(mean), 4.0 / std::sqrt(n));
    EXPECT_LT(std::abs(var - 1.0), 0.05);
  }
}

TEST(Generate, OracleSymmetricPairModeBalance) {
  const SdeSchedule vp = SdeSchedule::vp();
  const GaussianMixture gm = symmetric_pair();
  const MixtureScoreModel oracle(gm, vp);
  SamplerConfig c;
  c.n_samples = 10000;
  c.seed = 4;
  const Batch x = generate(c, oracle, vp).samples;
  const MarginalMixture m0(0.0, gm.weights, gm.means, gm.covariances);
  double left = 0.0;
  for (int j = 0; j < x.cols(); ++j) {
    Eigen::Index k;
    m0.component_posterior(x.col(j)).maxCoeff(&k);
    left += (k == 0);
  }
  const double p = left / x.cols();
  EXPECT_LT(std::abs(p - 0.5), 4.0 * std::sqrt(0.25 / x.cols()));
}

TEST(Generate, SingleStepShape) {
  const SdeSchedule vp = SdeSchedule::vp();
  const MixtureScoreModel oracle(ring_mixture(), vp);
  SamplerConfig c;
  c.n_steps = 1;
  c.n_samples = 7;
  const Batch x = generate(c, oracle, vp).samples;
  EXPECT_EQ(x.rows(), 2);
  EXPECT_EQ(x.cols(), 7);
  EXPECT_TRUE(x.allFinite());
}

TEST(Generate, DeterministicAndTrajectoryRecording) {
  const SdeSchedule vp = SdeSchedule::vp();
  const MixtureScoreModel oracle(symmetric_pair(), vp);
  SamplerConfig c;
  c.n_steps = 100;
  c.n_samples = 20;
  c.seed = 8;
  c.trajectory_times = {0.5, 1.0};
  const GenerateResult a = generate(c, oracle, vp), b = generate(c, oracle, vp);
  EXPECT_EQ(a.samples, b.samples);
  ASSERT_EQ(a.trajectory.size(), 2u);
  EXPECT_DOUBLE_EQ(a.trajectory[0].t, 1.0);
  EXPECT_LE(a.trajectory[1].t, 0.5);
  EXPECT_EQ(a.trajectory[0].states, prior_sample(vp, 2, 20, 8));
}

TEST(Generate, PerSampleStreamsIndependentOfBatchSize) {
  const SdeSchedule vp = SdeSchedule::vp();
  const MixtureScoreModel oracle(symmetric_pair(), vp);
  SamplerConfig c;
  c.n_steps = 50;
  c.n_samples = 10;
  const Batch big = generate(c, oracle, vp).samples;
  c.n_samples = 3;
  const Batch small = generate(c, oracle, vp).samples;
  EXPECT_LT((big.leftCols(3) - small).norm(), 1e-12);
}

TEST(Generate, NonFiniteStateThrows) {
  const SdeSchedule vp = SdeSchedule::vp();
  const AffineScoreModel blowup(1e300 * Matrix::Identity(2, 2));
  SamplerConfig c;
  c.n_steps = 10;
  c.n_samples = 2;
  EXPECT_THROW(generate(c, blowup, vp), NumericalError);
}

TEST(SamplerConfig, Validation) {
  const SdeSchedule vp = SdeSchedule::vp();
  SamplerConfig c;
  c.n_steps = 0;
  EXPECT_THROW(c.validate(vp), ConfigError);
  c = {};
  c.t_start = 0.1;
  c.t_end = 0.2;
  EXPECT_THROW(c.validate(vp), ConfigError);
  c = {};
  c.t_end = 1e-7;
  EXPECT_THROW(c.validate(vp), ConfigError);
}

// Euler variance recursion for a centered Gaussian target under VP, where the
// reverse step is linear in x.
double euler_variance(const SdeSchedule& vp, double s2, int steps) {
  const double dt = (vp.t_max() - vp.t_min()) / steps;
  double var = 1.0;
  for (int i = 0; i < steps; ++i) {
    const double t = vp.t_max() - i * dt;
    const KernelParams k = vp.kernel_params(t);
    const double g2 = vp.diffusion_squared(t);
    const double gain = 1.0 - (vp.drift_coefficient(t) + g2 / (k.alpha * k.alpha * s2 + k.sigma * k.sigma)) * dt;
    var = gain * gain * var + g2 * dt;
  }
  return var;
}

// Terminal variance bias shrinks at first order in the step size.
TEST(GenerateProperty, WeakConvergenceFirstOrder) {
  const SdeSchedule vp = SdeSchedule::vp();
  const double s2 = 0.01;
  std::vector<double> err;
  for (int steps : {250, 500, 1000, 2000}) err.push_back(std::abs(euler_variance(vp, s2, steps) - s2));
  for (int i = 0; i + 1 < 4; ++i) {
    const double ratio = err[i] / err[i + 1];
    EXPECT_GT(ratio, 1.8) << i;
    EXPECT_LT(ratio, 2.3) << i;
  }
}

// Sample variance of the sampler output tracks the Euler recursion.
TEST(GenerateProperty, SampleVarianceMatchesEulerRecursion) {
  const SdeSchedule vp = SdeSchedule::vp();
  const double s2 = 0.01;
  GaussianMixture gm;
  gm.weights = {1.0};
  gm.means = {Vector::Zero(1)};
  gm.covariances = {Matrix::Identity(1, 1) * s2};
  const MixtureScoreModel oracle(gm, vp);
  const int n = 20000;
  for (int steps : {50, 200}) {
    SamplerConfig c;
    c.n_steps = steps;
    c.n_samples = n;
    c.seed = 12;
    const Batch x = generate(c, oracle, vp).samples;
    const double mean = x.row(0).mean();
    const double var = (x.row(0).array() - mean).square().sum() / (n - 1);
    const double expected = euler_variance(vp, s2, steps);
    EXPECT_LT(std::abs(var - expected), 4.0 * expected * std::sqrt(2.0 / (n - 1))) << steps;
  }
}

}  // namespace
}  // namespace scorelab
