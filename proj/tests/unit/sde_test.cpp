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

#include "scorelab/sde.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "scorelab/errors.hpp"
#include "scorelab/rng.hpp"
#include "unit/test_util.hpp"

namespace scorelab {
namespace {

using testing::vec;

TEST(SdeDrift, VpAtTimeZero) {
  const SdeSchedule vp = SdeSchedule::vp(0.1, 20.0);
  // -beta(0) x / 2 with beta(0) = 0.1.
  const Vector f = vp.drift(vec({2.0, 0.0}), 0.0);
  EXPECT_NEAR(f(0), -0.5 * 0.1 * 2.0, 1e-15);
  EXPECT_EQ(f(1), 0.0);
}

TEST(SdeDrift, VeIsZero) {
  const SdeSchedule ve = SdeSchedule::ve();
  EXPECT_EQ(ve.drift(vec({3.0, -7.0, 1.0}), 0.4), Vector::Zero(3));
}

TEST(SdeDrift, VpAtOrigin) {
  EXPECT_EQ(SdeSchedule::vp().drift(Vector::Zero(2), 0.7), Vector::Zero(2));
}

TEST(SdeDrift, RejectsTimeOutsideRange) {
  const SdeSchedule vp = SdeSchedule::vp();
  EXPECT_THROW(vp.drift(vec({1.0}), 1.5), RangeError);
  EXPECT_THROW(vp.drift(vec({1.0}), -0.1), RangeError);
  EXPECT_THROW(vp.diffusion(2.0), RangeError);
}

TEST(SdeDiffusion, VpEndpoints) {
  const SdeSchedule vp = SdeSchedule::vp(0.1, 20.0);
  EXPECT_NEAR(vp.diffusion(1.0), std::sqrt(20.0), 1e-14);
  EXPECT_NEAR(vp.diffusion(1.0), 4.4721, 1e-4);
  EXPECT_NEAR(vp.diffusion(0.0), std::sqrt(0.1), 1e-15);
  EXPECT_NEAR(vp.diffusion(0.0), 0.31623, 1e-5);
}

TEST(SdeDiffusion, VeAtTimeZero) {
  const SdeSchedule ve = SdeSchedule::ve(0.01, 50.0);
  EXPECT_NEAR(ve.diffusion(0.0), 0.01 * std::sqrt(2.0 * std::log(5000.0)), 1e-15);
}

TEST(SdeKernel, VpNoCorruptionAtZero) {
  const KernelParams k = SdeSchedule::vp().kernel_params(0.0);
  EXPECT_EQ(k.alpha, 1.0);
  EXPECT_EQ(k.sigma, 0.0);
}

TEST(SdeKernel, VpAtOne) {
  const KernelParams k = SdeSchedule::vp(0.1, 20.0).kernel_params(1.0);
  // int_0^1 beta = 0.1 + 9.95 = 10.05.
  EXPECT_NEAR(k.alpha, std::exp(-0.5 * 10.05), 1e-15);
  EXPECT_NEAR(k.alpha, 6.5716e-3, 1e-7);
  EXPECT_NEAR(k.sigma, std::sqrt(1.0 - std::exp(-10.05)), 1e-15);
  EXPECT_NEAR(k.sigma, 0.9999785, 1e-7);
}

TEST(SdeKernel, VeAtOne) {
  const KernelParams k = SdeSchedule::ve(0.01, 50.0).kernel_params(1.0);
  EXPECT_EQ(k.alpha, 1.0);
  EXPECT_NEAR(k.sigma, 50.0, 1e-12);
}

TEST(SdePerturb, IdentityAtZero) {
  const SdeSchedule vp = SdeSchedule::vp();
  const Vector x0 = vec({0.3, -1.2}), z = vec({5.0, 2.0});
  EXPECT_EQ(vp.perturb(x0, 0.0, z), x0);
}

TEST(SdePerturb, VpAtOneWithZeroNoise) {
  const Vector x = SdeSchedule::vp(0.1, 20.0).perturb(vec({1.0, 1.0}), 1.0, Vector::Zero(2));
  EXPECT_NEAR(x(0), 6.5716e-3, 1e-7);
  EXPECT_NEAR(x(1), 6.5716e-3, 1e-7);
}

TEST(SdePerturb, PureNoiseDirection) {
  const SdeSchedule vp = SdeSchedule::vp();
  for (double t : {0.01, 0.3, 1.0}) {
    const Vector x = vp.perturb(Vector::Zero(2), t, vec({1.0, 0.0}));
    EXPECT_EQ(x(0), vp.kernel_params(t).sigma);
    EXPECT_EQ(x(1), 0.0);
  }
}

TEST(SdePerturb, ShapeMismatch) {
  EXPECT_THROW(SdeSchedule::vp().perturb(vec({1.0, 2.0}), 0.5, vec({1.0})), ShapeError);
}

TEST(SdeSchedule, RejectsInvalidParameters) {
  SdeSchedule::Params p;
  p.beta_min = 5.0;
  p.beta_max = 1.0;
  EXPECT_THROW(SdeSchedule{p}, ConfigError);
  p = {};
  p.t_min = 0.0;
  EXPECT_THROW(SdeSchedule{p}, ConfigError);
  p = {};
  p.kind = SdeKind::kVE;
  p.sigma_min = 60.0;
  EXPECT_THROW(SdeSchedule{p}, ConfigError);
}

// Property: d alpha / dt = -beta alpha / 2.
TEST(SdeProperty, KernelConsistentWithDrift) {
  const SdeSchedule vp = SdeSchedule::vp(0.1, 20.0);
  const double h = 1e-5;
  for (int i = 1; i < 100; ++i) {
    const double t = 0.01 * i;
    const double fd = (vp.kernel_params(t + h).alpha - vp.kernel_params(t - h).alpha) / (2 * h);
    const double exact = -0.5 * vp.beta(t) * vp.kernel_params(t).alpha;
    EXPECT_LT(testing::rel_err(fd, exact), 1e-6) << "t = " << t;
  }
}

TEST(SdeProperty, VariancePreservation) {
  const SdeSchedule vp = SdeSchedule::vp();
  for (int i = 0; i < 100; ++i) {
    const double t = i / 99.0;
    const KernelParams k = vp.kernel_params(t);
    EXPECT_NEAR(k.alpha * k.alpha + k.sigma * k.sigma, 1.0, 1e-12) << "t = " << t;
  }
}

TEST(SdeProperty, SigmaStrictlyIncreasing) {
  for (const SdeSchedule& s : {SdeSchedule::vp(), SdeSchedule::ve()}) {
    double prev = -1.0;
    for (int i = 0; i <= 1000; ++i) {
      const double t = s.t_min() + (s.t_max() - s.t_min()) * i / 1000.0;
      const double sig = s.kernel_params(t).sigma;
      EXPECT_GT(sig, prev);
      prev = sig;
    }
  }
}

TEST(SdeProperty, PerturbMoments) {
  const SdeSchedule vp = SdeSchedule::vp();
  const double t = 0.3;
  const KernelParams k = vp.kernel_params(t);
  const Vector x0 = vec({1.5, -0.5});
  Engine eng(7);
  const int n = 100000;
  Vector sum = Vector::Zero(2), sq = Vector::Zero(2);
  for (int i = 0; i < n; ++i) {
    const Vector x = vp.perturb(x0, t, normal_vector(eng, 2));
    sum += x;
    sq += x.cwiseProduct(x);
  }
  for (int d = 0; d < 2; ++d) {
    const double mean = sum(d) / n;
    const double var = sq(d) / n - mean * mean;
    EXPECT_LT(std::abs(mean - k.alpha * x0(d)), 4.0 * k.sigma / std::sqrt(n));
    // s.e. of the sample std is about sigma / sqrt(2 n).
    EXPECT_LT(std::abs(std::sqrt(var) - k.sigma), 4.0 * k.sigma / std::sqrt(2.0 * n));
  }
}

TEST(SdeSigmaJet, MatchesFiniteDifferences) {
  for (const SdeSchedule& s : {SdeSchedule::vp(), SdeSchedule::ve()}) {
    const double h = 1e-5;
    for (double t : {0.05, 0.4, 0.9}) {
      const SigmaJet j = s.sigma_jet(t);
      auto sig = [&](double u) { return s.kernel_params(u).sigma; };
      EXPECT_NEAR(j.value, sig(t), 1e-15);
      EXPECT_LT(testing::rel_err(j.d1, testing::central_diff(sig, t, h)), 1e-7);
      const double d2 = (sig(t + 1e-4) - 2 * sig(t) + sig(t - 1e-4)) / 1e-8;
      EXPECT_LT(testing::rel_err(j.d2, d2), 1e-4);
    }
  }
}

}  // namespace
}  // namespace scorelab
