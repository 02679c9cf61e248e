// Copyright 2026 The hardalign Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hardalign/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "stat_oracles.hpp"

namespace hardalign {
namespace {

using ::hardalign::testing::binomial_sigma;
using ::hardalign::testing::ks_critical;
using ::hardalign::testing::ks_statistic;

constexpr int kDraws = 100000;
const double kLambdas[] = {1.0, 0.2, 0.05};

// Source replaying fixed uniforms, for pinning exact noise values.
struct ScriptedSource {
  std::vector<double> values;
  std::size_t next = 0;
  double uniform() { return values.at(next++); }
};

TEST(NoiseSourceTest, SameSeedSameStream) {
  NoiseSource a(99), b(99), c(100);
  bool any_difference = false;
  for (int k = 0; k < 1000; ++k) {
    const double x = a.uniform();
    EXPECT_EQ(x, b.uniform());
    any_difference = any_difference || x != c.uniform();
  }
  EXPECT_TRUE(any_difference);
}

TEST(NoiseSourceTest, NeverHitsTheBoundary) {
  NoiseSource noise(1);
  for (int k = 0; k < kDraws; ++k) {
    const double u = noise.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_TRUE(std::isfinite(logistic_from_uniform(u)));
  }
}

TEST(SampleLogisticTest, PinnedValues) {
  EXPECT_EQ(logistic_from_uniform(0.5), 0.0);
  const double e = std::exp(1.0);
  EXPECT_NEAR(logistic_from_uniform(e / (1.0 + e)), 1.0, 1e-12);
  ScriptedSource scripted{{0.5}};
  EXPECT_EQ(sample_logistic(scripted), 0.0);
}

TEST(SampleLogisticTest, EmpiricalMedianIsZero) {
  NoiseSource noise(2024);
  std::vector<double> draws(kDraws);
  for (double& d : draws) d = sample_logistic(noise);
  std::nth_element(draws.begin(), draws.begin() + kDraws / 2, draws.end());
  EXPECT_NEAR(draws[kDraws / 2], 0.0, 0.02);
}

TEST(SigmoidTempTest, PinnedValues) {
  for (const double lambda : kLambdas) EXPECT_EQ(sigmoid_temp(0.0, lambda), 0.5);
  // 1 / (1 + e^-2) evaluated by hand.
  EXPECT_NEAR(sigmoid_temp(2.0, 1.0), 0.8807970779778823, 1e-15);
  const double sharp = sigmoid_temp(1.0, 0.05);
  EXPECT_LT(1.0 - sharp, 1e-8);
  EXPECT_LT(sharp, 1.0);
}

TEST(SigmoidTempTest, RejectsNonPositiveTemperature) {
  EXPECT_THROW(sigmoid_temp(1.0, 0.0), ValidationError);
  EXPECT_THROW(sigmoid_temp(1.0, -0.5), ValidationError);
  EXPECT_THROW(sigmoid_temp(1.0, std::nan("")), ValidationError);
}

TEST(SigmoidTempTest, ComplementSymmetryAndMonotonicity) {
  NoiseSource noise(3);
  for (int k = 0; k < 2000; ++k) {
    const double x = -50.0 + 100.0 * noise.uniform();
    const double lambda = 0.01 + 2.0 * noise.uniform();
    EXPECT_NEAR(sigmoid_temp(x, lambda) + sigmoid_temp(-x, lambda), 1.0, 1e-12);
    EXPECT_LE(sigmoid_temp(x, lambda), sigmoid_temp(x + 0.01, lambda));
  }
}

TEST(EmitProbTest, PinnedValuesAndOddsIdentity) {
  EXPECT_EQ(emit_prob(0.0, 1.0), 0.5);
  EXPECT_NEAR(emit_prob(std::log(3.0), 1.0), 0.75, 1e-15);
  for (const double x : {-4.0, -0.3, 0.0, 1.7, 5.0}) {
    const double alpha1 = emit_prob(x, 1.0);
    EXPECT_NEAR(alpha1 / (1.0 - alpha1), std::exp(x), 1e-12 * std::exp(std::abs(x)));
  }
}

TEST(EmitProbTest, LogProbabilitiesSumToOne) {
  for (const double lambda : kLambdas) {
    for (const double x : {-30.0, -1.0, 0.0, 0.4, 30.0}) {
      EXPECT_NEAR(std::exp(emit_log_prob(x, lambda)) + std::exp(shift_log_prob(x, lambda)), 1.0, 1e-12);
      EXPECT_TRUE(std::isfinite(shift_log_prob(x, lambda)));
    }
  }
}

TEST(SampleBernoulliTest, SaturatedLogitAlwaysEmits) {
  NoiseSource noise(4);
  for (int k = 0; k < 10000; ++k) ASSERT_EQ(sample_bernoulli(1e3, noise), TransitionAction::kEmit);
}

TEST(SampleBernoulliTest, TieResolvesToEmit) {
  EXPECT_EQ(bernoulli_from_logistic(0.0, 0.0), TransitionAction::kEmit);
  EXPECT_EQ(bernoulli_from_logistic(1.0, -1.0), TransitionAction::kEmit);
  EXPECT_EQ(bernoulli_from_logistic(1.0, -1.5), TransitionAction::kShift);
}

TEST(SampleBernoulliTest, EmitFrequencyMatchesSigmoid) {
  NoiseSource noise(5);
  for (const double p : {0.5, 0.75}) {
    const double log_alpha = std::log(p / (1.0 - p));
    int emits = 0;
    for (int k = 0; k < kDraws; ++k) emits += sample_bernoulli(log_alpha, noise) == TransitionAction::kEmit;
    EXPECT_NEAR(static_cast<double>(emits) / kDraws, p, 3.0 * binomial_sigma(p, kDraws)) << "p = " << p;
  }
}

TEST(BinConcreteParamsTest, Validation) {
  EXPECT_THROW(BinConcreteParams(0.0, 0.0), ValidationError);
  EXPECT_THROW(BinConcreteParams(std::nan(""), 1.0), ValidationError);
  EXPECT_THROW(BinConcreteParams(INFINITY, 1.0), ValidationError);
  EXPECT_NO_THROW(BinConcreteParams(-3.0, 0.05));
}

TEST(BinConcreteSampleTest, ZeroNoiseZeroLogitIsHalf) {
  for (const double lambda : kLambdas) {
    EXPECT_EQ(binconcrete_from_logistic(BinConcreteParams(0.0, lambda), 0.0), 0.5);
    ScriptedSource scripted{{0.5}};
    EXPECT_EQ(binconcrete_sample(BinConcreteParams(0.0, lambda), scripted), 0.5);
  }
}

TEST(BinConcreteSampleTest, ExceedsHalfWithLambdaFreeProbability) {
  for (const double log_alpha : {0.0, std::log(3.0), -1.2}) {
    const double p = sigmoid_temp(log_alpha, 1.0);
    for (const double lambda : kLambdas) {
      NoiseSource noise(6);
      int above = 0;
      for (int k = 0; k < kDraws; ++k) above += binconcrete_sample(BinConcreteParams(log_alpha, lambda), noise) > 0.5;
      EXPECT_NEAR(static_cast<double>(above) / kDraws, p, 3.0 * binomial_sigma(p, kDraws))
          << "log_alpha = " << log_alpha << " lambda = " << lambda;
    }
  }
}

TEST(BinConcreteSampleTest, UnitParametersGiveUniformSamples) {
  NoiseSource noise(7);
  std::vector<double> samples(kDraws);
  for (double& s : samples) s = binconcrete_sample(BinConcreteParams(0.0, 1.0), noise);
  EXPECT_LT(ks_statistic(samples, [](double x) { return x; }), ks_critical(kDraws, 0.01));
}

TEST(BinConcreteSampleTest, SamplesMatchDensityByKolmogorovSmirnov) {
  for (const double log_alpha : {0.0, std::log(2.0), std::log(0.5)}) {
    for (const double lambda : kLambdas) {
      const BinConcreteParams params(log_alpha, lambda);
      const testing::LogitCdfTable cdf(params);
      ASSERT_NEAR(cdf.total(), 1.0, 1e-9);
      NoiseSource noise(derive_seed(8, "ks", static_cast<std::uint64_t>(lambda * 1000)));
      std::vector<double> samples(kDraws);
      for (double& u : samples) u = binconcrete_sample_logit(params, noise);
      EXPECT_LT(ks_statistic(samples, [&](double u) { return cdf(u); }), ks_critical(kDraws, 0.01))
          << "log_alpha = " << log_alpha << " lambda = " << lambda;
    }
  }
}

TEST(BinConcreteLogDensityTest, UnitParametersGiveZero) {
  const BinConcreteParams unit(0.0, 1.0);
  for (double x = 1e-9; x < 1.0; x += 0.0137) EXPECT_NEAR(binconcrete_log_density(x, unit), 0.0, 1e-12);
  EXPECT_NEAR(binconcrete_log_density(1e-300, unit), 0.0, 1e-12);
  EXPECT_NEAR(binconcrete_log_density(1.0 - 1e-15, unit), 0.0, 1e-12);
}

TEST(BinConcreteLogDensityTest, ReflectionSymmetry) {
  for (const double log_alpha : {-2.0, 0.3, 1.5}) {
    for (const double lambda : kLambdas) {
      for (const double x : {0.01, 0.2, 0.5, 0.77, 0.999}) {
        EXPECT_NEAR(binconcrete_log_density(x, BinConcreteParams(log_alpha, lambda)),
                    binconcrete_log_density(1.0 - x, BinConcreteParams(-log_alpha, lambda)), 1e-9);
      }
    }
  }
}

TEST(BinConcreteLogDensityTest, NormalizesByQuadrature) {
  for (const double alpha : {0.5, 2.0}) {
    for (const double lambda : {1.0, 0.2}) {
      EXPECT_NEAR(testing::binconcrete_mass(BinConcreteParams(std::log(alpha), lambda)), 1.0, 1e-6)
          << "alpha = " << alpha << " lambda = " << lambda;
    }
  }
}

TEST(BinConcreteLogDensityTest, FiniteAtExtremeArguments) {
  const BinConcreteParams cold(0.7, 0.05);
  for (const double x : {1e-300, 1e-20, 0.5, 1.0 - 1e-16}) EXPECT_TRUE(std::isfinite(binconcrete_log_density(x, cold)));
  for (const double u : {-1e4, -50.0, 0.0, 80.0, 1e4}) {
    EXPECT_TRUE(std::isfinite(binconcrete_log_density_logit(u, cold)));
  }
}

TEST(BinConcreteLogDensityTest, RejectsPointsOutsideSupport) {
  const BinConcreteParams params(0.0, 1.0);
  EXPECT_THROW(binconcrete_log_density(0.0, params), ValidationError);
  EXPECT_THROW(binconcrete_log_density(1.0, params), ValidationError);
  EXPECT_THROW(binconcrete_log_density(-0.2, params), ValidationError);
}

TEST(DiscretizeTest, Threshold) {
  EXPECT_EQ(discretize(0.9), TransitionAction::kEmit);
  EXPECT_EQ(discretize(0.1), TransitionAction::kShift);
  EXPECT_EQ(discretize(0.5), TransitionAction::kEmit);
}

TEST(DiscretizeTest, SameLawAsBernoulliForEveryTemperature) {
  const double critical = testing::chi_squared_critical(1.0, 0.001);
  const double log_alpha = std::log(3.0);
  NoiseSource bernoulli_noise(9);
  int bernoulli_emits = 0;
  for (int k = 0; k < kDraws; ++k) bernoulli_emits += sample_bernoulli(log_alpha, bernoulli_noise) == TransitionAction::kEmit;
  for (const double lambda : kLambdas) {
    NoiseSource noise(derive_seed(10, "discretize", static_cast<std::uint64_t>(lambda * 1000)));
    int emits = 0;
    for (int k = 0; k < kDraws; ++k) {
      emits += discretize(binconcrete_sample(BinConcreteParams(log_alpha, lambda), noise)) == TransitionAction::kEmit;
    }
    EXPECT_NEAR(static_cast<double>(emits) / kDraws, 0.75, 3.0 * binomial_sigma(0.75, kDraws));
    EXPECT_LT(testing::chi_squared_2x2(emits, kDraws, bernoulli_emits, kDraws), critical) << "lambda = " << lambda;
  }
}

TEST(BinConcreteGradTest, PinnedValues) {
  EXPECT_DOUBLE_EQ(binconcrete_sample_grad(BinConcreteParams(0.0, 1.0), 0.0), 0.25);
  EXPECT_DOUBLE_EQ(binconcrete_sample_grad(BinConcreteParams(0.0, 0.2), 0.0), 1.25);
}

TEST(BinConcreteGradTest, MatchesCentralFiniteDifference) {
  NoiseSource noise(11);
  constexpr double kStep = 1e-5;
  for (int k = 0; k < 50; ++k) {
    const double lambda = 0.05 + 0.95 * noise.uniform();
    const double log_alpha = -3.0 + 6.0 * noise.uniform();
    // Keep the pre-sigmoid value in |u| <= 4 so the sample is not saturated.
    const double u = -4.0 + 8.0 * noise.uniform();
    const double logistic_noise = lambda * u - log_alpha;
    const double forward = binconcrete_from_logistic(BinConcreteParams(log_alpha + kStep, lambda), logistic_noise);
    const double backward = binconcrete_from_logistic(BinConcreteParams(log_alpha - kStep, lambda), logistic_noise);
    const double numeric = (forward - backward) / (2.0 * kStep);
    const double analytic = binconcrete_sample_grad(BinConcreteParams(log_alpha, lambda), logistic_noise);
    EXPECT_LE(std::abs(numeric - analytic) / std::abs(analytic), 1e-5)
        << "lambda = " << lambda << " log_alpha = " << log_alpha << " L = " << logistic_noise;
  }
}

}  // namespace
}  // namespace hardalign
