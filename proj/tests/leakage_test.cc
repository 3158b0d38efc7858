// Copyright 2026 The WPIR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wpir/leakage.h"

#include <cmath>
#include <limits>
#include <random>

#include "gtest/gtest.h"
#include "test_util.h"
#include "wpir/errors.h"
#include "wpir/optimizer.h"
#include "wpir/protocol.h"

namespace wpir {
namespace {

const double kInf = std::numeric_limits<double>::infinity();

std::vector<double> DirectOnly(int n, int64_t m) {
  std::vector<double> p(m, 0.0);
  for (int i = 0; i < n; ++i) p[i] = 1.0 / n;
  return p;
}

std::vector<double> RandomSimplex(std::mt19937_64& rng, int m) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(m);
  double total = 0.0;
  for (auto& x : p) total += (x = e(rng));
  for (auto& x : p) x /= total;
  return p;
}

TEST(DistributionTest, Validates) {
  EXPECT_THROW(Distribution::FromProbabilities({0.5, 0.6}), ParameterError);
  EXPECT_THROW(Distribution::FromProbabilities({1.5, -0.5}), ParameterError);
  EXPECT_THROW(Distribution::FromProbabilities({NAN, 1.0}), ParameterError);
  EXPECT_THROW(Distribution::FromProbabilities({}), ParameterError);
  EXPECT_NO_THROW(Distribution::FromProbabilities({0.25, 0.75}));
}

TEST(RenyiOrderTest, RejectsInvalidAlpha) {
  EXPECT_THROW(RenyiOrder::Finite(0.0), ParameterError);
  EXPECT_THROW(RenyiOrder::Finite(-1.0), ParameterError);
  EXPECT_THROW(RenyiOrder::Finite(1.0), ParameterError);
  EXPECT_THROW(RenyiOrder::Finite(kInf), ParameterError);
  EXPECT_EQ(RenyiOrder::FromAlpha(1.0).kind(), RenyiOrder::Kind::kKl);
  EXPECT_EQ(RenyiOrder::FromAlpha(kInf).kind(), RenyiOrder::Kind::kMax);
}

TEST(RenyiOrderTest, ParsesText) {
  EXPECT_EQ(RenyiOrder::Parse("inf"), RenyiOrder::Max());
  EXPECT_EQ(RenyiOrder::Parse("max"), RenyiOrder::Max());
  EXPECT_EQ(RenyiOrder::Parse("kl"), RenyiOrder::Kl());
  EXPECT_EQ(RenyiOrder::Parse("1"), RenyiOrder::Kl());
  EXPECT_EQ(RenyiOrder::Parse("0.5"), RenyiOrder::Finite(0.5));
  EXPECT_EQ(RenyiOrder::Parse("2").ToString(), "2");
  EXPECT_THROW(RenyiOrder::Parse("two"), ParameterError);
}

TEST(RenyiDivergenceTest, ZeroAtIdentity) {
  const auto u = Distribution::Uniform(7);
  for (double a : {0.3, 1.0, 2.0, kInf}) {
    EXPECT_EQ(RenyiDivergence(u, u, RenyiOrder::FromAlpha(a)), 0.0);
  }
}

TEST(RenyiDivergenceTest, HalfHalfAgainstUniformFour) {
  const auto p = Distribution::FromProbabilities({0.5, 0.5, 0.0, 0.0});
  // (1/4 + 1/4) / (1/4) = 2 inside the log.
  EXPECT_NEAR(RenyiDivergence(p, Distribution::Uniform(4),
                              RenyiOrder::Finite(2.0)),
              std::log(2.0), 1e-15);
}

TEST(RenyiDivergenceTest, DirectDownloadsAgainstUniformNine) {
  const auto p = Distribution::FromProbabilities(DirectOnly(3, 9));
  for (double a : {0.5, 1.0, 2.0, 5.0, kInf}) {
    EXPECT_NEAR(RenyiDivergence(p, Distribution::Uniform(9),
                                RenyiOrder::FromAlpha(a)),
                1.0986122886681098, 1e-12)
        << a;
  }
}

TEST(RenyiDivergenceTest, SupportViolation) {
  const std::vector<double> p{0.5, 0.5};
  const std::vector<double> u{1.0, 0.0};
  for (double a : {1.0, 2.0, kInf}) {
    const auto order = RenyiOrder::FromAlpha(a);
    EXPECT_THROW(RenyiDivergence(p, u, order), DivergenceUndefinedError);
    EXPECT_EQ(RenyiDivergence(p, u, order, SupportPolicy::kExtended), kInf);
  }
  // Below one the sum simply drops the uncovered mass.
  EXPECT_NEAR(RenyiDivergence(p, u, RenyiOrder::Finite(0.5)), std::log(2.0),
              1e-15);
  EXPECT_THROW(RenyiDivergence(std::vector<double>{1.0},
                               std::vector<double>{0.5, 0.5},
                               RenyiOrder::Kl()),
               ParameterError);
}

TEST(RenyiDivergenceTest, NonnegativeAndZeroOnlyAtIdentity) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 200; ++t) {
    const int m = 2 + t % 9;
    const auto p = RandomSimplex(rng, m);
    const auto u = RandomSimplex(rng, m);
    for (double a : {0.25, 0.5, 1.0, 2.0, 5.0, kInf}) {
      const auto order = RenyiOrder::FromAlpha(a);
      EXPECT_GT(RenyiDivergence(p, u, order), 0.0);
      EXPECT_EQ(RenyiDivergence(p, p, order), 0.0);
    }
  }
}

TEST(RenyiDivergenceTest, MonotoneInOrderAndContinuousAtOne) {
  std::mt19937_64 rng(5);
  const double alphas[] = {0.25, 0.5, 0.9, 0.999, 1.0, 1.001, 1.1, 2, 5, 20};
  for (int t = 0; t < 200; ++t) {
    const int m = 2 + t % 12;
    const auto p = RandomSimplex(rng, m);
    const auto u = RandomSimplex(rng, m);
    double prev = 0.0;
    for (double a : alphas) {
      const double d = RenyiDivergence(p, u, RenyiOrder::FromAlpha(a));
      EXPECT_GE(d, prev - 1e-12) << "alpha " << a;
      prev = d;
    }
    const double top = RenyiDivergence(p, u, RenyiOrder::Max());
    EXPECT_GE(top, prev - 1e-12);
    // (a - 1) D_a is the cumulant generating function of log(p/u) under
    // p, so near one D_a = k1 + t k2 / 2 + t^2 k3 / 6 + O(t^3).
    const double kl = RenyiDivergence(p, u, RenyiOrder::Kl());
    double k2 = 0.0;
    double k3 = 0.0;
    for (int i = 0; i < m; ++i) {
      const double r = std::log(p[i] / u[i]) - kl;
      k2 += p[i] * r * r;
      k3 += p[i] * r * r * r;
    }
    for (double a : {0.999, 1.001}) {
      const double t = a - 1.0;
      EXPECT_NEAR(RenyiDivergence(p, u, RenyiOrder::Finite(a)),
                  kl + t * k2 / 2 + t * t * k3 / 6, 1e-7);
    }
  }
}

// Inside the |alpha - 1| < 1e-6 band the result must still track the
// direct formula evaluated just outside it.
TEST(RenyiDivergenceTest, NearOneBandIsSmooth) {
  std::mt19937_64 rng(8);
  const auto p = RandomSimplex(rng, 6);
  const auto u = RandomSimplex(rng, 6);
  const double kl = RenyiDivergence(p, u, RenyiOrder::Kl());
  const double above = RenyiDivergence(p, u, RenyiOrder::Finite(1 + 2e-6));
  const double inside = RenyiDivergence(p, u, RenyiOrder::Finite(1 + 5e-7));
  EXPECT_LE(kl, inside + 1e-12);
  EXPECT_LE(inside, above + 1e-9);
  EXPECT_NEAR(inside, kl + 0.25 * (above - kl), 1e-9);
}

TEST(RenyiEntropyTest, UniformIsLogM) {
  const auto u = Distribution::Uniform(6);
  for (double a : {0.5, 1.0, 3.0, kInf}) {
    EXPECT_NEAR(RenyiEntropy(u.probs(), RenyiOrder::FromAlpha(a)),
                std::log(6.0), 1e-14);
  }
}

TEST(NormalizedRenyiTest, Examples) {
  const auto u9 = Distribution::Uniform(9);
  EXPECT_EQ(NormalizedRenyi(u9, u9, RenyiOrder::Kl()), 0.0);
  const auto p9 = Distribution::FromProbabilities(DirectOnly(3, 9));
  for (double a : {0.5, 1.0, 2.0, kInf}) {
    EXPECT_NEAR(NormalizedRenyi(p9, u9, RenyiOrder::FromAlpha(a)), 0.5, 1e-12);
  }
  const auto p6 = Distribution::FromProbabilities(DirectOnly(3, 6));
  EXPECT_NEAR(NormalizedRenyi(p6, Distribution::Uniform(6), RenyiOrder::Kl()),
              std::log(2.0) / std::log(6.0), 1e-12);
  const auto one = Distribution::Uniform(1);
  EXPECT_THROW(NormalizedRenyi(one, one, RenyiOrder::Kl()), NormalizationError);
}

class ThetaMetricsTest : public ::testing::Test {
 protected:
  std::vector<QueryStructure> tsc_ = BuildAllStructures(SchemeParams::Tsc(3, 2));
  Distribution direct_ = Distribution::FromProbabilities(DirectOnly(3, 9));
  Distribution uniform_prior_ = Distribution::Uniform(2);
};

// DB 1 column of the symmetric N=3, K=2 table, theta = 1 versus 2: the
// empty query carries 1/3 under both, and four single-symbol queries carry
// 1/3 under exactly one index each, so sum_q max_k = 5/3.
TEST_F(ThetaMetricsTest, MaximalLeakageOfDirectDownloads) {
  EXPECT_NEAR(MaximalLeakage(tsc_, direct_, 0), std::log(5.0 / 3.0), 1e-14);
}

TEST_F(ThetaMetricsTest, EpsPrivacyInfiniteForDirectDownloads) {
  EXPECT_EQ(EpsPrivacy(tsc_, direct_, 0), kInf);
}

// Only the empty query (mass 1/3) is shared, so H(theta | Q) = (1/3) log 2.
TEST_F(ThetaMetricsTest, MutualInformationOfDirectDownloads) {
  EXPECT_NEAR(MutualInformationLeakage(tsc_, direct_, 0, uniform_prior_),
              (2.0 / 3.0) * std::log(2.0), 1e-14);
}

// At D = 1.2 the direct options carry 1/5 and masked ones 1/15; a single
// symbol of the desired message is 3x likelier than under the other index.
TEST_F(ThetaMetricsTest, EpsPrivacyOfOptimumAtOnePointTwo) {
  const auto dist = OptimalDistribution(CostProfile::FromParams(tsc_[0].params),
                                        1.2, RenyiOrder::Kl())
                        .distribution;
  for (int db = 0; db < 3; ++db) {
    EXPECT_NEAR(EpsPrivacy(tsc_, dist, db), std::log(3.0), 1e-12);
  }
}

TEST_F(ThetaMetricsTest, ZeroUnderUniform) {
  for (const auto& params : testing_util::Grid(4, 3)) {
    const auto s = BuildAllStructures(params);
    const auto u = Distribution::Uniform(s[0].size());
    const auto prior = Distribution::Uniform(params.n_messages);
    for (int db = 0; db < params.n_databases; ++db) {
      EXPECT_NEAR(MaximalLeakage(s, u, db), 0.0, 1e-12);
      EXPECT_NEAR(EpsPrivacy(s, u, db), 0.0, 1e-12);
      EXPECT_NEAR(MutualInformationLeakage(s, u, db, prior), 0.0, 1e-12);
    }
  }
}

TEST(ThetaMetricsSingleMessageTest, ZeroForOneMessage) {
  const auto s = BuildAllStructures(SchemeParams::Tsc(3, 1));
  const auto point = Distribution::PointMass(3, 0);
  EXPECT_EQ(MaximalLeakage(s, point, 0), 0.0);
  EXPECT_EQ(MutualInformationLeakage(s, point, 0, Distribution::Uniform(1)),
            0.0);
}

// The three metrics vanish together, and maximal leakage never exceeds
// log K, across random distributions on the grid.
TEST(ThetaMetricsPropertyTest, ZeroTogetherAndBounded) {
  std::mt19937_64 rng(13);
  for (const auto& params : testing_util::Grid(4, 3)) {
    const auto s = BuildAllStructures(params);
    const auto prior = Distribution::Uniform(params.n_messages);
    const int m = static_cast<int>(s[0].size());
    for (int t = 0; t < 4; ++t) {
      std::vector<double> p = RandomSimplex(rng, m);
      if (t == 0) p.assign(m, 1.0 / m);
      const auto dist = Distribution::FromProbabilities(p);
      for (int db = 0; db < params.n_databases; ++db) {
        const double ml = MaximalLeakage(s, dist, db);
        const double eps = EpsPrivacy(s, dist, db);
        const double mi = MutualInformationLeakage(s, dist, db, prior);
        EXPECT_LE(ml, std::log(params.n_messages) + 1e-12);
        const bool ml0 = ml < 1e-12;
        EXPECT_EQ(ml0, eps < 1e-12);
        EXPECT_EQ(ml0, mi < 1e-12);
      }
    }
  }
}

TEST(ThetaMetricsTest2, RejectsMismatchedStructures) {
  std::vector<QueryStructure> mixed{
      BuildStructure(SchemeParams::Tsc(3, 2), 1),
      BuildStructure(SchemeParams::Alternative(3, 2, 1), 2)};
  EXPECT_THROW(MaximalLeakage(mixed, Distribution::Uniform(9), 0),
               ParameterError);
}

TEST(EmpiricalDistributionTest, Normalizes) {
  const std::vector<int64_t> a{1, 1, 1, 1};
  const std::vector<int64_t> b{9, 0, 0};
  const std::vector<int64_t> c{2, 3, 5};
  const auto quarters = EmpiricalDistribution(a);
  EXPECT_EQ(std::vector<double>(quarters.probs().begin(),
                                quarters.probs().end()),
            (std::vector<double>{0.25, 0.25, 0.25, 0.25}));
  EXPECT_EQ(EmpiricalDistribution(b)[0], 1.0);
  EXPECT_DOUBLE_EQ(EmpiricalDistribution(c)[0], 0.2);
  EXPECT_DOUBLE_EQ(EmpiricalDistribution(c)[1], 0.3);
  EXPECT_DOUBLE_EQ(EmpiricalDistribution(c)[2], 0.5);
  const std::vector<int64_t> zero{0, 0};
  EXPECT_THROW(EmpiricalDistribution(zero), ParameterError);
}

TEST(EmpiricalDistributionTest, ConvergesAtOneMillionSamples) {
  const auto target = OptimalDistribution(
                          CostProfile::FromParams(SchemeParams::Tsc(3, 2)),
                          7.0 / 6.0, RenyiOrder::Kl())
                          .distribution;
  CategoricalSampler sampler(target);
  std::vector<int64_t> counts(target.size(), 0);
  for (uint64_t t = 0; t < 1'000'000; ++t) {
    ++counts[sampler.Sample(SplitMix64::ForTrial(2024, t).NextDouble())];
  }
  EXPECT_LE(TotalVariation(EmpiricalDistribution(counts).probs(),
                           target.probs()),
            0.01);
}

}  // namespace
}  // namespace wpir
