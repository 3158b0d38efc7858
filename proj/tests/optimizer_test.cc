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

#include "wpir/optimizer.h"

#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "gtest/gtest.h"
#include "test_util.h"
#include "wpir/errors.h"

namespace wpir {
namespace {

const double kInf = std::numeric_limits<double>::infinity();
const double kLog3 = 1.0986122886681098;

CostProfile Tsc32() { return CostProfile::FromParams(SchemeParams::Tsc(3, 2)); }
CostProfile Alt321() {
  return CostProfile::FromParams(SchemeParams::Alternative(3, 2, 1));
}

std::vector<RenyiOrder> AllOrders() {
  return {RenyiOrder::Finite(0.5), RenyiOrder::Kl(), RenyiOrder::Finite(2.0),
          RenyiOrder::Finite(5.0), RenyiOrder::Max()};
}

TEST(CostProfileTest, Layout) {
  const auto p = Tsc32();
  EXPECT_EQ(p.size(), 9);
  EXPECT_EQ(p.n_low(), 3);
  EXPECT_EQ(p.n_high(), 6);
  EXPECT_EQ(p.low_cost(), 2);
  EXPECT_EQ(p.high_cost(), 3);
  EXPECT_EQ(p.message_len(), 2);
  EXPECT_THROW(CostProfile::FromCosts({2, 3, 2}, 2, 1), ParameterError);
  EXPECT_THROW(CostProfile::FromCosts({2, 4}, 2, 1), ParameterError);
  EXPECT_THROW(CostProfile::FromCosts({2, 2, 3}, 2, 1), ParameterError);
  EXPECT_NO_THROW(CostProfile::FromCosts({2, 2, 3}, 2, 2));
}

TEST(CapacityTest, Values) {
  EXPECT_NEAR(Capacity(3, 2), 0.75, 1e-15);
  EXPECT_NEAR(Capacity(4, 2), 0.8, 1e-15);
  for (int n = 2; n <= 6; ++n) EXPECT_EQ(Capacity(n, 1), 1.0);
  EXPECT_THROW(Capacity(1, 2), ParameterError);
}

TEST(PerfectPrivacyCostTest, Values) {
  EXPECT_NEAR(PerfectPrivacyCost(Tsc32()), 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(PerfectPrivacyCost(Alt321()), 1.5, 1e-15);
  EXPECT_NEAR(PerfectPrivacyCost(CostProfile::FromParams(
                  SchemeParams::Alternative(4, 2, 2))),
              4.0 / 3.0, 1e-15);
}

TEST(PerfectPrivacyCostTest, TscIsReciprocalCapacityAndAltFormula) {
  for (const auto& params : testing_util::Grid(5, 4)) {
    const auto profile = CostProfile::FromParams(params);
    const double got = PerfectPrivacyCost(profile);
    if (params.kind == SchemeKind::kTsc) {
      EXPECT_NEAR(got, 1.0 / Capacity(params.n_databases, params.n_messages),
                  1e-12);
    } else {
      const double m = static_cast<double>(profile.size());
      EXPECT_NEAR(got,
                  1.0 + (m - params.n_databases) / (params.message_len * m),
                  1e-12);
    }
  }
}

TEST(FeasibleCostRangeTest, Values) {
  auto r = FeasibleCostRange(Tsc32(), RangeMode::kTheorem);
  EXPECT_EQ(r.lo, 1.0);
  EXPECT_NEAR(r.hi, 4.0 / 3.0, 1e-15);
  r = FeasibleCostRange(Tsc32(), RangeMode::kSimplex);
  EXPECT_EQ(r.lo, 1.0);
  EXPECT_EQ(r.hi, 1.5);
  r = FeasibleCostRange(Alt321(), RangeMode::kTheorem);
  EXPECT_EQ(r.lo, 1.0);
  EXPECT_NEAR(r.hi, 1.5, 1e-15);
}

TEST(OptimalDistributionTest, Endpoints) {
  const auto uniform = OptimalDistribution(Tsc32(), 4.0 / 3.0, RenyiOrder::Kl());
  for (double p : uniform.distribution.probs()) EXPECT_NEAR(p, 1.0 / 9, 1e-15);
  const auto direct = OptimalDistribution(Tsc32(), 1.0, RenyiOrder::Kl());
  for (int m = 0; m < 9; ++m) {
    EXPECT_NEAR(direct.distribution[m], m < 3 ? 1.0 / 3 : 0.0, 1e-15);
  }
}

TEST(OptimalDistributionTest, TscAtSevenSixths) {
  const auto d = OptimalDistribution(Tsc32(), 7.0 / 6.0, RenyiOrder::Finite(2));
  for (int m = 0; m < 9; ++m) {
    EXPECT_NEAR(d.distribution[m], m < 3 ? 2.0 / 9 : 1.0 / 18, 1e-15);
  }
  EXPECT_NEAR(ExpectedCost(Tsc32(), d.distribution.probs()), 7.0 / 6.0, 1e-15);
  EXPECT_FALSE(d.non_unique);
}

TEST(OptimalDistributionTest, AlternativeAtFiveQuarters) {
  const auto d = OptimalDistribution(Alt321(), 1.25, RenyiOrder::Kl());
  for (int m = 0; m < 6; ++m) {
    EXPECT_NEAR(d.distribution[m], m < 3 ? 0.25 : 1.0 / 12, 1e-15);
  }
}

TEST(OptimalDistributionTest, MaxOrderFlagsNonUnique) {
  const auto d = OptimalDistribution(Tsc32(), 7.0 / 6.0, RenyiOrder::Max());
  EXPECT_TRUE(d.non_unique);
  EXPECT_NEAR(d.distribution[0], 2.0 / 9, 1e-15);
}

TEST(OptimalDistributionTest, RejectsOutOfRange) {
  EXPECT_THROW(OptimalDistribution(Tsc32(), 0.99, RenyiOrder::Kl()),
               DomainError);
  EXPECT_THROW(OptimalDistribution(Tsc32(), 1.4, RenyiOrder::Kl()),
               DomainError);
  EXPECT_THROW(TradeoffLeakage(Tsc32(), 1.4, RenyiOrder::Kl()), DomainError);
}

TEST(TradeoffLeakageTest, Endpoints) {
  for (const auto& order : AllOrders()) {
    EXPECT_NEAR(TradeoffLeakage(Tsc32(), 1.0, order), kLog3, 1e-12);
    EXPECT_NEAR(TradeoffLeakage(Tsc32(), 4.0 / 3.0, order), 0.0, 1e-12);
    EXPECT_NEAR(TradeoffLeakage(Alt321(), 1.0, order), std::log(2.0), 1e-12);
    EXPECT_NEAR(TradeoffLeakage(Alt321(), 1.5, order), 0.0, 1e-12);
  }
}

TEST(TradeoffLeakageTest, EndpointLawsOnGrid) {
  for (const auto& params : testing_util::Grid(4, 3)) {
    const auto profile = CostProfile::FromParams(params);
    const double log_m_over_n =
        std::log(static_cast<double>(profile.size()) / params.n_databases);
    for (const auto& order : AllOrders()) {
      EXPECT_NEAR(TradeoffLeakage(profile, 1.0, order), log_m_over_n, 1e-12);
      EXPECT_NEAR(TradeoffLeakage(profile, PerfectPrivacyCost(profile), order),
                  0.0, 1e-12);
    }
  }
}

// The closed form must agree with the divergence of the closed-form
// distribution, which goes through a separate code path.
TEST(TradeoffLeakageTest, MatchesDivergenceOfOptimum) {
  for (const auto& params : testing_util::Grid(4, 3)) {
    const auto profile = CostProfile::FromParams(params);
    const auto range = FeasibleCostRange(profile, RangeMode::kTheorem);
    const auto uniform = Distribution::Uniform(profile.size());
    for (double D : testing_util::Linspace(range.lo, range.hi, 20)) {
      for (const auto& order : AllOrders()) {
        const auto p = OptimalDistribution(profile, D, order).distribution;
        EXPECT_NEAR(TradeoffLeakage(profile, D, order),
                    RenyiDivergence(p, uniform, order), 1e-9);
      }
    }
  }
}

TEST(TradeoffLeakageTest, StrictlyDecreasingInD) {
  for (const auto& params : testing_util::Grid(4, 3)) {
    if (params.n_messages == 1) continue;
    const auto profile = CostProfile::FromParams(params);
    const auto range = FeasibleCostRange(profile, RangeMode::kTheorem);
    for (const auto& order : AllOrders()) {
      double prev = kInf;
      for (double D : testing_util::Linspace(range.lo, range.hi, 50)) {
        const double v = TradeoffLeakage(profile, D, order);
        EXPECT_LT(v, prev);
        prev = v;
      }
    }
  }
}

TEST(ProjectOntoCostSliceTest, FeasibleAndIdempotent) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> noise(0.0, 0.2);
  const auto profile = CostProfile::FromParams(SchemeParams::Tsc(4, 3));
  const std::vector<double> c(profile.costs().begin(), profile.costs().end());
  for (int t = 0; t < 200; ++t) {
    const double target = 3.0 + std::uniform_real_distribution<>(0, 1)(rng);
    std::vector<double> y(c.size());
    for (auto& x : y) x = 1.0 / 64 + noise(rng);
    const auto p = ProjectOntoCostSlice(y, c, target);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
    EXPECT_NEAR(std::inner_product(p.begin(), p.end(), c.begin(), 0.0), target,
                1e-12);
    for (double x : p) EXPECT_GE(x, 0.0);
    const auto q = ProjectOntoCostSlice(p, c, target);
    for (size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(p[i], q[i], 1e-12);
  }
  EXPECT_THROW(ProjectOntoCostSlice(std::vector<double>{0.5, 0.5},
                                    std::vector<double>{2, 3}, 3.5),
               DomainError);
}

TEST(NumericOracleTest, TscAtSevenSixthsOrderTwo) {
  const auto r = NumericOracle(Tsc32(), 7.0 / 6.0, RenyiOrder::Finite(2));
  for (int m = 0; m < 9; ++m) {
    EXPECT_NEAR(r.distribution[m], m < 3 ? 2.0 / 9 : 1.0 / 18, 1e-6);
  }
}

TEST(NumericOracleTest, UniformAtPerfectPrivacy) {
  const auto r = NumericOracle(Tsc32(), 4.0 / 3.0, RenyiOrder::Kl());
  for (double p : r.distribution.probs()) EXPECT_NEAR(p, 1.0 / 9, 1e-6);
}

TEST(NumericOracleTest, AlternativeFourTwoTwoOrderHalf) {
  const auto profile =
      CostProfile::FromParams(SchemeParams::Alternative(4, 2, 2));
  const auto order = RenyiOrder::Finite(0.5);
  const auto r = NumericOracle(profile, 7.0 / 6.0, order);
  EXPECT_NEAR(r.objective, TradeoffLeakage(profile, 7.0 / 6.0, order), 1e-6);
}

TEST(NumericOracleTest, MaxOrderMatchesObjectiveAndSlackness) {
  for (const auto& params : testing_util::Grid(4, 3)) {
    const auto profile = CostProfile::FromParams(params);
    const auto range = FeasibleCostRange(profile, RangeMode::kTheorem);
    for (double D : testing_util::Linspace(range.lo, range.hi, 7)) {
      const auto r = NumericOracle(profile, D, RenyiOrder::Max());
      EXPECT_NEAR(r.objective, TradeoffLeakage(profile, D, RenyiOrder::Max()),
                  1e-6);
      const auto kkt =
          KktCheck(profile, r.distribution.probs(), D, RenyiOrder::Max());
      EXPECT_LT(kkt.slackness_residual, 1e-9);
      EXPECT_TRUE(kkt.feasible);
    }
  }
}

// Beyond the perfect-privacy cost the optimum is no longer two-level
// around the direct options; the oracle must still return a feasible point.
TEST(NumericOracleTest, SimplexRangeBeyondTheorem) {
  const auto profile = Tsc32();
  const auto r = NumericOracle(profile, 1.45, RenyiOrder::Kl());
  EXPECT_NEAR(ExpectedCost(profile, r.distribution.probs()), 1.45, 1e-12);
  EXPECT_THROW(NumericOracle(profile, 1.6, RenyiOrder::Kl()), DomainError);
}

TEST(NumericOracleTest, RestartsAgree) {
  OracleConfig config;
  config.restarts = 3;
  config.seed = 99;
  const auto r = NumericOracle(Tsc32(), 1.1, RenyiOrder::Finite(5), config);
  const auto closed = OptimalDistribution(Tsc32(), 1.1, RenyiOrder::Finite(5));
  for (int m = 0; m < 9; ++m) {
    EXPECT_NEAR(r.distribution[m], closed.distribution[m], 1e-5);
  }
}

TEST(NumericOracleTest, ConvergenceErrorCarriesIterate) {
  OracleConfig config;
  config.max_iterations = 1;
  config.tolerance = 0.0;
  try {
    NumericOracle(CostProfile::FromParams(SchemeParams::Tsc(4, 3)), 1.1,
                  RenyiOrder::Finite(2), config);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.last_iterate().size(), 64u);
    EXPECT_GT(e.step_residual(), 0.0);
  }
}

TEST(KktCheckTest, ClosedFormOnGrid) {
  for (const auto& params : testing_util::Grid(4, 3)) {
    const auto profile = CostProfile::FromParams(params);
    const auto range = FeasibleCostRange(profile, RangeMode::kTheorem);
    for (double D : testing_util::Linspace(range.lo, range.hi, 20)) {
      for (const auto& order : AllOrders()) {
        const auto p = OptimalDistribution(profile, D, order).distribution;
        const auto r = KktCheck(profile, p.probs(), D, order);
        EXPECT_LT(r.MaxResidual(), 1e-9);
        EXPECT_TRUE(r.feasible);
      }
    }
  }
}

TEST(KktCheckTest, FiniteOrderSolutionLiesInMaxOrderSet) {
  const auto p = OptimalDistribution(Tsc32(), 1.2, RenyiOrder::Finite(2));
  const auto r =
      KktCheck(Tsc32(), p.distribution.probs(), 1.2, RenyiOrder::Max());
  EXPECT_TRUE(r.feasible);
  EXPECT_LT(r.slackness_residual, 1e-12);
}

// Moving mass between two masked options keeps both constraints but is not
// stationary for any finite order; for the max order it stays optimal as
// long as no masked entry rises above the direct level.
TEST(KktCheckTest, DetectsNonStationaryPoint) {
  const auto optimum =
      OptimalDistribution(Tsc32(), 1.2, RenyiOrder::Kl()).distribution;
  std::vector<double> p(optimum.probs().begin(), optimum.probs().end());
  p[3] += 0.03;
  p[4] -= 0.03;
  for (const auto& order : {RenyiOrder::Finite(0.5), RenyiOrder::Kl(),
                            RenyiOrder::Finite(2.0)}) {
    const auto r = KktCheck(Tsc32(), p, 1.2, order);
    EXPECT_GT(r.stationarity_residual, 1e-3);
    EXPECT_GT(r.MaxResidual(), 1e-3);
    // Still primal feasible: the shift keeps cost and normalization.
    EXPECT_TRUE(r.feasible);
  }
  EXPECT_TRUE(KktCheck(Tsc32(), p, 1.2, RenyiOrder::Max()).feasible);
  p[3] += 0.2;
  p[0] -= 0.1;
  p[1] -= 0.1;
  EXPECT_THROW(KktCheck(Tsc32(), p, 1.2, RenyiOrder::Max()), InfeasibleError);
}

TEST(KktCheckTest, MaxOrderSlacknessViolation) {
  // Feasible, but one masked option sits above the direct-option level.
  std::vector<double> p{0.2, 0.2, 0.2, 0.3, 0.1, 0, 0, 0, 0};
  const auto r = KktCheck(Tsc32(), p, 1.2, RenyiOrder::Max());
  EXPECT_NEAR(r.cost_residual, 0.0, 1e-15);
  EXPECT_GT(r.slackness_residual, 0.05);
  EXPECT_FALSE(r.feasible);
}

TEST(KktCheckTest, RejectsInfeasibleInput) {
  EXPECT_THROW(KktCheck(Tsc32(), std::vector<double>(8, 0.125), 1.2,
                        RenyiOrder::Kl()),
               InfeasibleError);
  EXPECT_THROW(KktCheck(Tsc32(), std::vector<double>(9, 1.0 / 9), 1.2,
                        RenyiOrder::Kl()),
               InfeasibleError);
}

TEST(SweepTradeoffTest, EndpointsAndSpacing) {
  const std::vector<RenyiOrder> orders{RenyiOrder::Kl(), RenyiOrder::Max()};
  const auto sweep = SweepTradeoff(SchemeParams::Tsc(3, 2), orders, 5, true);
  ASSERT_EQ(sweep.size(), 10u);
  EXPECT_EQ(sweep.front().download_cost, 1.0);
  EXPECT_NEAR(sweep.front().leakage, kLog3, 1e-12);
  EXPECT_NEAR(sweep.front().normalized_leakage, 0.5, 1e-12);
  EXPECT_NEAR(sweep[4].download_cost, 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(sweep[4].leakage, 0.0, 1e-12);
  EXPECT_NEAR(*sweep[4].maximal_leakage, 0.0, 1e-12);
  EXPECT_NEAR(sweep[1].download_cost - sweep[0].download_cost, 1.0 / 12,
              1e-15);
  EXPECT_THROW(SweepTradeoff(SchemeParams::Tsc(3, 2), orders, 1),
               ParameterError);
}

TEST(DominanceTest, AlternativeLeaksLessAtDOne) {
  for (const auto& params : testing_util::Grid(5, 4)) {
    if (params.kind != SchemeKind::kAlternative || params.n_messages < 2) {
      continue;
    }
    const auto tsc = SchemeParams::Tsc(params.n_databases, params.n_messages);
    for (const auto& order : AllOrders()) {
      const double alt = OptimalLeakage(params, 1.0, order, LeakageMetric::kRenyi);
      EXPECT_NEAR(alt,
                  (params.n_messages - 1) * std::log(params.message_len + 1.0),
                  1e-12);
      EXPECT_LT(alt, OptimalLeakage(tsc, 1.0, order, LeakageMetric::kRenyi));
    }
  }
  EXPECT_LT(std::log(2.0) / std::log(6.0), kLog3 / std::log(9.0));
}

TEST(FindCrossoverTest, ThreeTwoOneUnderEveryMetric) {
  const auto alt = SchemeParams::Alternative(3, 2, 1);
  const auto tsc = SchemeParams::Tsc(3, 2);
  for (auto metric : {LeakageMetric::kRenyi, LeakageMetric::kNormalizedRenyi,
                      LeakageMetric::kMaximal}) {
    for (const auto& order : AllOrders()) {
      const auto c = FindCrossover(alt, tsc, order, metric);
      ASSERT_TRUE(c.has_value());
      EXPECT_GT(c->d_star, 1.0);
      EXPECT_LT(c->d_star, 4.0 / 3.0);
      EXPECT_EQ(c->dominance.lo, 1.0);
      EXPECT_EQ(c->dominance.hi, c->d_star);
      const double below = c->d_star - 1e-3;
      EXPECT_LT(OptimalLeakage(alt, below, order, metric),
                OptimalLeakage(tsc, below, order, metric));
      EXPECT_NEAR(OptimalLeakage(alt, c->d_star, order, metric),
                  OptimalLeakage(tsc, c->d_star, order, metric), 1e-9);
    }
  }
}

// Maximal leakage of the optimum: at D = 1 the masked options are unused,
// and the crossover sits where the alternative scheme's direct level
// drops to match the TSC one.
TEST(FindCrossoverTest, MaximalLeakageValues) {
  const auto alt = SchemeParams::Alternative(3, 2, 1);
  const auto tsc = SchemeParams::Tsc(3, 2);
  const auto kl = RenyiOrder::Kl();
  EXPECT_NEAR(OptimalLeakage(tsc, 1.0, kl, LeakageMetric::kMaximal),
              std::log(5.0 / 3.0), 1e-12);
  EXPECT_NEAR(OptimalLeakage(alt, 1.0, kl, LeakageMetric::kMaximal),
              std::log(4.0 / 3.0), 1e-12);
  EXPECT_NEAR(OptimalLeakage(tsc, 4.0 / 3.0, kl, LeakageMetric::kMaximal), 0.0,
              1e-12);
  EXPECT_NEAR(OptimalLeakage(alt, 1.5, kl, LeakageMetric::kMaximal), 0.0,
              1e-12);
}

TEST(FindCrossoverTest, ShorterMessagesWidenTheRegion) {
  const auto tsc = SchemeParams::Tsc(4, 2);
  for (const auto& order : {RenyiOrder::Kl(), RenyiOrder::Max()}) {
    const auto l1 = FindCrossover(SchemeParams::Alternative(4, 2, 1), tsc,
                                  order, LeakageMetric::kRenyi);
    const auto l2 = FindCrossover(SchemeParams::Alternative(4, 2, 2), tsc,
                                  order, LeakageMetric::kRenyi);
    ASSERT_TRUE(l1 && l2);
    EXPECT_GT(l1->d_star, l2->d_star);
  }
}

TEST(FindCrossoverTest, NoneWhenCandidateNeverWins) {
  const auto tsc = SchemeParams::Tsc(3, 2);
  EXPECT_FALSE(FindCrossover(tsc, tsc, RenyiOrder::Kl(), LeakageMetric::kRenyi)
                   .has_value());
}

}  // namespace
}  // namespace wpir
