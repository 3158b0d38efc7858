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

// Leakage/download-cost tradeoff: closed-form optimal option distributions,
// an independent numeric solver for the same problem, and KKT checks.
//
// The problem, for a scheme with per-option costs d_m and message length L:
//
//   minimize    D_alpha(P || U)
//   subject to  (1/L) sum_m p_m d_m = D,  sum_m p_m = 1,  p >= 0,
//
// with U uniform over the M options.

#ifndef WPIR_OPTIMIZER_H_
#define WPIR_OPTIMIZER_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "wpir/leakage.h"
#include "wpir/scheme.h"

namespace wpir {

// Per-option download costs of a scheme. The first n_low entries equal the
// low cost; the rest (possibly none) equal low cost + 1.
class CostProfile {
 public:
  static CostProfile FromParams(const SchemeParams& params);
  static CostProfile FromStructure(const QueryStructure& structure);
  // Throws ParameterError unless the layout above holds.
  static CostProfile FromCosts(std::vector<int> costs, int message_len,
                               int n_low);

  std::span<const int> costs() const { return costs_; }
  int message_len() const { return message_len_; }
  int n_low() const { return n_low_; }
  int64_t size() const { return static_cast<int64_t>(costs_.size()); }
  int64_t n_high() const { return size() - n_low_; }
  int low_cost() const { return costs_.front(); }
  int high_cost() const { return low_cost() + 1; }

 private:
  CostProfile(std::vector<int> costs, int message_len, int n_low)
      : costs_(std::move(costs)), message_len_(message_len), n_low_(n_low) {}

  std::vector<int> costs_;
  int message_len_;
  int n_low_;
};

struct Interval {
  double lo;
  double hi;

  bool Contains(double x, double slack = 0.0) const {
    return x >= lo - slack && x <= hi + slack;
  }
};

enum class RangeMode {
  kTheorem,  // [1, perfect-privacy cost]: where the tradeoff is stated
  kSimplex,  // [c_low / L, c_high / L]: anything a distribution can reach
};

// PIR capacity (1 + 1/N + ... + 1/N^(K-1))^-1.
double Capacity(int n_databases, int n_messages);

// Normalized download cost of the uniform distribution.
double PerfectPrivacyCost(const CostProfile& profile);

Interval FeasibleCostRange(const CostProfile& profile, RangeMode mode);

// Expected normalized download cost (1/L) sum_m p_m d_m.
double ExpectedCost(const CostProfile& profile, std::span<const double> p);

struct OptimalSolution {
  Distribution distribution;
  // Set for the alpha -> infinity order, whose optimum is a set; the
  // returned member is the two-level solution shared with finite orders.
  bool non_unique = false;
};

// Two-level optimum: (1 - mass)/N on each direct option and mass/(M - N) on
// each masked option, with mass = L(D - 1). Throws DomainError when D is
// outside the theorem-mode range.
OptimalSolution OptimalDistribution(const CostProfile& profile, double D,
                                    const RenyiOrder& order);

// Closed-form optimal leakage at cost D.
double TradeoffLeakage(const CostProfile& profile, double D,
                       const RenyiOrder& order);

struct OracleConfig {
  int max_iterations = 1'000'000;
  // Stop once max_m |p_m - proj(p - grad)_m| falls below this.
  double tolerance = 1e-13;
  // First trial step; later steps follow the Barzilai-Borwein rule.
  double initial_step = 1e-2;
  // Width of the nonmonotone line-search window.
  int line_search_memory = 10;
  // Extra runs from randomly perturbed starting points; the best result is
  // kept. Zero gives a single deterministic run.
  int restarts = 0;
  uint64_t seed = 0;
};

struct OracleResult {
  Distribution distribution;
  double objective;  // D_alpha(P || U) of `distribution`
  int iterations;
  double residual;   // final projected-gradient residual (0 for max order)
};

// Minimizes the leakage over {p >= 0, sum p = 1, cost(p) = D} by spectral
// projected gradient descent; the max order is solved through its epigraph
// form by bisection on the level t with p_m <= t. Uses only the cost
// vector, not the two-level shape of the closed form. Throws DomainError
// when D is outside the simplex-mode range and ConvergenceError when the
// iteration cap is hit.
OracleResult NumericOracle(const CostProfile& profile, double D,
                           const RenyiOrder& order,
                           const OracleConfig& config = {});

// Euclidean projection of `y` onto {p >= 0, sum p = 1, sum c_m p_m = target}.
// Exposed for tests.
std::vector<double> ProjectOntoCostSlice(std::span<const double> y,
                                         std::span<const double> c,
                                         double target);

struct KktReport {
  double stationarity_residual = 0.0;
  double cost_residual = 0.0;           // |(1/L) sum p_m d_m - D|
  double normalization_residual = 0.0;  // |sum p_m - 1|
  double slackness_residual = 0.0;      // max order only
  double lambda = 0.0;  // multiplier of the cost constraint
  double nu = 0.0;      // multiplier of the normalization constraint
  // Primal feasibility within 1e-9. For the max order it also requires
  // slackness, i.e. membership in the optimal set.
  bool feasible = false;

  double MaxResidual() const;
};

// Finite orders and KL: fits (lambda, nu) from the stationarity equations
// of the two cost levels and reports the worst coordinate residual.
// Max order: checks membership in the optimal set, i.e. direct options at
// level t = (1 - mass)/N, masked options summing to the mass and none above
// t. Throws InfeasibleError for length mismatch or a grossly infeasible p.
KktReport KktCheck(const CostProfile& profile, std::span<const double> p,
                   double D, const RenyiOrder& order);

struct TradeoffPoint {
  SchemeParams scheme;
  RenyiOrder order = RenyiOrder::Kl();
  double download_cost = 0.0;
  double leakage = 0.0;
  double normalized_leakage = 0.0;
  std::optional<double> maximal_leakage;  // max over databases
};

// Evenly spaced D over the theorem-mode range (both endpoints included),
// closed-form leakage per order.
std::vector<TradeoffPoint> SweepTradeoff(const SchemeParams& params,
                                         std::span<const RenyiOrder> orders,
                                         int n_points,
                                         bool with_maximal_leakage = false);

enum class LeakageMetric { kRenyi, kNormalizedRenyi, kMaximal };

// Leakage of the closed-form optimum of `params` at D under `metric`.
// kMaximal ignores `order` and takes the max over databases.
double OptimalLeakage(const SchemeParams& params, double D,
                      const RenyiOrder& order, LeakageMetric metric);

struct Crossover {
  double d_star;        // candidate leakage == reference leakage
  Interval dominance;   // [1, d_star): candidate strictly better
};

// Bisects candidate(D) - reference(D) over the common theorem-mode range.
// Returns nullopt when the sign does not change between the endpoints.
std::optional<Crossover> FindCrossover(const SchemeParams& candidate,
                                       const SchemeParams& reference,
                                       const RenyiOrder& order,
                                       LeakageMetric metric,
                                       double tolerance = 1e-12);

}  // namespace wpir

#endif  // WPIR_OPTIMIZER_H_
