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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wpir/errors.h"
#include "wpir/optimizer.h"

namespace wpir {
namespace {

constexpr double kFeasibleTolerance = 1e-9;
constexpr double kGrossTolerance = 1e-6;

// d/dp_m of D_alpha(P || U), valid where p_m > 0.
std::vector<double> LeakageGradient(std::span<const double> p,
                                    const RenyiOrder& order) {
  std::vector<double> g(p.size(), 0.0);
  const bool kl = order.kind() == RenyiOrder::Kind::kKl ||
                  std::abs(order.alpha() - 1.0) < 1e-6;
  if (kl) {
    for (size_t m = 0; m < p.size(); ++m) {
      if (p[m] > 0.0) g[m] = std::log(p[m]) + 1.0;
    }
    return g;
  }
  const double alpha = order.alpha();
  double sum = 0.0;
  for (double x : p) {
    if (x > 0.0) sum += std::pow(x, alpha);
  }
  for (size_t m = 0; m < p.size(); ++m) {
    if (p[m] > 0.0) {
      g[m] = alpha / (alpha - 1.0) * std::pow(p[m], alpha - 1.0) / sum;
    }
  }
  return g;
}

}  // namespace

double KktReport::MaxResidual() const {
  return std::max({stationarity_residual, cost_residual,
                   normalization_residual, slackness_residual});
}

KktReport KktCheck(const CostProfile& profile, std::span<const double> p,
                   double D, const RenyiOrder& order) {
  if (static_cast<int64_t>(p.size()) != profile.size()) {
    throw InfeasibleError("distribution length does not match cost profile");
  }
  double min_entry = 0.0;
  for (double x : p) {
    if (!std::isfinite(x)) throw InfeasibleError("non-finite probability");
    min_entry = std::min(min_entry, x);
  }
  KktReport report;
  report.cost_residual = std::abs(ExpectedCost(profile, p) - D);
  report.normalization_residual =
      std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0);
  if (report.cost_residual > kGrossTolerance ||
      report.normalization_residual > kGrossTolerance ||
      min_entry < -kGrossTolerance) {
    throw InfeasibleError("distribution violates the primal constraints");
  }
  report.feasible = report.cost_residual <= kFeasibleTolerance &&
                    report.normalization_residual <= kFeasibleTolerance &&
                    min_entry >= -kFeasibleTolerance;

  const double len = profile.message_len();
  const int n_low = profile.n_low();
  const auto costs = profile.costs();

  if (order.kind() == RenyiOrder::Kind::kMax) {
    // Epigraph form: the optimum puts the direct options at the level t and
    // keeps every masked option at or below it. The multipliers of p_m <= t
    // are then 1/N on the direct options and 0 elsewhere, which gives
    // lambda = L/N and nu = -c_high/N from the stationarity equations.
    const double mass =
        profile.n_high() == 0 ? 0.0 : len * D - profile.low_cost();
    const double level = (1.0 - mass) / n_low;
    double violation = 0.0;
    double high_sum = 0.0;
    for (int64_t m = 0; m < profile.size(); ++m) {
      if (m < n_low) {
        violation = std::max(violation, std::abs(p[m] - level));
      } else {
        high_sum += p[m];
        violation = std::max(violation, p[m] - level);
      }
    }
    violation = std::max(violation, std::abs(high_sum - mass));
    report.slackness_residual = violation;
    report.lambda = len / n_low;
    report.nu = -static_cast<double>(profile.high_cost()) / n_low;
    report.stationarity_residual = 0.0;
    report.feasible =
        report.feasible && report.slackness_residual <= kFeasibleTolerance;
    return report;
  }

  // Coordinates at zero sit on their nonnegativity bound and carry their own
  // multiplier; stationarity is checked on the support only.
  const std::vector<double> g = LeakageGradient(p, order);
  double sum_low = 0.0, sum_high = 0.0;
  int count_low = 0, count_high = 0;
  for (int64_t m = 0; m < profile.size(); ++m) {
    if (p[m] <= 0.0) continue;
    if (costs[m] == profile.low_cost()) {
      sum_low += g[m];
      ++count_low;
    } else {
      sum_high += g[m];
      ++count_high;
    }
  }
  // g_m + lambda d_m / L + nu = 0 on each cost level.
  if (count_low > 0 && count_high > 0) {
    const double g_low = sum_low / count_low;
    const double g_high = sum_high / count_high;
    const double dc = (profile.high_cost() - profile.low_cost()) / len;
    report.lambda = -(g_high - g_low) / dc;
    report.nu = -g_low - report.lambda * profile.low_cost() / len;
  } else {
    // A single level in the support leaves lambda undetermined.
    const int count = count_low + count_high;
    report.lambda = 0.0;
    report.nu = count > 0 ? -(sum_low + sum_high) / count : 0.0;
  }
  double worst = 0.0;
  for (int64_t m = 0; m < profile.size(); ++m) {
    if (p[m] <= 0.0) continue;
    worst = std::max(worst, std::abs(g[m] + report.lambda * costs[m] / len +
                                     report.nu));
  }
  report.stationarity_residual = worst;
  return report;
}

}  // namespace wpir
