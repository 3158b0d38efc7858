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

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wpir/errors.h"

namespace wpir {
namespace {

// Slack when comparing a requested D against a range endpoint such as 4/3.
constexpr double kRangeSlack = 1e-12;
constexpr double kNearOneBand = 1e-6;

// The two levels of the closed-form optimum at cost D.
struct TwoLevel {
  double high_mass;  // total probability on the masked options
  double low;        // each direct option
  double high;       // each masked option (0 when there are none)
};

TwoLevel Levels(const CostProfile& profile, double D) {
  const Interval range = FeasibleCostRange(profile, RangeMode::kTheorem);
  if (!range.Contains(D, kRangeSlack)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "download cost " << D << " outside [" << range.lo << ", "
        << range.hi << "]";
    throw DomainError(msg.str());
  }
  D = std::clamp(D, range.lo, range.hi);
  const double mass =
      profile.n_high() == 0
          ? 0.0
          : std::max(0.0, profile.message_len() * D - profile.low_cost());
  TwoLevel t;
  t.high_mass = mass;
  t.low = (1.0 - mass) / profile.n_low();
  t.high = profile.n_high() == 0 ? 0.0 : mass / profile.n_high();
  return t;
}

double XLogY(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); }

}  // namespace

CostProfile CostProfile::FromParams(const SchemeParams& params) {
  params.Validate();
  const int64_t m = params.OptionCount();
  const int n = params.n_databases;
  std::vector<int> costs(m, params.HighCost());
  std::fill(costs.begin(), costs.begin() + n, params.LowCost());
  return FromCosts(std::move(costs), params.message_len, n);
}

CostProfile CostProfile::FromStructure(const QueryStructure& structure) {
  return FromCosts(DownloadCosts(structure), structure.params.message_len,
                   structure.params.n_databases);
}

CostProfile CostProfile::FromCosts(std::vector<int> costs, int message_len,
                                   int n_low) {
  if (message_len < 1) throw ParameterError("message length must be >= 1");
  if (n_low < 1 || n_low > static_cast<int64_t>(costs.size())) {
    throw ParameterError("n_low must lie in [1, M]");
  }
  const int low = costs.front();
  if (low < 1) throw ParameterError("download costs must be positive");
  for (size_t m = 0; m < costs.size(); ++m) {
    const int expected = static_cast<int64_t>(m) < n_low ? low : low + 1;
    if (costs[m] != expected) {
      throw ParameterError(
          "cost profile must be n_low entries of c followed by entries of "
          "c + 1");
    }
  }
  return CostProfile(std::move(costs), message_len, n_low);
}

double Capacity(int n_databases, int n_messages) {
  if (n_databases < 2 || n_messages < 1) {
    throw ParameterError("capacity needs N >= 2 and K >= 1");
  }
  double sum = 0.0;
  double term = 1.0;
  for (int k = 0; k < n_messages; ++k) {
    sum += term;
    term /= n_databases;
  }
  return 1.0 / sum;
}

double PerfectPrivacyCost(const CostProfile& profile) {
  int64_t total = 0;
  for (int c : profile.costs()) total += c;
  return static_cast<double>(total) /
         (static_cast<double>(profile.message_len()) *
          static_cast<double>(profile.size()));
}

Interval FeasibleCostRange(const CostProfile& profile, RangeMode mode) {
  const double len = profile.message_len();
  if (mode == RangeMode::kTheorem) {
    return {profile.low_cost() / len, PerfectPrivacyCost(profile)};
  }
  const int top = profile.n_high() == 0 ? profile.low_cost()
                                        : profile.high_cost();
  return {profile.low_cost() / len, top / len};
}

double ExpectedCost(const CostProfile& profile, std::span<const double> p) {
  if (static_cast<int64_t>(p.size()) != profile.size()) {
    throw ParameterError("distribution length does not match cost profile");
  }
  double sum = 0.0;
  for (size_t m = 0; m < p.size(); ++m) sum += p[m] * profile.costs()[m];
  return sum / profile.message_len();
}

OptimalSolution OptimalDistribution(const CostProfile& profile, double D,
                                    const RenyiOrder& order) {
  const TwoLevel t = Levels(profile, D);
  std::vector<double> probs(profile.size(), t.high);
  std::fill(probs.begin(), probs.begin() + profile.n_low(), t.low);
  return {Distribution::FromProbabilities(std::move(probs)),
          order.kind() == RenyiOrder::Kind::kMax};
}

double TradeoffLeakage(const CostProfile& profile, double D,
                       const RenyiOrder& order) {
  const TwoLevel t = Levels(profile, D);
  const double n = profile.n_low();
  const double rest = static_cast<double>(profile.n_high());
  const double log_m = std::log(static_cast<double>(profile.size()));

  double value = 0.0;
  const double kl = XLogY(1.0 - t.high_mass, t.low) +
                    XLogY(t.high_mass, t.high) + log_m;
  switch (order.kind()) {
    case RenyiOrder::Kind::kKl:
      value = kl;
      break;
    case RenyiOrder::Kind::kMax:
      value = std::log(t.low) + log_m;
      break;
    case RenyiOrder::Kind::kFinite: {
      const double alpha = order.alpha();
      if (std::abs(alpha - 1.0) < kNearOneBand) {
        // First-order expansion around the KL value:
        // D_alpha = KL + (alpha - 1)/2 * Var_P[log(p/u)].
        const double m = static_cast<double>(profile.size());
        const double r_low = std::log(t.low * m);
        const double r_high = t.high > 0.0 ? std::log(t.high * m) : 0.0;
        const double w_low = 1.0 - t.high_mass;
        const double mean = w_low * r_low + t.high_mass * r_high;
        const double var = std::max(
            0.0, w_low * r_low * r_low + t.high_mass * r_high * r_high -
                     mean * mean);
        value = kl + 0.5 * (alpha - 1.0) * var;
      } else {
        double sum = n * std::pow(t.low, alpha);
        if (t.high > 0.0) sum += rest * std::pow(t.high, alpha);
        value = std::log(sum) / (alpha - 1.0) + log_m;
      }
      break;
    }
  }
  return std::max(0.0, value);
}

namespace {

// Leakage of the closed-form optimum under a chosen metric. Keeps the query
// structures around so repeated maximal-leakage evaluations stay cheap.
class MetricEvaluator {
 public:
  MetricEvaluator(const SchemeParams& params, LeakageMetric metric)
      : params_(params),
        profile_(CostProfile::FromParams(params)),
        metric_(metric) {
    if (metric == LeakageMetric::kMaximal) {
      structures_ = BuildAllStructures(params);
    }
  }

  const CostProfile& profile() const { return profile_; }

  double operator()(double D, const RenyiOrder& order) const {
    switch (metric_) {
      case LeakageMetric::kRenyi:
        return TradeoffLeakage(profile_, D, order);
      case LeakageMetric::kNormalizedRenyi: {
        const auto u = Distribution::Uniform(profile_.size());
        return TradeoffLeakage(profile_, D, order) /
               RenyiEntropy(u.probs(), order);
      }
      case LeakageMetric::kMaximal: {
        const auto dist = OptimalDistribution(profile_, D, order).distribution;
        double worst = 0.0;
        for (int db = 0; db < params_.n_databases; ++db) {
          worst = std::max(worst, MaximalLeakage(structures_, dist, db));
        }
        return worst;
      }
    }
    return 0.0;
  }

 private:
  SchemeParams params_;
  CostProfile profile_;
  LeakageMetric metric_;
  std::vector<QueryStructure> structures_;
};

}  // namespace

double OptimalLeakage(const SchemeParams& params, double D,
                      const RenyiOrder& order, LeakageMetric metric) {
  return MetricEvaluator(params, metric)(D, order);
}

std::vector<TradeoffPoint> SweepTradeoff(const SchemeParams& params,
                                         std::span<const RenyiOrder> orders,
                                         int n_points,
                                         bool with_maximal_leakage) {
  if (n_points < 2) throw ParameterError("a sweep needs at least 2 points");
  const MetricEvaluator renyi(params, LeakageMetric::kRenyi);
  std::optional<MetricEvaluator> maximal;
  if (with_maximal_leakage) maximal.emplace(params, LeakageMetric::kMaximal);

  const CostProfile& profile = renyi.profile();
  const Interval range = FeasibleCostRange(profile, RangeMode::kTheorem);
  const double log_m = std::log(static_cast<double>(profile.size()));

  std::vector<TradeoffPoint> points;
  points.reserve(orders.size() * n_points);
  for (const auto& order : orders) {
    for (int i = 0; i < n_points; ++i) {
      // Pin the last point to the endpoint instead of accumulating rounding.
      const double D = i == n_points - 1
                           ? range.hi
                           : range.lo + (range.hi - range.lo) * i /
                                            (n_points - 1);
      TradeoffPoint point;
      point.scheme = params;
      point.order = order;
      point.download_cost = D;
      point.leakage = renyi(D, order);
      point.normalized_leakage = point.leakage / log_m;
      if (maximal) point.maximal_leakage = (*maximal)(D, order);
      points.push_back(point);
    }
  }
  return points;
}

std::optional<Crossover> FindCrossover(const SchemeParams& candidate,
                                       const SchemeParams& reference,
                                       const RenyiOrder& order,
                                       LeakageMetric metric,
                                       double tolerance) {
  const MetricEvaluator cand(candidate, metric);
  const MetricEvaluator ref(reference, metric);
  const Interval a = FeasibleCostRange(cand.profile(), RangeMode::kTheorem);
  const Interval b = FeasibleCostRange(ref.profile(), RangeMode::kTheorem);
  double lo = std::max(a.lo, b.lo);
  double hi = std::min(a.hi, b.hi);
  if (!(lo < hi)) return std::nullopt;

  auto gap = [&](double D) { return cand(D, order) - ref(D, order); };
  const double at_lo = gap(lo);
  const double at_hi = gap(hi);
  if (!(at_lo < 0.0 && at_hi > 0.0)) return std::nullopt;

  const double start = lo;
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (gap(mid) < 0.0 ? lo : hi) = mid;
  }
  const double d_star = 0.5 * (lo + hi);
  return Crossover{d_star, {start, d_star}};
}

}  // namespace wpir
