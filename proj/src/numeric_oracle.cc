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

// Numeric solver for the leakage minimization. Nothing in this file knows
// that the optimum is two-level: it works on an arbitrary cost vector and
// is used to cross-check the closed forms.

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "wpir/errors.h"
#include "wpir/leakage.h"
#include "wpir/optimizer.h"

namespace wpir {
namespace {

constexpr double kTinyProb = 1e-300;
constexpr double kArmijo = 1e-4;
constexpr double kMinStep = 1e-30;
constexpr double kMaxStep = 1e8;
// Iterations without a better residual before the best iterate is accepted,
// provided it lies within kStallSlack times the tolerance.
constexpr int kStallIterations = 200;
constexpr double kStallSlack = 1e4;

// Euclidean projection onto the probability simplex (sort and threshold).
std::vector<double> ProjectOntoSimplex(std::span<const double> y) {
  std::vector<double> sorted(y.begin(), y.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumsum = 0.0;
  double tau = 0.0;
  for (size_t i = 0; i < sorted.size(); ++i) {
    cumsum += sorted[i];
    const double candidate = (cumsum - 1.0) / static_cast<double>(i + 1);
    if (sorted[i] - candidate > 0.0) tau = candidate;
  }
  std::vector<double> p(y.size());
  for (size_t i = 0; i < y.size(); ++i) p[i] = std::max(0.0, y[i] - tau);
  return p;
}

double Dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double MaxAbsDiff(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

// A convex surrogate with the same minimizer as D_alpha(P || U) on the
// feasible slice. For finite alpha the divergence is a monotone transform
// of sum p^alpha; we minimize sign(alpha - 1) * sum (M p)^alpha / (alpha M),
// whose gradient sign(alpha - 1) * (M p)^(alpha - 1) is 1 at the uniform
// point, so the stopping residual means the same thing for every order.
class Objective {
 public:
  Objective(const RenyiOrder& order, int64_t size)
      : kl_(order.kind() == RenyiOrder::Kind::kKl ||
            std::abs(order.alpha() - 1.0) < 1e-6),
        alpha_(order.alpha()),
        m_(static_cast<double>(size)) {}

  double Value(std::span<const double> p) const {
    double sum = 0.0;
    if (kl_) {
      for (double x : p) {
        if (x > 0.0) sum += x * std::log(m_ * x);
      }
      return sum;
    }
    for (double x : p) {
      if (x > 0.0) sum += std::pow(m_ * x, alpha_);
    }
    return Sign() * sum / (alpha_ * m_);
  }

  void Gradient(std::span<const double> p, std::vector<double>& g) const {
    g.resize(p.size());
    for (size_t i = 0; i < p.size(); ++i) {
      const double mp = m_ * std::max(p[i], kTinyProb);
      g[i] = kl_ ? std::log(mp) + 1.0 : Sign() * std::pow(mp, alpha_ - 1.0);
    }
  }

 private:
  double Sign() const { return alpha_ > 1.0 ? 1.0 : -1.0; }

  bool kl_;
  double alpha_;
  double m_;
};

struct Run {
  std::vector<double> p;
  double value;
  int iterations;
  double residual;
};

// Spectral projected gradient with a nonmonotone Armijo search.
Run SpectralProjectedGradient(const Objective& objective,
                              std::span<const double> costs, double target,
                              std::vector<double> start,
                              const OracleConfig& config) {
  auto project = [&](std::span<const double> y) {
    return ProjectOntoCostSlice(y, costs, target);
  };
  const size_t m = costs.size();
  std::vector<double> p = project(start);
  std::vector<double> g;
  std::vector<double> g_next;
  std::vector<double> trial(m);
  std::vector<double> dir(m);
  objective.Gradient(p, g);
  double value = objective.Value(p);
  std::deque<double> history{value};
  double step = config.initial_step;
  double residual = std::numeric_limits<double>::infinity();
  Run best{p, value, 0, residual};
  int since_best = 0;

  for (int iter = 0; iter < config.max_iterations; ++iter) {
    for (size_t i = 0; i < m; ++i) trial[i] = p[i] - g[i];
    residual = MaxAbsDiff(project(trial), p);
    if (residual <= config.tolerance) return {p, value, iter, residual};
    if (residual < best.residual * (1.0 - 1e-3)) {
      best = {p, value, iter, residual};
      since_best = 0;
    } else if (++since_best > kStallIterations &&
               best.residual <= kStallSlack * config.tolerance) {
      // Cycling at the rounding floor, just above the requested tolerance.
      return best;
    }

    for (size_t i = 0; i < m; ++i) trial[i] = p[i] - step * g[i];
    const std::vector<double> target_point = project(trial);
    for (size_t i = 0; i < m; ++i) dir[i] = target_point[i] - p[i];
    const double slope = Dot(g, dir);
    const double reference = *std::max_element(history.begin(), history.end());

    double t = 1.0;
    std::vector<double> next(m);
    double next_value = 0.0;
    while (true) {
      for (size_t i = 0; i < m; ++i) next[i] = p[i] + t * dir[i];
      next_value = objective.Value(next);
      if (next_value <= reference + kArmijo * t * slope) break;
      t *= 0.5;
      if (t < 1e-20) break;  // no descent left at working precision
    }
    if (t < 1e-20) {
      return residual < best.residual ? Run{p, value, iter, residual} : best;
    }

    objective.Gradient(next, g_next);
    double ss = 0.0;
    double sy = 0.0;
    for (size_t i = 0; i < m; ++i) {
      const double s = next[i] - p[i];
      ss += s * s;
      sy += s * (g_next[i] - g[i]);
    }
    step = sy > 0.0 ? std::clamp(ss / sy, kMinStep, kMaxStep) : kMaxStep;
    p.swap(next);
    g.swap(g_next);
    value = next_value;
    history.push_back(value);
    if (static_cast<int>(history.size()) > config.line_search_memory) {
      history.pop_front();
    }
  }

  double primal = std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0);
  primal = std::max(primal, std::abs(Dot(p, costs) - target));
  std::ostringstream msg;
  msg << "numeric oracle did not converge in " << config.max_iterations
      << " iterations (residual " << residual << ")";
  throw ConvergenceError(msg.str(), std::move(p), residual, primal);
}

// Range of sum c_m p_m over {0 <= p <= t, sum p = 1}, attained by filling
// the cheapest (resp. most expensive) options first.
struct Fill {
  std::vector<double> cheapest;
  std::vector<double> dearest;
  double min_cost;
  double max_cost;
};

Fill GreedyFill(std::span<const double> costs, double level) {
  const size_t m = costs.size();
  std::vector<size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return costs[a] < costs[b]; });
  auto fill = [&](auto begin, auto end, std::vector<double>& p) {
    p.assign(m, 0.0);
    double left = 1.0;
    for (auto it = begin; it != end && left > 0.0; ++it) {
      p[*it] = std::min(level, left);
      left -= p[*it];
    }
  };
  Fill f;
  fill(order.begin(), order.end(), f.cheapest);
  fill(order.rbegin(), order.rend(), f.dearest);
  f.min_cost = Dot(f.cheapest, costs);
  f.max_cost = Dot(f.dearest, costs);
  return f;
}

// minimize t s.t. p_m <= t, sum p = 1, cost(p) = target, p >= 0.
Run EpigraphBisection(std::span<const double> costs, double target) {
  const double m = static_cast<double>(costs.size());
  const double slack = 1e-14 * std::max(1.0, std::abs(target));
  auto feasible = [&](double level) {
    if (level * m < 1.0) return false;
    const Fill f = GreedyFill(costs, level);
    return f.min_cost <= target + slack && f.max_cost >= target - slack;
  };
  double lo = 1.0 / m;
  double hi = 1.0;
  int iterations = 0;
  if (feasible(lo)) {
    hi = lo;
  } else {
    while (iterations < 200) {
      ++iterations;
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (feasible(mid) ? hi : lo) = mid;
    }
  }
  const Fill f = GreedyFill(costs, hi);
  // Mix the two greedy fills so the cost constraint holds exactly.
  const double span = f.max_cost - f.min_cost;
  const double w =
      span > 0.0 ? std::clamp((target - f.min_cost) / span, 0.0, 1.0) : 0.0;
  std::vector<double> p(costs.size());
  for (size_t i = 0; i < p.size(); ++i) {
    p[i] = (1.0 - w) * f.cheapest[i] + w * f.dearest[i];
  }
  return {std::move(p), std::log(m * hi), iterations, 0.0};
}

}  // namespace

std::vector<double> ProjectOntoCostSlice(std::span<const double> y,
                                         std::span<const double> c,
                                         double target) {
  if (y.size() != c.size() || y.empty()) {
    throw ParameterError("projection inputs must have equal nonzero length");
  }
  const auto [cmin, cmax] = std::minmax_element(c.begin(), c.end());
  if (target < *cmin - 1e-12 || target > *cmax + 1e-12) {
    throw DomainError("cost target outside the range of the cost vector");
  }
  // p(lambda) = proj_simplex(y - lambda c); c . p(lambda) is nonincreasing
  // in lambda because the projection is a monotone operator.
  std::vector<double> shifted(y.size());
  auto at = [&](double lambda) {
    for (size_t i = 0; i < y.size(); ++i) shifted[i] = y[i] - lambda * c[i];
    return ProjectOntoSimplex(shifted);
  };
  auto excess = [&](double lambda) { return Dot(at(lambda), c) - target; };

  if (*cmin == *cmax) return at(0.0);

  double lo = -1.0;
  double hi = 1.0;
  double f_lo = excess(lo);
  double f_hi = excess(hi);
  for (int i = 0; i < 200 && f_lo < 0.0; ++i) {
    hi = lo;
    f_hi = f_lo;
    lo = 2.0 * lo - 1.0;
    f_lo = excess(lo);
  }
  for (int i = 0; i < 200 && f_hi > 0.0; ++i) {
    lo = hi;
    f_lo = f_hi;
    hi = 2.0 * hi + 1.0;
    f_hi = excess(hi);
  }
  if (f_lo == 0.0) return at(lo);
  if (f_hi == 0.0) return at(hi);

  // Illinois regula falsi on a piecewise-linear function, with bisection
  // whenever the secant point falls outside the bracket interior.
  int side = 0;
  for (int i = 0; i < 200; ++i) {
    double mid = hi - f_hi * (hi - lo) / (f_hi - f_lo);
    if (!(mid > lo && mid < hi)) mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = excess(mid);
    if (f_mid == 0.0) return at(mid);
    if (f_mid > 0.0) {
      lo = mid;
      f_lo = f_mid;
      if (side == -1) f_hi *= 0.5;
      side = -1;
    } else {
      hi = mid;
      f_hi = f_mid;
      if (side == 1) f_lo *= 0.5;
      side = 1;
    }
    if (hi - lo <= 1e-16 * std::max(1.0, std::abs(lo))) break;
  }
  // Blend the two bracket ends so the cost constraint holds up to rounding.
  const std::vector<double> a = at(lo);
  const std::vector<double> b = at(hi);
  const double ca = Dot(a, c);
  const double cb = Dot(b, c);
  const double w = ca != cb ? std::clamp((ca - target) / (ca - cb), 0.0, 1.0)
                            : 0.5;
  std::vector<double> p(y.size());
  for (size_t i = 0; i < p.size(); ++i) p[i] = (1.0 - w) * a[i] + w * b[i];
  return p;
}

OracleResult NumericOracle(const CostProfile& profile, double D,
                           const RenyiOrder& order,
                           const OracleConfig& config) {
  const Interval range = FeasibleCostRange(profile, RangeMode::kSimplex);
  if (!range.Contains(D, 1e-12)) {
    throw DomainError("download cost outside the attainable range");
  }
  D = std::clamp(D, range.lo, range.hi);
  const int64_t m = profile.size();
  std::vector<double> costs(profile.costs().begin(), profile.costs().end());
  const double target = profile.message_len() * D;

  // At either end of the cost range every option off that cost level is
  // forced to zero; solve over the free coordinates only, since gradients
  // for alpha < 1 are unbounded at zero.
  const auto [cmin, cmax] = std::minmax_element(costs.begin(), costs.end());
  const double edge = 1e-12 * std::max(1.0, std::abs(target));
  std::vector<size_t> free;
  for (size_t i = 0; i < costs.size(); ++i) {
    if (target <= *cmin + edge && costs[i] != *cmin) continue;
    if (target >= *cmax - edge && costs[i] != *cmax) continue;
    free.push_back(i);
  }
  std::vector<double> free_costs;
  for (size_t i : free) free_costs.push_back(costs[i]);
  const double free_target =
      free.size() < costs.size() ? free_costs.front() : target;
  const int64_t n_free = static_cast<int64_t>(free.size());

  Run best;
  if (order.kind() == RenyiOrder::Kind::kMax) {
    best = EpigraphBisection(free_costs, free_target);
  } else {
    // The surrogate is scaled by the full option count so residuals keep
    // their meaning when coordinates are pinned.
    const Objective objective(order, m);
    best = SpectralProjectedGradient(objective, free_costs, free_target,
                                     std::vector<double>(n_free, 1.0 / n_free),
                                     config);
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> noise(0.0, 2.0 / n_free);
    for (int r = 0; r < config.restarts; ++r) {
      std::vector<double> start(n_free);
      for (auto& x : start) x = noise(rng);
      Run run = SpectralProjectedGradient(objective, free_costs, free_target,
                                          std::move(start), config);
      if (run.value < best.value) best = std::move(run);
    }
  }
  if (free.size() < costs.size()) {
    std::vector<double> full(costs.size(), 0.0);
    for (size_t j = 0; j < free.size(); ++j) full[free[j]] = best.p[j];
    best.p = std::move(full);
  }

  // Clean rounding-level negatives before wrapping as a distribution.
  double sum = 0.0;
  for (auto& x : best.p) {
    x = std::max(0.0, x);
    sum += x;
  }
  for (auto& x : best.p) x /= sum;
  auto dist = Distribution::FromProbabilities(std::move(best.p));
  const double value =
      RenyiDivergence(dist, Distribution::Uniform(m), order);
  return {std::move(dist), value, best.iterations, best.residual};
}

}  // namespace wpir
