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

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "wpir/errors.h"

namespace wpir {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Below this distance from 1 the finite-order formula loses precision.
constexpr double kNearOneBand = 1e-6;

double Undefined(SupportPolicy policy) {
  if (policy == SupportPolicy::kExtended) return kInf;
  throw DivergenceUndefinedError(
      "Renyi divergence undefined: p puts mass where u has none");
}

double KlDivergence(std::span<const double> p, std::span<const double> u,
                    SupportPolicy policy) {
  double sum = 0.0;
  for (size_t m = 0; m < p.size(); ++m) {
    if (p[m] == 0.0) continue;
    if (u[m] == 0.0) return Undefined(policy);
    sum += p[m] * std::log(p[m] / u[m]);
  }
  return sum;
}

// Var_p[log(p/u)], the derivative of D_alpha at alpha = 1 times two.
double LogRatioVariance(std::span<const double> p, std::span<const double> u) {
  double mean = 0.0;
  double second = 0.0;
  for (size_t m = 0; m < p.size(); ++m) {
    if (p[m] == 0.0) continue;
    const double r = std::log(p[m] / u[m]);
    mean += p[m] * r;
    second += p[m] * r * r;
  }
  return std::max(0.0, second - mean * mean);
}

double FiniteDivergence(std::span<const double> p, std::span<const double> u,
                        double alpha, SupportPolicy policy) {
  // log sum_m p_m^alpha u_m^(1-alpha), evaluated as a log-sum-exp.
  std::vector<double> logs;
  logs.reserve(p.size());
  for (size_t m = 0; m < p.size(); ++m) {
    if (p[m] == 0.0) continue;
    if (u[m] == 0.0) {
      if (alpha > 1.0) return Undefined(policy);
      continue;  // p^alpha * 0^(1 - alpha) = 0 for alpha < 1
    }
    logs.push_back(alpha * std::log(p[m]) + (1.0 - alpha) * std::log(u[m]));
  }
  if (logs.empty()) return Undefined(policy);  // disjoint supports
  const double top = *std::max_element(logs.begin(), logs.end());
  double acc = 0.0;
  for (double l : logs) acc += std::exp(l - top);
  return (top + std::log(acc)) / (alpha - 1.0);
}

void CheckLengths(std::span<const double> p, std::span<const double> u) {
  if (p.size() != u.size()) {
    throw ParameterError("distributions have different lengths");
  }
  if (p.empty()) throw ParameterError("empty distribution");
}

using MarginalTable = std::map<CanonicalQuery, std::vector<double>>;

// Pr(Q_n^[k] = q) for every k, over the union of queries at database n.
MarginalTable Marginals(std::span<const QueryStructure> structures,
                        const Distribution& dist, int db_index) {
  if (structures.empty()) throw ParameterError("no structures given");
  const auto& params = structures.front().params;
  const size_t k_count = structures.size();
  MarginalTable table;
  for (size_t k = 0; k < k_count; ++k) {
    const auto& s = structures[k];
    if (!(s.params == params) || s.size() != structures.front().size()) {
      throw ParameterError("structures do not share scheme parameters");
    }
    for (const auto& [query, prob] : PerDbQueryDistribution(s, dist, db_index)) {
      auto& row = table[query];
      row.resize(k_count, 0.0);
      row[k] += prob;
    }
  }
  return table;
}

}  // namespace

Distribution Distribution::FromProbabilities(std::vector<double> probs,
                                             double tolerance) {
  if (probs.empty()) throw ParameterError("empty distribution");
  double sum = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) {
      throw ParameterError("probabilities must be finite and nonnegative");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > tolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "probabilities sum to " << sum << ", not 1";
    throw ParameterError(msg.str());
  }
  return Distribution(std::move(probs));
}

Distribution Distribution::Uniform(int64_t size) {
  if (size < 1) throw ParameterError("uniform distribution needs size >= 1");
  return Distribution(std::vector<double>(size, 1.0 / size));
}

Distribution Distribution::PointMass(int64_t size, int64_t index) {
  if (index < 0 || index >= size) throw ParameterError("index out of range");
  std::vector<double> probs(size, 0.0);
  probs[index] = 1.0;
  return Distribution(std::move(probs));
}

RenyiOrder RenyiOrder::Finite(double alpha) {
  if (!std::isfinite(alpha) || alpha <= 0.0 || alpha == 1.0) {
    throw ParameterError("finite Renyi order must be in (0,1) or (1,inf)");
  }
  return RenyiOrder(Kind::kFinite, alpha);
}

RenyiOrder RenyiOrder::Max() { return RenyiOrder(Kind::kMax, kInf); }

RenyiOrder RenyiOrder::FromAlpha(double alpha) {
  if (alpha == 1.0) return Kl();
  if (alpha == kInf) return Max();
  return Finite(alpha);
}

RenyiOrder RenyiOrder::Parse(const std::string& text) {
  if (text == "kl" || text == "KL") return Kl();
  if (text == "inf" || text == "max" || text == "infinity") return Max();
  size_t used = 0;
  double alpha = 0.0;
  try {
    alpha = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || used == 0) {
    throw ParameterError("cannot parse Renyi order '" + text + "'");
  }
  return FromAlpha(alpha);
}

std::string RenyiOrder::ToString() const {
  switch (kind_) {
    case Kind::kKl:
      return "1";
    case Kind::kMax:
      return "inf";
    case Kind::kFinite:
      break;
  }
  std::ostringstream out;
  out.precision(17);
  out << alpha_;
  return out.str();
}

double RenyiDivergence(std::span<const double> p, std::span<const double> u,
                       const RenyiOrder& order, SupportPolicy policy) {
  CheckLengths(p, u);
  if (std::equal(p.begin(), p.end(), u.begin())) return 0.0;
  double value = 0.0;
  switch (order.kind()) {
    case RenyiOrder::Kind::kKl:
      value = KlDivergence(p, u, policy);
      break;
    case RenyiOrder::Kind::kMax: {
      double best = 0.0;
      for (size_t m = 0; m < p.size(); ++m) {
        if (p[m] == 0.0) continue;
        if (u[m] == 0.0) return Undefined(policy);
        best = std::max(best, p[m] / u[m]);
      }
      value = std::log(best);
      break;
    }
    case RenyiOrder::Kind::kFinite: {
      const double alpha = order.alpha();
      if (std::abs(alpha - 1.0) < kNearOneBand) {
        const double kl = KlDivergence(p, u, policy);
        if (!std::isfinite(kl)) return kl;
        value = kl + 0.5 * (alpha - 1.0) * LogRatioVariance(p, u);
      } else {
        value = FiniteDivergence(p, u, alpha, policy);
      }
      break;
    }
  }
  // Rounding can push D(p || p) slightly below zero.
  return std::max(0.0, value);
}

double RenyiDivergence(const Distribution& p, const Distribution& u,
                       const RenyiOrder& order, SupportPolicy policy) {
  return RenyiDivergence(p.probs(), u.probs(), order, policy);
}

double RenyiEntropy(std::span<const double> u, const RenyiOrder& order) {
  if (u.empty()) throw ParameterError("empty distribution");
  switch (order.kind()) {
    case RenyiOrder::Kind::kKl: {
      double h = 0.0;
      for (double x : u) {
        if (x > 0.0) h -= x * std::log(x);
      }
      return h;
    }
    case RenyiOrder::Kind::kMax:
      return -std::log(*std::max_element(u.begin(), u.end()));
    case RenyiOrder::Kind::kFinite:
      break;
  }
  const double alpha = order.alpha();
  double sum = 0.0;
  for (double x : u) {
    if (x > 0.0) sum += std::pow(x, alpha);
  }
  return std::log(sum) / (1.0 - alpha);
}

double NormalizedRenyi(const Distribution& p, const Distribution& u,
                       const RenyiOrder& order) {
  const double h = RenyiEntropy(u.probs(), order);
  if (!(h > 0.0)) {
    throw NormalizationError("reference distribution has zero Renyi entropy");
  }
  return RenyiDivergence(p, u, order) / h;
}

double MaximalLeakage(std::span<const QueryStructure> structures,
                      const Distribution& dist, int db_index) {
  double sum = 0.0;
  for (const auto& [query, row] : Marginals(structures, dist, db_index)) {
    sum += *std::max_element(row.begin(), row.end());
  }
  return std::max(0.0, std::log(sum));
}

double EpsPrivacy(std::span<const QueryStructure> structures,
                  const Distribution& dist, int db_index) {
  double eps = 0.0;
  for (const auto& [query, row] : Marginals(structures, dist, db_index)) {
    const double hi = *std::max_element(row.begin(), row.end());
    const double lo = *std::min_element(row.begin(), row.end());
    if (hi == 0.0) continue;
    if (lo == 0.0) return kInf;
    eps = std::max(eps, std::log(hi / lo));
  }
  return eps;
}

double MutualInformationLeakage(std::span<const QueryStructure> structures,
                                const Distribution& dist, int db_index,
                                const Distribution& prior) {
  if (prior.size() != static_cast<int64_t>(structures.size())) {
    throw ParameterError("prior length must equal the number of structures");
  }
  double info = 0.0;
  for (const auto& [query, row] : Marginals(structures, dist, db_index)) {
    double mix = 0.0;
    for (size_t k = 0; k < row.size(); ++k) mix += prior[k] * row[k];
    for (size_t k = 0; k < row.size(); ++k) {
      if (prior[k] == 0.0 || row[k] == 0.0) continue;
      info += prior[k] * row[k] * std::log(row[k] / mix);
    }
  }
  return std::max(0.0, info);
}

Distribution EmpiricalDistribution(std::span<const int64_t> counts) {
  int64_t total = 0;
  for (int64_t c : counts) {
    if (c < 0) throw ParameterError("counts must be nonnegative");
    total += c;
  }
  if (total == 0) throw ParameterError("all counts are zero");
  std::vector<double> probs;
  probs.reserve(counts.size());
  for (int64_t c : counts) {
    probs.push_back(static_cast<double>(c) / static_cast<double>(total));
  }
  // Division rounding stays far inside the default tolerance for any
  // realistic number of cells.
  return Distribution::FromProbabilities(std::move(probs), 1e-9);
}

double TotalVariation(std::span<const double> a, std::span<const double> b) {
  CheckLengths(a, b);
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return 0.5 * sum;
}

}  // namespace wpir
