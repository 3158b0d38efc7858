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

// Leakage measures. All values are in nats.

#ifndef WPIR_LEAKAGE_H_
#define WPIR_LEAKAGE_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wpir/scheme.h"

namespace wpir {

inline constexpr double kSumTolerance = 1e-12;

// A probability vector. Entries are nonnegative and sum to one within
// kSumTolerance.
class Distribution {
 public:
  // Throws ParameterError on negative, non-finite or non-normalized input.
  static Distribution FromProbabilities(std::vector<double> probs,
                                        double tolerance = kSumTolerance);
  static Distribution Uniform(int64_t size);
  static Distribution PointMass(int64_t size, int64_t index);

  std::span<const double> probs() const { return probs_; }
  int64_t size() const { return static_cast<int64_t>(probs_.size()); }
  double operator[](int64_t i) const { return probs_[i]; }

 private:
  explicit Distribution(std::vector<double> probs)
      : probs_(std::move(probs)) {}
  std::vector<double> probs_;
};

// Order of the Rényi divergence: finite alpha, the KL limit alpha = 1, or
// the alpha -> infinity limit.
class RenyiOrder {
 public:
  enum class Kind { kFinite, kKl, kMax };

  // Rejects alpha <= 0, alpha == 1 and non-finite alpha.
  static RenyiOrder Finite(double alpha);
  static RenyiOrder Kl() { return RenyiOrder(Kind::kKl, 1.0); }
  static RenyiOrder Max();
  // Maps 1 to Kl() and +inf to Max().
  static RenyiOrder FromAlpha(double alpha);
  // Accepts a number, "kl" or "inf"/"max".
  static RenyiOrder Parse(const std::string& text);

  Kind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  std::string ToString() const;

  friend bool operator==(const RenyiOrder&, const RenyiOrder&) = default;

 private:
  RenyiOrder(Kind kind, double alpha) : kind_(kind), alpha_(alpha) {}
  Kind kind_;
  double alpha_;
};

// How support violations are reported.
enum class SupportPolicy {
  kStrict,    // throw DivergenceUndefinedError
  kExtended,  // return +infinity
};

// D_alpha(p || u).
double RenyiDivergence(std::span<const double> p, std::span<const double> u,
                       const RenyiOrder& order,
                       SupportPolicy policy = SupportPolicy::kStrict);
double RenyiDivergence(const Distribution& p, const Distribution& u,
                       const RenyiOrder& order,
                       SupportPolicy policy = SupportPolicy::kStrict);

// H_alpha(u); Shannon entropy for Kl(), min-entropy for Max().
double RenyiEntropy(std::span<const double> u, const RenyiOrder& order);

// D_alpha(p || u) / H_alpha(u). Throws NormalizationError when H_alpha(u)
// is zero.
double NormalizedRenyi(const Distribution& p, const Distribution& u,
                       const RenyiOrder& order);

// The metrics below compare the query columns at one database across all
// message indices. `structures` holds one structure per theta (as returned
// by BuildAllStructures); the same option distribution is used for each.

// log sum_q max_k Pr(Q_n^[k] = q).
double MaximalLeakage(std::span<const QueryStructure> structures,
                      const Distribution& dist, int db_index);

// Smallest eps with Pr(Q_n^[k1] = q) <= e^eps Pr(Q_n^[k2] = q) for all
// q, k1, k2. +infinity when a query is possible under one index only.
double EpsPrivacy(std::span<const QueryStructure> structures,
                  const Distribution& dist, int db_index);

// I(theta; Q_n) under `prior` over message indices.
double MutualInformationLeakage(std::span<const QueryStructure> structures,
                                const Distribution& dist, int db_index,
                                const Distribution& prior);

// counts / sum(counts). Throws ParameterError when every count is zero.
Distribution EmpiricalDistribution(std::span<const int64_t> counts);

// Total-variation distance between two equal-length vectors.
double TotalVariation(std::span<const double> a, std::span<const double> b);

}  // namespace wpir

#endif  // WPIR_LEAKAGE_H_
