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

#include "wpir/scheme.h"

#include <algorithm>
#include <sstream>

#include "wpir/errors.h"
#include "wpir/leakage.h"

namespace wpir {
namespace {

constexpr int64_t kMaxOptions = int64_t{1} << 24;

int64_t CheckedPow(int64_t base, int exp) {
  int64_t result = 1;
  for (int i = 0; i < exp; ++i) {
    result *= base;
    if (result > kMaxOptions) {
      throw ParameterError("scheme has more than 2^24 options");
    }
  }
  return result;
}

// Calls `fn` with every size-`k` subset of `items`, in lexicographic order.
template <typename Fn>
void ForEachSubset(const std::vector<int>& items, int k, Fn&& fn) {
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  const int n = static_cast<int>(items.size());
  if (k > n) return;
  std::vector<int> subset(k);
  while (true) {
    for (int i = 0; i < k; ++i) subset[i] = items[idx[i]];
    fn(subset);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

// Calls `fn` with every tuple in [1..len]^k, in lexicographic order.
template <typename Fn>
void ForEachTuple(int len, int k, Fn&& fn) {
  std::vector<int> tuple(k, 1);
  while (true) {
    fn(tuple);
    int i = k - 1;
    while (i >= 0 && tuple[i] == len) {
      tuple[i] = 1;
      --i;
    }
    if (i < 0) return;
    ++tuple[i];
  }
}

QueryElement MakeElement(std::vector<SymbolRef> terms) {
  std::sort(terms.begin(), terms.end());
  return QueryElement{std::move(terms)};
}

// Appends `base` and its N - 1 further right cyclic shifts.
void AppendShifts(const std::vector<std::vector<QueryElement>>& base,
                  std::vector<QueryOption>& out) {
  const int n = static_cast<int>(base.size());
  int cost = 0;
  for (const auto& db : base) {
    for (const auto& element : db) cost += element.empty() ? 0 : 1;
  }
  for (int shift = 0; shift < n; ++shift) {
    QueryOption option;
    option.per_database.resize(n);
    for (int db = 0; db < n; ++db) {
      option.per_database[(db + shift) % n] = base[db];
    }
    option.download_cost = cost;
    out.push_back(std::move(option));
  }
}

}  // namespace

std::string SchemeKindName(SchemeKind kind) {
  return kind == SchemeKind::kTsc ? "tsc" : "alt";
}

SchemeKind ParseSchemeKind(const std::string& name) {
  if (name == "tsc") return SchemeKind::kTsc;
  if (name == "alt" || name == "alternative") return SchemeKind::kAlternative;
  throw ParameterError("unknown scheme '" + name + "' (expected tsc or alt)");
}

SchemeParams SchemeParams::Tsc(int n_databases, int n_messages) {
  SchemeParams p{n_databases, n_messages, n_databases - 1, SchemeKind::kTsc};
  p.Validate();
  return p;
}

SchemeParams SchemeParams::Alternative(int n_databases, int n_messages,
                                       int message_len) {
  SchemeParams p{n_databases, n_messages, message_len,
                 SchemeKind::kAlternative};
  p.Validate();
  return p;
}

void SchemeParams::Validate() const {
  if (n_databases < 2) throw ParameterError("N must be at least 2");
  if (n_messages < 1) throw ParameterError("K must be at least 1");
  if (kind == SchemeKind::kTsc) {
    if (message_len != n_databases - 1) {
      throw ParameterError("TSC scheme requires L = N - 1");
    }
  } else if (message_len < 1 || message_len > n_databases - 2) {
    throw ParameterError(
        "alternative scheme requires 1 <= L <= N - 2 (and so N >= 3)");
  }
  OptionCount();
}

int64_t SchemeParams::OptionCount() const {
  if (kind == SchemeKind::kTsc) return CheckedPow(n_databases, n_messages);
  return n_databases * CheckedPow(message_len + 1, n_messages - 1);
}

CanonicalQuery::CanonicalQuery(std::span<const QueryElement> elements) {
  for (const auto& element : elements) {
    if (element.empty()) continue;
    QueryElement sorted = element;
    std::sort(sorted.terms.begin(), sorted.terms.end());
    elements_.push_back(std::move(sorted));
  }
  std::sort(elements_.begin(), elements_.end());
}

std::string CanonicalQuery::ToString() const {
  std::ostringstream out;
  for (size_t i = 0; i < elements_.size(); ++i) {
    if (i) out << ',';
    const auto& terms = elements_[i].terms;
    for (size_t j = 0; j < terms.size(); ++j) {
      if (j) out << '+';
      out << terms[j].message << ':' << terms[j].symbol;
    }
  }
  return out.str();
}

QueryStructure BuildStructure(const SchemeParams& params, int theta) {
  params.Validate();
  if (theta < 1 || theta > params.n_messages) {
    throw ParameterError("theta must lie in [1, K]");
  }
  const int n = params.n_databases;
  const int len = params.message_len;

  QueryStructure structure{params, theta, {}};
  structure.options.reserve(static_cast<size_t>(params.OptionCount()));

  // Step 1: direct downloads from databases 1..L.
  {
    std::vector<std::vector<QueryElement>> base(n);
    for (int l = 1; l <= len; ++l) {
      base[l - 1].push_back(MakeElement({{theta, l}}));
    }
    AppendShifts(base, structure.options);
  }

  std::vector<int> undesired;
  for (int k = 1; k <= params.n_messages; ++k) {
    if (k != theta) undesired.push_back(k);
  }

  // Step k: mask every desired symbol with a sum over k - 1 other messages.
  for (int step = 2; step <= params.n_messages; ++step) {
    ForEachSubset(undesired, step - 1, [&](const std::vector<int>& subset) {
      ForEachTuple(len, step - 1, [&](const std::vector<int>& symbols) {
        std::vector<SymbolRef> mask;
        for (size_t i = 0; i < subset.size(); ++i) {
          mask.push_back({subset[i], symbols[i]});
        }
        std::vector<std::vector<QueryElement>> base(n);
        base[0].push_back(MakeElement(mask));
        for (int l = 1; l <= len; ++l) {
          std::vector<SymbolRef> terms = mask;
          terms.push_back({theta, l});
          base[l].push_back(MakeElement(std::move(terms)));
        }
        AppendShifts(base, structure.options);
      });
    });
  }
  return structure;
}

std::vector<QueryStructure> BuildAllStructures(const SchemeParams& params) {
  std::vector<QueryStructure> out;
  for (int theta = 1; theta <= params.n_messages; ++theta) {
    out.push_back(BuildStructure(params, theta));
  }
  return out;
}

CanonicalQuery CanonicalQueryAt(const QueryStructure& structure,
                                int64_t option_index, int db_index) {
  if (option_index < 0 || option_index >= structure.size()) {
    throw ParameterError("option index out of range");
  }
  if (db_index < 0 || db_index >= structure.params.n_databases) {
    throw ParameterError("database index out of range");
  }
  return CanonicalQuery(structure.options[option_index].per_database[db_index]);
}

QueryMarginal PerDbQueryDistribution(const QueryStructure& structure,
                                     const Distribution& dist, int db_index) {
  if (dist.size() != structure.size()) {
    throw ParameterError("distribution length does not match option count");
  }
  QueryMarginal marginal;
  for (int64_t m = 0; m < structure.size(); ++m) {
    marginal[CanonicalQueryAt(structure, m, db_index)] += dist[m];
  }
  return marginal;
}

std::vector<int> DownloadCosts(const QueryStructure& structure) {
  std::vector<int> costs;
  costs.reserve(structure.options.size());
  for (const auto& option : structure.options) {
    costs.push_back(option.download_cost);
  }
  return costs;
}

}  // namespace wpir
