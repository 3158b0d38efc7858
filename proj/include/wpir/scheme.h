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

// Probabilistic query structures for replicated-database PIR.
//
// Two families are supported. The symmetric TSC scheme uses messages of
// N-1 symbols and N^K options; the alternative scheme shortens messages to
// L < N-1 symbols and uses N(L+1)^(K-1) options. Both are built by the same
// step procedure: step 1 downloads the desired symbols directly from L
// consecutive databases, step k >= 2 downloads a sum of k-1 undesired
// symbols from database 1 and each desired symbol masked by that sum from
// databases 2..L+1. Every base row is followed by its N cyclic shifts.

#ifndef WPIR_SCHEME_H_
#define WPIR_SCHEME_H_

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace wpir {

class Distribution;

enum class SchemeKind { kTsc, kAlternative };

std::string SchemeKindName(SchemeKind kind);  // "tsc" or "alt"
SchemeKind ParseSchemeKind(const std::string& name);

struct SchemeParams {
  int n_databases = 2;
  int n_messages = 1;
  int message_len = 1;
  SchemeKind kind = SchemeKind::kTsc;

  static SchemeParams Tsc(int n_databases, int n_messages);
  static SchemeParams Alternative(int n_databases, int n_messages,
                                  int message_len);

  // Throws ParameterError when the invariants of `kind` do not hold.
  void Validate() const;

  // N^K for TSC, N(L+1)^(K-1) for the alternative scheme.
  int64_t OptionCount() const;
  int LowCost() const { return message_len; }
  int HighCost() const { return message_len + 1; }

  friend bool operator==(const SchemeParams&, const SchemeParams&) = default;
};

// Symbol W_k(l), 1-based on both indices.
struct SymbolRef {
  int message = 1;
  int symbol = 1;

  friend auto operator<=>(const SymbolRef&, const SymbolRef&) = default;
};

// A requested sum of symbols. `terms` is kept sorted and duplicate free.
struct QueryElement {
  std::vector<SymbolRef> terms;

  bool empty() const { return terms.empty(); }
  friend auto operator<=>(const QueryElement&, const QueryElement&) = default;
};

struct QueryOption {
  // One entry per database; an empty list is the empty query.
  std::vector<std::vector<QueryElement>> per_database;
  int download_cost = 0;
};

struct QueryStructure {
  SchemeParams params;
  int theta = 1;
  std::vector<QueryOption> options;

  int64_t size() const { return static_cast<int64_t>(options.size()); }
};

// Order-normalized form of what one database receives. Equal for two
// queries requesting the same sums, whichever message index produced them.
class CanonicalQuery {
 public:
  CanonicalQuery() = default;
  explicit CanonicalQuery(std::span<const QueryElement> elements);

  const std::vector<QueryElement>& elements() const { return elements_; }
  bool empty() const { return elements_.empty(); }

  // "1:1+2:1" per element, elements joined by ','; "" for the empty query.
  std::string ToString() const;

  friend auto operator<=>(const CanonicalQuery&,
                          const CanonicalQuery&) = default;

 private:
  std::vector<QueryElement> elements_;
};

using QueryMarginal = std::map<CanonicalQuery, double>;

// Builds the full ordered option table for retrieving W_theta. The first N
// options are the direct downloads, the remaining ones the masked downloads.
QueryStructure BuildStructure(const SchemeParams& params, int theta);

// One structure per theta in [1..K], in theta order.
std::vector<QueryStructure> BuildAllStructures(const SchemeParams& params);

// Indices are 0-based.
CanonicalQuery CanonicalQueryAt(const QueryStructure& structure,
                                int64_t option_index, int db_index);

// Pr(Q_n = q) at database `db_index` (0-based) when options are drawn from
// `dist`. Every canonical query that appears in the column is present, even
// with probability zero.
QueryMarginal PerDbQueryDistribution(const QueryStructure& structure,
                                     const Distribution& dist, int db_index);

// Per-option download costs, in option order.
std::vector<int> DownloadCosts(const QueryStructure& structure);

}  // namespace wpir

#endif  // WPIR_SCHEME_H_
