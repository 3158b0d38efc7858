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

// In-process simulation of the retrieval protocol. Symbols are bytes and
// addition is XOR. Each database only ever sees its own query.

#ifndef WPIR_PROTOCOL_H_
#define WPIR_PROTOCOL_H_

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "wpir/leakage.h"
#include "wpir/scheme.h"

namespace wpir {

using Symbol = uint8_t;

// K messages of L symbols, replicated at every database.
class MessageStore {
 public:
  MessageStore(std::vector<std::vector<Symbol>> messages);
  static MessageStore Random(int n_messages, int message_len, uint64_t seed);
  static MessageStore Zero(int n_messages, int message_len);

  int n_messages() const { return static_cast<int>(messages_.size()); }
  int message_len() const { return message_len_; }
  // 1-based, like SymbolRef. Throws ParameterError when out of range.
  Symbol At(const SymbolRef& ref) const;
  const std::vector<Symbol>& message(int k) const { return messages_[k - 1]; }

 private:
  std::vector<std::vector<Symbol>> messages_;
  int message_len_ = 0;
};

// Stateless replica: answers one query from its copy of the store.
class Database {
 public:
  explicit Database(const MessageStore& store) : store_(&store) {}
  std::vector<Symbol> Answer(std::span<const QueryElement> query) const;

 private:
  const MessageStore* store_;
};

struct Answer {
  // Aligned with the option's per-database QueryElements.
  std::vector<std::vector<Symbol>> per_database;

  int64_t SymbolCount() const;
};

Answer AnswerQuery(const MessageStore& store, const QueryOption& option);

// Recovers W_theta by cancelling known sums (Gaussian elimination over
// GF(2) on the requested symbol sets). Throws DecodeError when the option
// does not determine every desired symbol.
std::vector<Symbol> Decode(const QueryOption& option, const Answer& answer,
                           int theta, int message_len);

// Counter-based generator: trial t of a run seeded with s uses the stream
// SplitMix64(Mix(s, t)), so trials can be replayed independently.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t state) : state_(state) {}
  static SplitMix64 ForTrial(uint64_t seed, uint64_t trial);

  uint64_t Next();
  // Uniform in [0, 1) with 53 random bits.
  double NextDouble();

 private:
  uint64_t state_;
};

// Inverse-CDF sampler over option indices.
class CategoricalSampler {
 public:
  explicit CategoricalSampler(const Distribution& dist);
  int64_t Sample(double u) const;

 private:
  std::vector<double> cdf_;
};

struct RetrievalTranscript {
  int theta = 1;
  int64_t option_index = 0;  // 0-based
  std::vector<CanonicalQuery> queries;
  Answer answers;
  std::vector<Symbol> decoded_message;
  int64_t downloaded_symbols = 0;
};

// Samples an option, runs every database, decodes and checks the result
// against the store. Throws DecodeError on a mismatch.
RetrievalTranscript Retrieve(const MessageStore& store,
                             const QueryStructure& structure,
                             const Distribution& dist, uint64_t rng_seed);

struct OrderLeakage {
  RenyiOrder order;
  double nats;
};

struct SimulationReport {
  SchemeParams params;
  uint64_t seed = 0;
  int64_t n_trials = 0;
  std::vector<int64_t> option_counts;  // length M
  std::vector<int64_t> theta_counts;   // length K
  int64_t downloaded_symbols = 0;
  double empirical_cost_D = 0.0;
  // D_alpha(empirical option distribution || uniform).
  std::vector<OrderLeakage> empirical_leakage;
  // [theta - 1][db] -> canonical query -> count
  std::vector<std::vector<std::map<CanonicalQuery, int64_t>>>
      per_db_query_counts;
};

using TranscriptSink = std::function<void(const RetrievalTranscript&)>;

// Runs n_trials retrievals with theta drawn from `prior` and the option
// from `dist`. `structures` holds one structure per theta.
SimulationReport Simulate(const MessageStore& store,
                          std::span<const QueryStructure> structures,
                          const Distribution& dist, const Distribution& prior,
                          int64_t n_trials, uint64_t rng_seed,
                          std::span<const RenyiOrder> orders,
                          const TranscriptSink& sink = {});

// Empirical Pr(Q_n = q | theta) from a report, over the union of queries
// seen for any theta, aligned across the two returned vectors.
std::pair<std::vector<double>, std::vector<double>> EmpiricalQueryMarginals(
    const SimulationReport& report, int theta_a, int theta_b, int db_index);

}  // namespace wpir

#endif  // WPIR_PROTOCOL_H_
