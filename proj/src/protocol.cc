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

#include "wpir/protocol.h"

#include <algorithm>
#include <random>

#include "wpir/errors.h"

namespace wpir {
namespace {

// A GF(2) combination of message symbols together with its value.
struct Row {
  std::vector<uint64_t> bits;
  Symbol value = 0;

  bool Test(size_t i) const { return (bits[i / 64] >> (i % 64)) & 1; }
  void Set(size_t i) { bits[i / 64] ^= uint64_t{1} << (i % 64); }
  bool Zero() const {
    return std::all_of(bits.begin(), bits.end(),
                       [](uint64_t w) { return w == 0; });
  }
  void Add(const Row& other) {
    for (size_t w = 0; w < bits.size(); ++w) bits[w] ^= other.bits[w];
    value ^= other.value;
  }
};

uint64_t Mix(uint64_t seed, uint64_t trial) {
  SplitMix64 a(seed);
  SplitMix64 b(a.Next() ^ (trial * 0xD1B54A32D192ED03ULL));
  return b.Next();
}

}  // namespace

MessageStore::MessageStore(std::vector<std::vector<Symbol>> messages)
    : messages_(std::move(messages)) {
  if (messages_.empty()) throw ParameterError("store needs K >= 1 messages");
  message_len_ = static_cast<int>(messages_.front().size());
  if (message_len_ < 1) throw ParameterError("messages must be nonempty");
  for (const auto& m : messages_) {
    if (static_cast<int>(m.size()) != message_len_) {
      throw ParameterError("all messages must have the same length");
    }
  }
}

MessageStore MessageStore::Random(int n_messages, int message_len,
                                  uint64_t seed) {
  if (n_messages < 1 || message_len < 1) {
    throw ParameterError("store dimensions must be positive");
  }
  std::mt19937_64 rng(seed);
  std::vector<std::vector<Symbol>> messages(n_messages,
                                            std::vector<Symbol>(message_len));
  for (auto& m : messages) {
    for (auto& s : m) s = static_cast<Symbol>(rng() & 0xFF);
  }
  return MessageStore(std::move(messages));
}

MessageStore MessageStore::Zero(int n_messages, int message_len) {
  if (n_messages < 1 || message_len < 1) {
    throw ParameterError("store dimensions must be positive");
  }
  return MessageStore(std::vector<std::vector<Symbol>>(
      n_messages, std::vector<Symbol>(message_len, 0)));
}

Symbol MessageStore::At(const SymbolRef& ref) const {
  if (ref.message < 1 || ref.message > n_messages() || ref.symbol < 1 ||
      ref.symbol > message_len_) {
    throw ParameterError("symbol reference outside the store");
  }
  return messages_[ref.message - 1][ref.symbol - 1];
}

std::vector<Symbol> Database::Answer(
    std::span<const QueryElement> query) const {
  std::vector<Symbol> out;
  for (const auto& element : query) {
    if (element.empty()) continue;
    Symbol sum = 0;
    for (const auto& ref : element.terms) sum ^= store_->At(ref);
    out.push_back(sum);
  }
  return out;
}

int64_t Answer::SymbolCount() const {
  int64_t count = 0;
  for (const auto& db : per_database) count += std::ssize(db);
  return count;
}

Answer AnswerQuery(const MessageStore& store, const QueryOption& option) {
  Answer answer;
  answer.per_database.reserve(option.per_database.size());
  for (const auto& query : option.per_database) {
    answer.per_database.push_back(Database(store).Answer(query));
  }
  return answer;
}

std::vector<Symbol> Decode(const QueryOption& option, const Answer& answer,
                           int theta, int message_len) {
  if (answer.per_database.size() != option.per_database.size()) {
    throw DecodeError("answer does not match the option's databases");
  }
  int n_messages = theta;
  for (const auto& db : option.per_database) {
    for (const auto& element : db) {
      for (const auto& ref : element.terms) {
        n_messages = std::max(n_messages, ref.message);
      }
    }
  }
  const size_t columns = static_cast<size_t>(n_messages) * message_len;
  const size_t words = (columns + 63) / 64;
  auto column = [&](const SymbolRef& ref) {
    if (ref.symbol < 1 || ref.symbol > message_len || ref.message < 1) {
      throw DecodeError("answered element references a missing symbol");
    }
    return static_cast<size_t>(ref.message - 1) * message_len +
           (ref.symbol - 1);
  };

  // Reduced echelon basis of the answered sums, keyed by pivot column.
  std::vector<Row> basis;
  std::vector<size_t> pivots;
  for (size_t db = 0; db < option.per_database.size(); ++db) {
    const auto& query = option.per_database[db];
    const auto& values = answer.per_database[db];
    size_t next_value = 0;
    for (const auto& element : query) {
      if (element.empty()) continue;
      if (next_value >= values.size()) {
        throw DecodeError("answer is missing symbols");
      }
      Row row{std::vector<uint64_t>(words, 0), values[next_value++]};
      for (const auto& ref : element.terms) row.Set(column(ref));
      for (size_t i = 0; i < basis.size(); ++i) {
        if (row.Test(pivots[i])) row.Add(basis[i]);
      }
      if (row.Zero()) continue;
      size_t pivot = 0;
      while (!row.Test(pivot)) ++pivot;
      for (auto& b : basis) {
        if (b.Test(pivot)) b.Add(row);
      }
      basis.push_back(std::move(row));
      pivots.push_back(pivot);
    }
    if (next_value != values.size()) {
      throw DecodeError("answer has more symbols than the query requested");
    }
  }

  std::vector<Symbol> message(message_len);
  for (int l = 1; l <= message_len; ++l) {
    Row target{std::vector<uint64_t>(words, 0), 0};
    target.Set(column({theta, l}));
    for (size_t i = 0; i < basis.size(); ++i) {
      if (target.Test(pivots[i])) target.Add(basis[i]);
    }
    if (!target.Zero()) {
      throw DecodeError("option does not determine W_theta(" +
                        std::to_string(l) + ")");
    }
    message[l - 1] = target.value;
  }
  return message;
}

SplitMix64 SplitMix64::ForTrial(uint64_t seed, uint64_t trial) {
  return SplitMix64(Mix(seed, trial));
}

uint64_t SplitMix64::Next() {
  uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::NextDouble() {
  return static_cast<double>(Next() >> 11) * 0x1.0p-53;
}

CategoricalSampler::CategoricalSampler(const Distribution& dist) {
  cdf_.reserve(dist.size());
  double acc = 0.0;
  for (double p : dist.probs()) {
    acc += p;
    cdf_.push_back(acc);
  }
}

int64_t CategoricalSampler::Sample(double u) const {
  // Scale by the final sum so rounding in the cdf cannot strand u.
  const double x = u * cdf_.back();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), x);
  int64_t index = std::min<int64_t>(it - cdf_.begin(), std::ssize(cdf_) - 1);
  // Never land on a zero-probability option sitting on a flat cdf step.
  while (index > 0 && cdf_[index] == cdf_[index - 1]) --index;
  return index;
}

namespace {

RetrievalTranscript RunTrial(const MessageStore& store,
                             const QueryStructure& structure,
                             int64_t option_index) {
  const QueryOption& option = structure.options[option_index];
  RetrievalTranscript t;
  t.theta = structure.theta;
  t.option_index = option_index;
  for (int db = 0; db < structure.params.n_databases; ++db) {
    t.queries.push_back(CanonicalQueryAt(structure, option_index, db));
  }
  t.answers = AnswerQuery(store, option);
  t.downloaded_symbols = t.answers.SymbolCount();
  t.decoded_message =
      Decode(option, t.answers, structure.theta, structure.params.message_len);
  if (t.decoded_message != store.message(structure.theta)) {
    throw DecodeError("decoded message differs from the stored message");
  }
  if (t.downloaded_symbols != option.download_cost) {
    throw DecodeError("downloaded symbol count differs from option cost");
  }
  return t;
}

void CheckStore(const MessageStore& store, const SchemeParams& params) {
  if (store.n_messages() != params.n_messages ||
      store.message_len() != params.message_len) {
    throw ParameterError("store dimensions do not match scheme parameters");
  }
}

}  // namespace

RetrievalTranscript Retrieve(const MessageStore& store,
                             const QueryStructure& structure,
                             const Distribution& dist, uint64_t rng_seed) {
  CheckStore(store, structure.params);
  if (dist.size() != structure.size()) {
    throw ParameterError("distribution length does not match option count");
  }
  SplitMix64 rng = SplitMix64::ForTrial(rng_seed, 0);
  const int64_t option = CategoricalSampler(dist).Sample(rng.NextDouble());
  return RunTrial(store, structure, option);
}

SimulationReport Simulate(const MessageStore& store,
                          std::span<const QueryStructure> structures,
                          const Distribution& dist, const Distribution& prior,
                          int64_t n_trials, uint64_t rng_seed,
                          std::span<const RenyiOrder> orders,
                          const TranscriptSink& sink) {
  if (n_trials < 1) throw ParameterError("n_trials must be >= 1");
  if (structures.empty()) throw ParameterError("no structures given");
  const SchemeParams& params = structures.front().params;
  CheckStore(store, params);
  if (prior.size() != std::ssize(structures) ||
      std::ssize(structures) != params.n_messages) {
    throw ParameterError("need one structure and one prior entry per theta");
  }
  for (size_t k = 0; k < structures.size(); ++k) {
    if (!(structures[k].params == params) ||
        structures[k].theta != static_cast<int>(k) + 1 ||
        structures[k].size() != dist.size()) {
      throw ParameterError("structures must be theta = 1..K of one scheme");
    }
  }

  const int64_t m = dist.size();
  const int n = params.n_databases;
  SimulationReport report;
  report.params = params;
  report.seed = rng_seed;
  report.n_trials = n_trials;
  report.option_counts.assign(m, 0);
  report.theta_counts.assign(params.n_messages, 0);
  report.per_db_query_counts.assign(
      params.n_messages, std::vector<std::map<CanonicalQuery, int64_t>>(n));

  // Canonical queries are fixed per (theta, option, db); build them once.
  std::vector<std::vector<std::vector<CanonicalQuery>>> queries(
      structures.size());
  for (size_t k = 0; k < structures.size(); ++k) {
    queries[k].resize(m);
    for (int64_t o = 0; o < m; ++o) {
      for (int db = 0; db < n; ++db) {
        queries[k][o].push_back(CanonicalQueryAt(structures[k], o, db));
      }
    }
  }
  std::vector<std::vector<std::vector<int64_t>>> query_counts(
      structures.size(), std::vector<std::vector<int64_t>>(
                             m, std::vector<int64_t>(n, 0)));

  const CategoricalSampler theta_sampler(prior);
  const CategoricalSampler option_sampler(dist);
  for (int64_t trial = 0; trial < n_trials; ++trial) {
    SplitMix64 rng = SplitMix64::ForTrial(rng_seed, trial);
    const int64_t k = theta_sampler.Sample(rng.NextDouble());
    const int64_t option = option_sampler.Sample(rng.NextDouble());
    const RetrievalTranscript t = RunTrial(store, structures[k], option);
    ++report.theta_counts[k];
    ++report.option_counts[option];
    report.downloaded_symbols += t.downloaded_symbols;
    for (int db = 0; db < n; ++db) ++query_counts[k][option][db];
    if (sink) sink(t);
  }

  for (size_t k = 0; k < structures.size(); ++k) {
    for (int64_t o = 0; o < m; ++o) {
      for (int db = 0; db < n; ++db) {
        if (query_counts[k][o][db] == 0) continue;
        report.per_db_query_counts[k][db][queries[k][o][db]] +=
            query_counts[k][o][db];
      }
    }
  }

  // Exact: sum of download costs over trials / (n L).
  report.empirical_cost_D =
      static_cast<double>(report.downloaded_symbols) /
      (static_cast<double>(n_trials) * params.message_len);
  const Distribution empirical = EmpiricalDistribution(report.option_counts);
  const Distribution uniform = Distribution::Uniform(m);
  for (const auto& order : orders) {
    report.empirical_leakage.push_back(
        {order, RenyiDivergence(empirical, uniform, order)});
  }
  return report;
}

std::pair<std::vector<double>, std::vector<double>> EmpiricalQueryMarginals(
    const SimulationReport& report, int theta_a, int theta_b, int db_index) {
  const int k_count = static_cast<int>(report.per_db_query_counts.size());
  if (theta_a < 1 || theta_a > k_count || theta_b < 1 || theta_b > k_count) {
    throw ParameterError("theta out of range");
  }
  if (db_index < 0 || db_index >= report.params.n_databases) {
    throw ParameterError("database index out of range");
  }
  const auto& a = report.per_db_query_counts[theta_a - 1][db_index];
  const auto& b = report.per_db_query_counts[theta_b - 1][db_index];
  const double na = static_cast<double>(report.theta_counts[theta_a - 1]);
  const double nb = static_cast<double>(report.theta_counts[theta_b - 1]);
  if (na == 0.0 || nb == 0.0) {
    throw ParameterError("no trials recorded for one of the message indices");
  }
  std::map<CanonicalQuery, std::pair<double, double>> joined;
  for (const auto& [q, c] : a) joined[q].first = c / na;
  for (const auto& [q, c] : b) joined[q].second = c / nb;
  std::pair<std::vector<double>, std::vector<double>> out;
  for (const auto& [q, pr] : joined) {
    out.first.push_back(pr.first);
    out.second.push_back(pr.second);
  }
  return out;
}

}  // namespace wpir
