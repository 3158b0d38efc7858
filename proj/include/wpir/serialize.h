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

// JSON, CSV and plain-text renderings. The shapes are documented in
// docs/formats.md.

#ifndef WPIR_SERIALIZE_H_
#define WPIR_SERIALIZE_H_

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"  // nlohmann/json, vendored

#include "wpir/optimizer.h"
#include "wpir/protocol.h"
#include "wpir/scheme.h"

namespace wpir {

using Json = nlohmann::ordered_json;

Json ParamsToJson(const SchemeParams& params);
SchemeParams ParamsFromJson(const Json& j);

// {params, theta, options: [{per_database: [[["k:l", ...], ...], ...],
//  cost}]}
Json StructureToJson(const QueryStructure& structure);
QueryStructure StructureFromJson(const Json& j);

// "W1(1)+W2(1)" for an element, "∅" for an empty database query.
std::string RenderElement(const QueryElement& element);

// One header line, then one "option | DB 1 | ... | DB N | probability |
// cost" line per option. Probabilities are symbolic (p1..pM) unless `dist`
// is given.
std::string RenderTable(const QueryStructure& structure,
                        const std::optional<Distribution>& dist = {});

Json TranscriptToJson(const RetrievalTranscript& transcript);
Json ReportToJson(const SimulationReport& report);

// The fixed sweep CSV header, without the optional maximal-leakage column.
inline constexpr const char* kSweepCsvHeader =
    "scheme,N,K,L,alpha,D,leakage_nats,leakage_normalized";

// One row of a tradeoff sweep in its serialized form.
struct SweepRow {
  std::string scheme;
  int n_databases = 0;
  int n_messages = 0;
  int message_len = 0;
  std::string alpha;
  double D = 0.0;
  double leakage_nats = 0.0;
  double leakage_normalized = 0.0;
  std::optional<double> maximal_leakage_nats;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

SweepRow ToSweepRow(const TradeoffPoint& point);

// `metadata` lines are written as "# key=value" comments before the header.
std::string SweepToCsv(std::span<const SweepRow> rows,
                       const std::vector<std::string>& metadata = {});
Json SweepToJson(std::span<const SweepRow> rows, const Json& metadata = {});

std::vector<SweepRow> SweepFromCsv(const std::string& csv);
std::vector<SweepRow> SweepFromJson(const Json& j);

// Shortest text that parses back to the same double.
std::string FormatDouble(double x);

}  // namespace wpir

#endif  // WPIR_SERIALIZE_H_
