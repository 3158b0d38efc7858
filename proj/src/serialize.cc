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

#include "wpir/serialize.h"

#include <charconv>
#include <cmath>
#include <sstream>

#include "wpir/errors.h"

namespace wpir {
namespace {

std::string TermKey(const SymbolRef& ref) {
  return std::to_string(ref.message) + ":" + std::to_string(ref.symbol);
}

SymbolRef ParseTermKey(const std::string& key) {
  const auto colon = key.find(':');
  if (colon == std::string::npos) {
    throw ParameterError("symbol key '" + key + "' is not of the form k:l");
  }
  try {
    return {std::stoi(key.substr(0, colon)), std::stoi(key.substr(colon + 1))};
  } catch (const std::exception&) {
    throw ParameterError("symbol key '" + key + "' is not of the form k:l");
  }
}

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double ParseDouble(const std::string& text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParameterError("cannot parse number '" + text + "'");
  }
  return value;
}

}  // namespace

std::string FormatDouble(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

Json ParamsToJson(const SchemeParams& params) {
  return Json{{"scheme", SchemeKindName(params.kind)},
              {"N", params.n_databases},
              {"K", params.n_messages},
              {"L", params.message_len}};
}

SchemeParams ParamsFromJson(const Json& j) {
  SchemeParams p{j.at("N").get<int>(), j.at("K").get<int>(),
                 j.at("L").get<int>(),
                 ParseSchemeKind(j.at("scheme").get<std::string>())};
  p.Validate();
  return p;
}

Json StructureToJson(const QueryStructure& structure) {
  Json options = Json::array();
  for (const auto& option : structure.options) {
    Json per_db = Json::array();
    for (const auto& db : option.per_database) {
      Json elements = Json::array();
      for (const auto& element : db) {
        Json terms = Json::array();
        for (const auto& ref : element.terms) terms.push_back(TermKey(ref));
        elements.push_back(std::move(terms));
      }
      per_db.push_back(std::move(elements));
    }
    options.push_back(
        Json{{"per_database", std::move(per_db)}, {"cost", option.download_cost}});
  }
  return Json{{"params", ParamsToJson(structure.params)},
              {"theta", structure.theta},
              {"options", std::move(options)}};
}

QueryStructure StructureFromJson(const Json& j) {
  QueryStructure s;
  s.params = ParamsFromJson(j.at("params"));
  s.theta = j.at("theta").get<int>();
  for (const auto& jo : j.at("options")) {
    QueryOption option;
    for (const auto& jdb : jo.at("per_database")) {
      std::vector<QueryElement> db;
      for (const auto& je : jdb) {
        QueryElement element;
        for (const auto& key : je) {
          element.terms.push_back(ParseTermKey(key.get<std::string>()));
        }
        db.push_back(std::move(element));
      }
      option.per_database.push_back(std::move(db));
    }
    option.download_cost = jo.at("cost").get<int>();
    s.options.push_back(std::move(option));
  }
  return s;
}

std::string RenderElement(const QueryElement& element) {
  if (element.empty()) return "∅";
  std::string out;
  for (size_t i = 0; i < element.terms.size(); ++i) {
    if (i) out += '+';
    out += "W" + std::to_string(element.terms[i].message) + "(" +
           std::to_string(element.terms[i].symbol) + ")";
  }
  return out;
}

std::string RenderTable(const QueryStructure& structure,
                        const std::optional<Distribution>& dist) {
  if (dist && dist->size() != structure.size()) {
    throw ParameterError("distribution length does not match option count");
  }
  std::ostringstream out;
  out << "Option";
  for (int db = 1; db <= structure.params.n_databases; ++db) {
    out << " | DB " << db;
  }
  out << " | Probability | Download cost\n";
  for (int64_t m = 0; m < structure.size(); ++m) {
    const auto& option = structure.options[m];
    out << m + 1;
    for (const auto& db : option.per_database) {
      std::string cell;
      for (const auto& element : db) {
        if (element.empty()) continue;
        if (!cell.empty()) cell += ",";
        cell += RenderElement(element);
      }
      out << " | " << (cell.empty() ? "∅" : cell);
    }
    out << " | ";
    if (dist) {
      out << FormatDouble((*dist)[m]);
    } else {
      out << 'p' << m + 1;
    }
    out << " | " << option.download_cost << '\n';
  }
  return out.str();
}

Json TranscriptToJson(const RetrievalTranscript& t) {
  Json queries = Json::array();
  for (const auto& q : t.queries) queries.push_back(q.ToString());
  return Json{{"theta", t.theta},
              {"option", t.option_index + 1},
              {"queries", std::move(queries)},
              {"answers", t.answers.per_database},
              {"decoded", t.decoded_message},
              {"downloaded_symbols", t.downloaded_symbols}};
}

Json ReportToJson(const SimulationReport& r) {
  Json leakage = Json::array();
  for (const auto& l : r.empirical_leakage) {
    leakage.push_back(Json{{"alpha", l.order.ToString()}, {"nats", l.nats}});
  }
  Json per_db = Json::array();
  for (size_t k = 0; k < r.per_db_query_counts.size(); ++k) {
    Json dbs = Json::array();
    for (const auto& counts : r.per_db_query_counts[k]) {
      Json column = Json::object();
      for (const auto& [q, c] : counts) column[q.ToString()] = c;
      dbs.push_back(std::move(column));
    }
    per_db.push_back(Json{{"theta", k + 1}, {"databases", std::move(dbs)}});
  }
  return Json{{"params", ParamsToJson(r.params)},
              {"seed", r.seed},
              {"n_trials", r.n_trials},
              {"option_counts", r.option_counts},
              {"theta_counts", r.theta_counts},
              {"downloaded_symbols", r.downloaded_symbols},
              {"empirical_cost_D", r.empirical_cost_D},
              {"empirical_leakage", std::move(leakage)},
              {"per_db_query_counts", std::move(per_db)}};
}

SweepRow ToSweepRow(const TradeoffPoint& p) {
  SweepRow row;
  row.scheme = SchemeKindName(p.scheme.kind);
  row.n_databases = p.scheme.n_databases;
  row.n_messages = p.scheme.n_messages;
  row.message_len = p.scheme.message_len;
  row.alpha = p.order.ToString();
  row.D = p.download_cost;
  row.leakage_nats = p.leakage;
  row.leakage_normalized = p.normalized_leakage;
  row.maximal_leakage_nats = p.maximal_leakage;
  return row;
}

std::string SweepToCsv(std::span<const SweepRow> rows,
                       const std::vector<std::string>& metadata) {
  const bool with_maximal =
      !rows.empty() && rows.front().maximal_leakage_nats.has_value();
  std::ostringstream out;
  for (const auto& line : metadata) out << "# " << line << '\n';
  out << kSweepCsvHeader;
  if (with_maximal) out << ",maximal_leakage_nats";
  out << '\n';
  for (const auto& r : rows) {
    out << r.scheme << ',' << r.n_databases << ',' << r.n_messages << ','
        << r.message_len << ',' << r.alpha << ',' << FormatDouble(r.D) << ','
        << FormatDouble(r.leakage_nats) << ','
        << FormatDouble(r.leakage_normalized);
    if (with_maximal) out << ',' << FormatDouble(r.maximal_leakage_nats.value());
    out << '\n';
  }
  return out.str();
}

Json SweepToJson(std::span<const SweepRow> rows, const Json& metadata) {
  Json points = Json::array();
  for (const auto& r : rows) {
    Json p{{"scheme", r.scheme},
           {"N", r.n_databases},
           {"K", r.n_messages},
           {"L", r.message_len},
           {"alpha", r.alpha},
           {"D", r.D},
           {"leakage_nats", r.leakage_nats},
           {"leakage_normalized", r.leakage_normalized}};
    if (r.maximal_leakage_nats) {
      p["maximal_leakage_nats"] = *r.maximal_leakage_nats;
    }
    points.push_back(std::move(p));
  }
  return Json{{"metadata", metadata.is_null() ? Json::object() : metadata},
              {"points", std::move(points)}};
}

std::vector<SweepRow> SweepFromCsv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::vector<std::string> header;
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    const auto cells = SplitCsvLine(line);
    if (header.empty()) {
      header = cells;
      std::string joined;
      for (size_t i = 0; i < std::min<size_t>(8, header.size()); ++i) {
        joined += (i ? "," : "") + header[i];
      }
      if (joined != kSweepCsvHeader) {
        throw ParameterError("unexpected sweep CSV header: " + line);
      }
      continue;
    }
    if (cells.size() != header.size()) {
      throw ParameterError("sweep CSV row has the wrong number of cells");
    }
    SweepRow r;
    r.scheme = cells[0];
    r.n_databases = std::stoi(cells[1]);
    r.n_messages = std::stoi(cells[2]);
    r.message_len = std::stoi(cells[3]);
    r.alpha = cells[4];
    r.D = ParseDouble(cells[5]);
    r.leakage_nats = ParseDouble(cells[6]);
    r.leakage_normalized = ParseDouble(cells[7]);
    if (cells.size() > 8) r.maximal_leakage_nats = ParseDouble(cells[8]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<SweepRow> SweepFromJson(const Json& j) {
  std::vector<SweepRow> rows;
  for (const auto& p : j.at("points")) {
    SweepRow r;
    r.scheme = p.at("scheme").get<std::string>();
    r.n_databases = p.at("N").get<int>();
    r.n_messages = p.at("K").get<int>();
    r.message_len = p.at("L").get<int>();
    r.alpha = p.at("alpha").get<std::string>();
    r.D = p.at("D").get<double>();
    r.leakage_nats = p.at("leakage_nats").get<double>();
    r.leakage_normalized = p.at("leakage_normalized").get<double>();
    if (p.contains("maximal_leakage_nats")) {
      r.maximal_leakage_nats = p.at("maximal_leakage_nats").get<double>();
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace wpir
