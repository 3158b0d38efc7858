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

#include "wpir/cli.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "wpir/errors.h"
#include "wpir/leakage.h"
#include "wpir/optimizer.h"
#include "wpir/protocol.h"
#include "wpir/scheme.h"
#include "wpir/serialize.h"

namespace wpir::cli {
namespace {

// Raised for bad flag combinations discovered after parsing.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SchemeFlags {
  std::string scheme = "tsc";
  int n_databases = 3;
  int n_messages = 2;
  std::optional<int> message_len;

  void Attach(CLI::App* app, bool allow_all) {
    auto* opt = app->add_option("--scheme", scheme, "tsc or alt")
                    ->capture_default_str();
    opt->check(allow_all ? CLI::IsMember({"tsc", "alt", "all"})
                         : CLI::IsMember({"tsc", "alt"}));
    app->add_option("-N,--databases", n_databases, "number of databases")
        ->capture_default_str();
    app->add_option("-K,--messages", n_messages, "number of messages")
        ->capture_default_str();
    app->add_option("-L,--message-len", message_len,
                    "message length (alternative scheme)");
  }

  SchemeParams Single() const {
    if (scheme == "tsc") {
      if (message_len && *message_len != n_databases - 1) {
        throw ParameterError("TSC scheme fixes L = N - 1");
      }
      return SchemeParams::Tsc(n_databases, n_messages);
    }
    if (!message_len) throw UsageError("--scheme alt requires -L");
    return SchemeParams::Alternative(n_databases, n_messages, *message_len);
  }

  // TSC and/or every requested alternative message length.
  std::vector<SchemeParams> All() const {
    std::vector<SchemeParams> out;
    if (scheme == "tsc" || scheme == "all") {
      out.push_back(SchemeParams::Tsc(n_databases, n_messages));
    }
    if (scheme == "alt" || scheme == "all") {
      if (message_len) {
        out.push_back(
            SchemeParams::Alternative(n_databases, n_messages, *message_len));
      } else {
        for (int l = 1; l <= n_databases - 2; ++l) {
          out.push_back(SchemeParams::Alternative(n_databases, n_messages, l));
        }
        if (scheme == "alt" && out.empty()) {
          throw ParameterError("alternative scheme needs N >= 3");
        }
      }
    }
    return out;
  }
};

struct OutputFlags {
  std::string format;
  std::string output;

  void Attach(CLI::App* app, std::string default_format,
              std::vector<std::string> formats) {
    format = std::move(default_format);
    app->add_option("--format", format, "output format")
        ->check(CLI::IsMember(formats))
        ->capture_default_str();
    app->add_option("-o,--output", output,
                    "write to this file (relative paths resolve against "
                    "$WPIR_OUTPUT_DIR when set)");
  }
};

std::filesystem::path ResolveOutput(const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_relative()) {
    if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) {
      p = std::filesystem::path(dir) / p;
    }
  }
  return p;
}

void Emit(const OutputFlags& flags, const std::string& text,
          std::ostream& out) {
  if (flags.output.empty()) {
    out << text;
    return;
  }
  const auto path = ResolveOutput(flags.output);
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw UsageError("cannot open output file " + path.string());
  file << text;
}

std::vector<RenyiOrder> ParseOrders(const std::vector<std::string>& texts) {
  std::vector<RenyiOrder> orders;
  for (const auto& t : texts) orders.push_back(RenyiOrder::Parse(t));
  if (orders.empty()) throw UsageError("at least one --alpha is required");
  return orders;
}

std::string Fixed(double x, int digits = 6) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << x;
  return s.str();
}

// ---- table ---------------------------------------------------------------

struct TableCommand {
  SchemeFlags scheme;
  OutputFlags output;
  int theta = 1;
  std::optional<double> at_d;

  void Attach(CLI::App* app) {
    scheme.Attach(app, false);
    output.Attach(app, "pretty", {"pretty", "json"});
    app->add_option("--theta", theta, "desired message index")
        ->capture_default_str();
    app->add_option("--at-D", at_d,
                    "fill the probability column with the optimal "
                    "distribution at this download cost");
  }

  int Run(std::ostream& out) const {
    const SchemeParams params = scheme.Single();
    const QueryStructure structure = BuildStructure(params, theta);
    std::optional<Distribution> dist;
    if (at_d) {
      dist = OptimalDistribution(CostProfile::FromStructure(structure), *at_d,
                                 RenyiOrder::Kl())
                 .distribution;
    }
    if (output.format == "json") {
      Json j = StructureToJson(structure);
      if (dist) {
        j["D"] = *at_d;
        j["probabilities"] =
            std::vector<double>(dist->probs().begin(), dist->probs().end());
      }
      Emit(output, j.dump(2) + "\n", out);
    } else {
      Emit(output, RenderTable(structure, dist), out);
    }
    return kExitOk;
  }
};

// ---- tradeoff ------------------------------------------------------------

struct TradeoffCommand {
  SchemeFlags scheme;
  OutputFlags output;
  std::vector<std::string> alphas{"1", "2", "inf"};
  int points = 100;
  bool normalize = false;
  bool maximal = false;

  void Attach(CLI::App* app) {
    scheme.Attach(app, true);
    output.Attach(app, "csv", {"csv", "json", "pretty"});
    app->add_option("--alpha", alphas, "Renyi orders (number, 1 or inf)")
        ->delimiter(',')
        ->capture_default_str();
    app->add_option("--points", points, "points per curve")
        ->check(CLI::Range(2, 1'000'000))
        ->capture_default_str();
    app->add_flag("--normalize", normalize,
                  "pretty output shows leakage divided by H_alpha(U)");
    app->add_flag("--maximal-leakage", maximal,
                  "add a maximal_leakage_nats column");
  }

  int Run(std::ostream& out) const {
    const auto orders = ParseOrders(alphas);
    std::vector<SweepRow> rows;
    for (const auto& params : scheme.All()) {
      for (const auto& p : SweepTradeoff(params, orders, points, maximal)) {
        rows.push_back(ToSweepRow(p));
      }
    }
    std::string alpha_list;
    for (const auto& a : orders) {
      alpha_list += (alpha_list.empty() ? "" : ";") + a.ToString();
    }
    if (output.format == "json") {
      Json meta{{"command", "tradeoff"},
                {"scheme", scheme.scheme},
                {"N", scheme.n_databases},
                {"K", scheme.n_messages},
                {"alpha", alpha_list},
                {"points", points},
                {"units", "nats"}};
      Emit(output, SweepToJson(rows, meta).dump(2) + "\n", out);
    } else if (output.format == "csv") {
      std::vector<std::string> meta{
          "command=tradeoff",
          "scheme=" + scheme.scheme,
          "N=" + std::to_string(scheme.n_databases),
          "K=" + std::to_string(scheme.n_messages),
          "alpha=" + alpha_list,
          "points=" + std::to_string(points),
          "units=nats"};
      Emit(output, SweepToCsv(rows, meta), out);
    } else {
      std::ostringstream s;
      s << "scheme  N  K  L  alpha        D  "
        << (normalize ? "leakage/H(U)" : "leakage(nats)");
      if (maximal) s << "  maximal(nats)";
      s << '\n';
      for (const auto& r : rows) {
        s << std::setw(6) << std::left << r.scheme << std::right
          << std::setw(3) << r.n_databases << std::setw(3) << r.n_messages
          << std::setw(3) << r.message_len << std::setw(7) << r.alpha
          << std::setw(9) << Fixed(r.D, 4) << std::setw(14)
          << Fixed(normalize ? r.leakage_normalized : r.leakage_nats);
        if (r.maximal_leakage_nats) {
          s << std::setw(15) << Fixed(*r.maximal_leakage_nats);
        }
        s << '\n';
      }
      Emit(output, s.str(), out);
    }
    return kExitOk;
  }
};

// ---- simulate ------------------------------------------------------------

struct SimulateCommand {
  SchemeFlags scheme;
  OutputFlags output;
  std::string distribution = "uniform";
  std::optional<double> target_d;
  std::vector<std::string> alphas{"1", "2", "inf"};
  int64_t trials = 100'000;
  uint64_t seed = 0;
  uint64_t store_seed = 1;
  std::optional<int> theta;
  std::string transcripts;

  void Attach(CLI::App* app) {
    scheme.Attach(app, false);
    output.Attach(app, "json", {"json"});
    app->add_option("--distribution", distribution,
                    "uniform, or the optimal distribution at --target-D "
                    "(optimal, lemma1 and lemma2 are synonyms)")
        ->check(CLI::IsMember({"uniform", "optimal", "lemma1", "lemma2"}))
        ->capture_default_str();
    app->add_option("--target-D", target_d, "download cost for the optimum");
    app->add_option("--alpha", alphas, "orders for empirical leakage")
        ->delimiter(',')
        ->capture_default_str();
    app->add_option("--trials", trials, "number of retrievals")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--seed", seed, "sampling seed")->capture_default_str();
    app->add_option("--store-seed", store_seed, "seed of the random messages")
        ->capture_default_str();
    app->add_option("--theta", theta,
                    "fix the desired index (default: uniform over [1, K])");
    app->add_option("--transcripts", transcripts,
                    "stream every transcript to this JSON-lines file");
  }

  int Run(std::ostream& out, std::ostream& err) const {
    const SchemeParams params = scheme.Single();
    const auto orders = ParseOrders(alphas);
    const CostProfile profile = CostProfile::FromParams(params);
    Distribution dist = Distribution::Uniform(profile.size());
    if (distribution != "uniform") {
      if (!target_d) throw UsageError("--distribution " + distribution +
                                      " requires --target-D");
      dist = OptimalDistribution(profile, *target_d, RenyiOrder::Kl())
                 .distribution;
    }
    Distribution prior = Distribution::Uniform(params.n_messages);
    if (theta) {
      if (*theta < 1 || *theta > params.n_messages) {
        throw ParameterError("--theta must lie in [1, K]");
      }
      prior = Distribution::PointMass(params.n_messages, *theta - 1);
    }
    const auto store =
        MessageStore::Random(params.n_messages, params.message_len, store_seed);
    const auto structures = BuildAllStructures(params);

    std::ofstream transcript_file;
    TranscriptSink sink;
    if (!transcripts.empty()) {
      const auto path = ResolveOutput(transcripts);
      if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
      }
      transcript_file.open(path, std::ios::binary);
      if (!transcript_file) {
        throw UsageError("cannot open transcript file " + transcripts);
      }
      sink = [&](const RetrievalTranscript& t) {
        transcript_file << TranscriptToJson(t).dump() << '\n';
      };
    }
    SimulationReport report;
    try {
      report = Simulate(store, structures, dist, prior, trials, seed, orders,
                        sink);
    } catch (const DecodeError& e) {
      err << "decode failure: " << e.what() << '\n';
      return kExitVerificationFailed;
    }
    Json j = ReportToJson(report);
    j["distribution"] = distribution;
    if (target_d) j["target_D"] = *target_d;
    j["store_seed"] = store_seed;
    Emit(output, j.dump(2) + "\n", out);
    return kExitOk;
  }
};

// ---- verify --------------------------------------------------------------

struct VerifyCommand {
  OutputFlags output;
  int max_n = 4;
  int max_k = 3;
  int points = 20;
  std::vector<std::string> alphas{"0.5", "1", "2", "5", "inf"};
  double coord_tol = 1e-5;
  double objective_tol = 1e-6;
  double kkt_tol = 1e-9;
  bool perturb = false;
  bool quiet = false;

  void Attach(CLI::App* app) {
    output.Attach(app, "pretty", {"pretty", "json"});
    app->add_option("--max-N", max_n, "largest N in the grid")
        ->check(CLI::Range(2, 6))
        ->capture_default_str();
    app->add_option("--max-K", max_k, "largest K in the grid")
        ->check(CLI::Range(1, 4))
        ->capture_default_str();
    app->add_option("--points", points, "D values per scheme")
        ->check(CLI::Range(2, 1000))
        ->capture_default_str();
    app->add_option("--alpha", alphas, "orders to verify")
        ->delimiter(',')
        ->capture_default_str();
    app->add_option("--coordinate-tol", coord_tol)->capture_default_str();
    app->add_option("--objective-tol", objective_tol)->capture_default_str();
    app->add_option("--kkt-tol", kkt_tol)->capture_default_str();
    app->add_flag("--perturb", perturb,
                  "negative control: check a perturbed closed form");
    app->add_flag("-q,--quiet", quiet, "only print failing rows");
  }

  int Run(std::ostream& out, std::ostream& err) const {
    const auto orders = ParseOrders(alphas);
    std::vector<SchemeParams> grid;
    for (int n = 2; n <= max_n; ++n) {
      for (int k = 1; k <= max_k; ++k) {
        grid.push_back(SchemeParams::Tsc(n, k));
        for (int l = 1; l <= n - 2; ++l) {
          grid.push_back(SchemeParams::Alternative(n, k, l));
        }
      }
    }

    Json rows = Json::array();
    std::ostringstream table;
    table << "scheme  N  K  L  alpha         D   coord_err  objective_err"
             "  kkt_closed  kkt_oracle  status\n";
    int failures = 0;
    int checked = 0;
    for (const auto& params : grid) {
      const CostProfile profile = CostProfile::FromParams(params);
      const Interval range = FeasibleCostRange(profile, RangeMode::kTheorem);
      const int n_points = range.hi > range.lo ? points : 1;
      for (const auto& order : orders) {
        for (int i = 0; i < n_points; ++i) {
          const double D =
              n_points == 1 || i == n_points - 1
                  ? range.hi
                  : range.lo + (range.hi - range.lo) * i / (n_points - 1);
          Json row{{"scheme", SchemeKindName(params.kind)},
                   {"N", params.n_databases},
                   {"K", params.n_messages},
                   {"L", params.message_len},
                   {"alpha", order.ToString()},
                   {"D", D}};
          bool ok = true;
          const Distribution optimum =
              OptimalDistribution(profile, D, order).distribution;
          std::vector<double> closed(optimum.probs().begin(),
                                     optimum.probs().end());
          if (perturb) {
            // Shift mass between two direct options; stays feasible.
            const double delta = 0.25 * closed[0];
            closed[0] -= delta;
            closed[std::min<int64_t>(1, profile.size() - 1)] += delta;
          }
          const double closed_value = TradeoffLeakage(profile, D, order);
          const KktReport kkt_closed = KktCheck(profile, closed, D, order);
          row["kkt_closed"] = kkt_closed.MaxResidual();
          ok = ok && kkt_closed.MaxResidual() <= kkt_tol;

          double coord_err = 0.0;
          double objective_err = 0.0;
          double kkt_oracle = 0.0;
          try {
            const OracleResult oracle = NumericOracle(profile, D, order);
            objective_err = std::abs(oracle.objective - closed_value);
            if (order.kind() != RenyiOrder::Kind::kMax) {
              for (size_t m = 0; m < closed.size(); ++m) {
                coord_err = std::max(
                    coord_err, std::abs(oracle.distribution[m] - closed[m]));
              }
              ok = ok && coord_err <= coord_tol;
            } else {
              kkt_oracle =
                  KktCheck(profile, oracle.distribution.probs(), D, order)
                      .MaxResidual();
              ok = ok && kkt_oracle <= kkt_tol;
            }
            ok = ok && objective_err <= objective_tol;
          } catch (const ConvergenceError& e) {
            row["error"] = e.what();
            ok = false;
          }
          row["coordinate_error"] = coord_err;
          row["objective_error"] = objective_err;
          row["kkt_oracle"] = kkt_oracle;
          row["pass"] = ok;
          ++checked;
          if (!ok) ++failures;
          if (!ok || !quiet) {
            table << std::setw(6) << std::left
                  << SchemeKindName(params.kind) << std::right << std::setw(3)
                  << params.n_databases << std::setw(3) << params.n_messages
                  << std::setw(3) << params.message_len << std::setw(7)
                  << order.ToString() << std::setw(10) << Fixed(D, 5)
                  << std::setw(12) << std::scientific << std::setprecision(2)
                  << coord_err << std::setw(15) << objective_err
                  << std::setw(12) << kkt_closed.MaxResidual() << std::setw(12)
                  << kkt_oracle << std::defaultfloat << "  "
                  << (ok ? "ok" : "FAIL") << '\n';
          }
          rows.push_back(std::move(row));
        }
      }
    }
    table << checked << " points checked, " << failures << " failed\n";
    if (output.format == "json") {
      Json j{{"checked", checked},
             {"failed", failures},
             {"tolerances",
              {{"coordinate", coord_tol},
               {"objective", objective_tol},
               {"kkt", kkt_tol}}},
             {"perturbed", perturb},
             {"rows", std::move(rows)}};
      Emit(output, j.dump(2) + "\n", out);
    } else {
      Emit(output, table.str(), out);
    }
    if (failures > 0) {
      err << failures << " verification point(s) failed\n";
      return kExitVerificationFailed;
    }
    return kExitOk;
  }
};

// ---- crossover -----------------------------------------------------------

struct CrossoverCommand {
  OutputFlags output;
  int n_databases = 3;
  int n_messages = 2;
  std::vector<std::string> alphas{"1"};

  void Attach(CLI::App* app) {
    output.Attach(app, "pretty", {"pretty", "json"});
    app->add_option("-N,--databases", n_databases)->capture_default_str();
    app->add_option("-K,--messages", n_messages)->capture_default_str();
    app->add_option("--alpha", alphas, "Renyi orders")
        ->delimiter(',')
        ->capture_default_str();
  }

  int Run(std::ostream& out) const {
    if (n_databases < 3) {
      throw ParameterError("crossover needs N >= 3 for an alternative scheme");
    }
    const auto orders = ParseOrders(alphas);
    const SchemeParams tsc = SchemeParams::Tsc(n_databases, n_messages);
    const std::pair<const char*, LeakageMetric> metrics[] = {
        {"renyi", LeakageMetric::kRenyi},
        {"normalized", LeakageMetric::kNormalizedRenyi},
        {"maximal", LeakageMetric::kMaximal}};

    Json results = Json::array();
    std::ostringstream s;
    s << "N=" << n_databases << " K=" << n_messages
      << "  (alternative scheme leaks less on [1, D*))\n";
    for (int l = 1; l <= n_databases - 2; ++l) {
      const auto alt = SchemeParams::Alternative(n_databases, n_messages, l);
      for (const auto& order : orders) {
        for (const auto& [name, metric] : metrics) {
          // Maximal leakage does not depend on the order; report it once.
          if (metric == LeakageMetric::kMaximal && !(order == orders.front())) {
            continue;
          }
          const auto c = FindCrossover(alt, tsc, order, metric);
          Json r{{"L", l},
                 {"alpha", metric == LeakageMetric::kMaximal
                               ? std::string("-")
                               : order.ToString()},
                 {"metric", name}};
          s << "L=" << l << " metric=" << std::setw(10) << std::left << name
            << std::right << " alpha=" << std::setw(4)
            << r["alpha"].get<std::string>() << "  ";
          if (c) {
            r["D_star"] = c->d_star;
            r["dominance"] = {c->dominance.lo, c->dominance.hi};
            s << "D* = " << Fixed(c->d_star, 9) << "  region [" << Fixed(1.0, 4)
              << ", " << Fixed(c->d_star, 6) << ")\n";
          } else {
            r["D_star"] = nullptr;
            s << "no crossover in the common range\n";
          }
          results.push_back(std::move(r));
        }
      }
    }
    if (output.format == "json") {
      Emit(output,
           Json{{"N", n_databases}, {"K", n_messages}, {"crossovers", results}}
                   .dump(2) +
               "\n",
           out);
    } else {
      Emit(output, s.str(), out);
    }
    return kExitOk;
  }
};

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Weakly private information retrieval toolkit", "wpir"};
  app.require_subcommand(1);

  TableCommand table;
  TradeoffCommand tradeoff;
  SimulateCommand simulate;
  VerifyCommand verify;
  CrossoverCommand crossover;
  auto* table_app = app.add_subcommand("table", "print a query structure");
  auto* tradeoff_app =
      app.add_subcommand("tradeoff", "sweep the optimal leakage over D");
  auto* simulate_app =
      app.add_subcommand("simulate", "run the protocol end to end");
  auto* verify_app = app.add_subcommand(
      "verify", "check closed forms against the numeric oracle and KKT");
  auto* crossover_app = app.add_subcommand(
      "crossover", "where the alternative scheme stops leaking less");
  table.Attach(table_app);
  tradeoff.Attach(tradeoff_app);
  simulate.Attach(simulate_app);
  verify.Attach(verify_app);
  crossover.Attach(crossover_app);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (table_app->parsed()) return table.Run(out);
    if (tradeoff_app->parsed()) return tradeoff.Run(out);
    if (simulate_app->parsed()) return simulate.Run(out, err);
    if (verify_app->parsed()) return verify.Run(out, err);
    if (crossover_app->parsed()) return crossover.Run(out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace wpir::cli
