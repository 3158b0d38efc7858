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

// Python bindings. Scheme parameters are passed as keywords (scheme, N, K,
// L) and results come back as plain lists and dicts.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "pybind11/pybind11.h"
#include "pybind11/stl.h"
#include "wpir/errors.h"
#include "wpir/leakage.h"
#include "wpir/optimizer.h"
#include "wpir/protocol.h"
#include "wpir/scheme.h"
#include "wpir/serialize.h"

namespace py = pybind11;

namespace wpir {
namespace {

SchemeParams MakeParams(const std::string& scheme, int n, int k,
                        std::optional<int> l) {
  if (ParseSchemeKind(scheme) == SchemeKind::kTsc) {
    if (l && *l != n - 1) throw ParameterError("tsc fixes L = N - 1");
    return SchemeParams::Tsc(n, k);
  }
  if (!l) throw ParameterError("the alternative scheme needs L");
  return SchemeParams::Alternative(n, k, *l);
}

// Accepts a float (1 -> KL, inf -> max) or a string such as "kl" or "2".
RenyiOrder MakeOrder(const py::object& order) {
  if (py::isinstance<py::str>(order)) {
    return RenyiOrder::Parse(order.cast<std::string>());
  }
  return RenyiOrder::FromAlpha(order.cast<double>());
}

py::object ToPython(const Json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

std::vector<double> ToVector(std::span<const double> s) {
  return {s.begin(), s.end()};
}

#define WPIR_SCHEME_ARGS                                               \
  py::arg("scheme") = "tsc", py::arg("N"), py::arg("K"),               \
      py::arg("L") = py::none()

}  // namespace
}  // namespace wpir

PYBIND11_MODULE(_core, m) {
  using namespace wpir;
  m.doc() = "Weakly private information retrieval: schemes and tradeoffs";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParameterError>(m, "ParameterError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<DivergenceUndefinedError>(
      m, "DivergenceUndefinedError", base.ptr());
  py::register_exception<NormalizationError>(m, "NormalizationError",
                                             base.ptr());
  py::register_exception<InfeasibleError>(m, "InfeasibleError", base.ptr());
  py::register_exception<DecodeError>(m, "DecodeError", base.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());

  m.def("capacity", &Capacity, py::arg("N"), py::arg("K"));

  m.def(
      "option_count",
      [](const std::string& s, int n, int k, std::optional<int> l) {
        return MakeParams(s, n, k, l).OptionCount();
      },
      py::kw_only(), WPIR_SCHEME_ARGS);

  m.def(
      "costs",
      [](const std::string& s, int n, int k, std::optional<int> l) {
        const auto profile = CostProfile::FromParams(MakeParams(s, n, k, l));
        return std::vector<int>(profile.costs().begin(),
                                profile.costs().end());
      },
      py::kw_only(), WPIR_SCHEME_ARGS);

  m.def(
      "structure",
      [](const std::string& s, int n, int k, std::optional<int> l,
         int theta) {
        return ToPython(StructureToJson(
            BuildStructure(MakeParams(s, n, k, l), theta)));
      },
      py::kw_only(), WPIR_SCHEME_ARGS, py::arg("theta") = 1);

  m.def(
      "render_table",
      [](const std::string& s, int n, int k, std::optional<int> l,
         int theta) {
        return RenderTable(BuildStructure(MakeParams(s, n, k, l), theta));
      },
      py::kw_only(), WPIR_SCHEME_ARGS, py::arg("theta") = 1);

  m.def(
      "perfect_privacy_cost",
      [](const std::string& s, int n, int k, std::optional<int> l) {
        return PerfectPrivacyCost(
            CostProfile::FromParams(MakeParams(s, n, k, l)));
      },
      py::kw_only(), WPIR_SCHEME_ARGS);

  m.def(
      "cost_range",
      [](const std::string& s, int n, int k, std::optional<int> l,
         const std::string& mode) {
        if (mode != "theorem" && mode != "simplex") {
          throw ParameterError("mode must be 'theorem' or 'simplex'");
        }
        const auto r = FeasibleCostRange(
            CostProfile::FromParams(MakeParams(s, n, k, l)),
            mode == "theorem" ? RangeMode::kTheorem : RangeMode::kSimplex);
        return std::make_pair(r.lo, r.hi);
      },
      py::kw_only(), WPIR_SCHEME_ARGS, py::arg("mode") = "theorem");

  m.def(
      "optimal_distribution",
      [](double d, const py::object& order, const std::string& s, int n,
         int k, std::optional<int> l) {
        const auto sol = OptimalDistribution(
            CostProfile::FromParams(MakeParams(s, n, k, l)), d,
            MakeOrder(order));
        return ToVector(sol.distribution.probs());
      },
      py::arg("D"), py::arg("order") = 1.0, py::kw_only(), WPIR_SCHEME_ARGS);

  m.def(
      "tradeoff_leakage",
      [](double d, const py::object& order, const std::string& s, int n,
         int k, std::optional<int> l) {
        return TradeoffLeakage(CostProfile::FromParams(MakeParams(s, n, k, l)),
                               d, MakeOrder(order));
      },
      py::arg("D"), py::arg("order"), py::kw_only(), WPIR_SCHEME_ARGS);

  m.def(
      "renyi_divergence",
      [](const std::vector<double>& p, const std::vector<double>& u,
         const py::object& order, bool extended) {
        return RenyiDivergence(
            p, u, MakeOrder(order),
            extended ? SupportPolicy::kExtended : SupportPolicy::kStrict);
      },
      py::arg("p"), py::arg("u"), py::arg("order"),
      py::arg("extended") = false);

  m.def(
      "numeric_oracle",
      [](double d, const py::object& order, const std::string& s, int n,
         int k, std::optional<int> l, double tolerance, int restarts,
         uint64_t seed) {
        OracleConfig config;
        config.tolerance = tolerance;
        config.restarts = restarts;
        config.seed = seed;
        const auto r =
            NumericOracle(CostProfile::FromParams(MakeParams(s, n, k, l)), d,
                          MakeOrder(order), config);
        py::dict out;
        out["distribution"] = ToVector(r.distribution.probs());
        out["objective"] = r.objective;
        out["iterations"] = r.iterations;
        out["residual"] = r.residual;
        return out;
      },
      py::arg("D"), py::arg("order"), py::kw_only(), WPIR_SCHEME_ARGS,
      py::arg("tolerance") = 1e-13, py::arg("restarts") = 0,
      py::arg("seed") = 0);

  m.def(
      "kkt_check",
      [](const std::vector<double>& p, double d, const py::object& order,
         const std::string& s, int n, int k, std::optional<int> l) {
        const auto r =
            KktCheck(CostProfile::FromParams(MakeParams(s, n, k, l)), p, d,
                     MakeOrder(order));
        py::dict out;
        out["stationarity_residual"] = r.stationarity_residual;
        out["cost_residual"] = r.cost_residual;
        out["normalization_residual"] = r.normalization_residual;
        out["slackness_residual"] = r.slackness_residual;
        out["lambda"] = r.lambda;
        out["nu"] = r.nu;
        out["feasible"] = r.feasible;
        out["max_residual"] = r.MaxResidual();
        return out;
      },
      py::arg("p"), py::arg("D"), py::arg("order"), py::kw_only(),
      WPIR_SCHEME_ARGS);

  m.def(
      "sweep",
      [](const std::vector<py::object>& orders, int points, bool maximal,
         const std::string& s, int n, int k, std::optional<int> l) {
        std::vector<RenyiOrder> parsed;
        for (const auto& o : orders) parsed.push_back(MakeOrder(o));
        std::vector<SweepRow> rows;
        for (const auto& p :
             SweepTradeoff(MakeParams(s, n, k, l), parsed, points, maximal)) {
          rows.push_back(ToSweepRow(p));
        }
        return ToPython(SweepToJson(rows)["points"]);
      },
      py::arg("orders"), py::arg("points") = 100,
      py::arg("maximal_leakage") = false, py::kw_only(), WPIR_SCHEME_ARGS);

  m.def(
      "crossover",
      [](int n, int k, int l, const py::object& order,
         const std::string& metric) -> std::optional<double> {
        LeakageMetric which;
        if (metric == "renyi") {
          which = LeakageMetric::kRenyi;
        } else if (metric == "normalized") {
          which = LeakageMetric::kNormalizedRenyi;
        } else if (metric == "maximal") {
          which = LeakageMetric::kMaximal;
        } else {
          throw ParameterError("unknown metric '" + metric + "'");
        }
        const auto c =
            FindCrossover(SchemeParams::Alternative(n, k, l),
                          SchemeParams::Tsc(n, k), MakeOrder(order), which);
        if (!c) return std::nullopt;
        return c->d_star;
      },
      py::arg("N"), py::arg("K"), py::arg("L"), py::arg("order") = 1.0,
      py::arg("metric") = "renyi",
      "Cost below which alt(N, K, L) leaks less than TSC(N, K), or None.");

  m.def(
      "simulate",
      [](int64_t trials, uint64_t seed, std::optional<std::vector<double>> p,
         std::optional<int> theta, uint64_t store_seed,
         const std::vector<py::object>& orders, const std::string& s, int n,
         int k, std::optional<int> l) {
        const SchemeParams params = MakeParams(s, n, k, l);
        const auto profile = CostProfile::FromParams(params);
        const Distribution dist =
            p ? Distribution::FromProbabilities(*p)
              : Distribution::Uniform(profile.size());
        Distribution prior = Distribution::Uniform(params.n_messages);
        if (theta) {
          if (*theta < 1 || *theta > params.n_messages) {
            throw ParameterError("theta must lie in [1, K]");
          }
          prior = Distribution::PointMass(params.n_messages, *theta - 1);
        }
        std::vector<RenyiOrder> parsed;
        for (const auto& o : orders) parsed.push_back(MakeOrder(o));
        const auto store = MessageStore::Random(
            params.n_messages, params.message_len, store_seed);
        const auto structures = BuildAllStructures(params);
        SimulationReport report;
        {
          py::gil_scoped_release release;
          report = Simulate(store, structures, dist, prior, trials, seed,
                            parsed);
        }
        return ToPython(ReportToJson(report));
      },
      py::arg("trials"), py::arg("seed") = 0,
      py::arg("distribution") = py::none(), py::arg("theta") = py::none(),
      py::arg("store_seed") = 1,
      py::arg("orders") = std::vector<py::object>{},
      py::kw_only(), WPIR_SCHEME_ARGS);
}
