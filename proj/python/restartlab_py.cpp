#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "restartlab/config.hpp"
#include "restartlab/engine.hpp"
#include "restartlab/oracle.hpp"

namespace py = pybind11;
using nlohmann::json;
using namespace restartlab;

namespace {

RuntimeDistribution dist_from_spec(const std::string& spec) {
  return parse_distribution(json::parse(spec));
}

Strategy strategy_from_spec(const std::string& spec) { return parse_strategy(json::parse(spec)); }

ConcaveTransform transform_from_name(const std::string& name) { return parse_transform(name); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Restart strategies for Las Vegas algorithms: sequences, schedules, "
            "exact and Monte Carlo evaluation, and optimal-baseline oracles.";

  py::class_<RuntimeDistribution>(m, "Distribution")
      .def_static("from_spec", &dist_from_spec, py::arg("spec_json"))
      .def("cdf", &RuntimeDistribution::cdf, py::arg("alpha"))
      .def("quantile", &RuntimeDistribution::quantile, py::arg("q"))
      .def("expected_min", &RuntimeDistribution::expected_min, py::arg("alpha"))
      .def("mean", &RuntimeDistribution::mean)
      .def("moment", &RuntimeDistribution::moment, py::arg("a"))
      .def("mass_at_infinity", &RuntimeDistribution::mass_at_infinity)
      .def("sample",
           [](const RuntimeDistribution& d, std::uint64_t seed, std::size_t n) {
             RandomStream rng(seed);
             std::vector<double> out(n);
             for (auto& x : out) x = d.sample(rng);
             return out;
           },
           py::arg("seed"), py::arg("n") = 1)
      .def("__repr__", [](const RuntimeDistribution& d) { return "<Distribution " + d.label() + ">"; });

  m.def("luby", [](std::size_t k) { return luby_value(k); }, py::arg("k"),
        "k-th term of the reluctant-doubling sequence (0-indexed)");
  m.def("geometric_quantile",
        [](double q, std::size_t k) { return geometric_quantile_value(q, k); }, py::arg("q"),
        py::arg("k"), "S^q_k = (1 - q/2)^{-k}");

  m.def("sequence_values",
        [](const std::string& strategy, std::size_t n, std::uint64_t seed) {
          const Strategy s = strategy_from_spec(strategy);
          SchedulePlayer player(s);
          RandomStream rng(seed);
          std::vector<std::pair<std::size_t, double>> out;
          out.reserve(n);
          for (std::size_t k = 0; k < n; ++k) out.push_back(player.next(rng));
          return out;
        },
        py::arg("strategy_json"), py::arg("n"), py::arg("seed") = 1,
        "first n (sub_index, cutoff) pairs of a strategy");

  m.def("monte_carlo",
        [](const std::string& strategy, const std::string& dist, std::size_t n, std::uint64_t seed,
           double horizon, unsigned threads) {
          const MCStats s = monte_carlo(strategy_from_spec(strategy), dist_from_spec(dist), n, seed,
                                        horizon, threads);
          py::dict d;
          d["n_trials"] = s.n_trials;
          d["mean_actual"] = s.mean_actual;
          d["stderr_actual"] = s.stderr_actual;
          d["mean_charged"] = s.mean_charged;
          d["stderr_charged"] = s.stderr_charged;
          d["truncation_rate"] = s.truncation_rate;
          d["seed"] = s.seed;
          return d;
        },
        py::arg("strategy_json"), py::arg("dist_json"), py::arg("n"), py::arg("seed") = 1,
        py::arg("horizon") = 1e9, py::arg("threads") = 1);

  m.def("exact_expected_time",
        [](const std::string& strategy, const std::string& dist, double tol) {
          const Strategy s = strategy_from_spec(strategy);
          const auto r = exact_expected_time(s.sequence(), dist_from_spec(dist), tol);
          return py::make_tuple(r.lbar, r.lbar_plus);
        },
        py::arg("strategy_json"), py::arg("dist_json"), py::arg("tol") = 1e-12,
        "(lbar, lbar_plus) of a deterministic strategy");

  m.def("optimal_constant",
        [](const std::string& dist) {
          const auto r = optimal_constant(dist_from_spec(dist));
          return py::make_tuple(r.alphastar, r.ellstar);
        },
        py::arg("dist_json"), "(alphastar, ellstar)");
  m.def("lstar",
        [](const std::string& dist) {
          const auto r = lstar(dist_from_spec(dist));
          return py::make_tuple(r.qstar, r.lstar);
        },
        py::arg("dist_json"), "(qstar, lstar)");
  m.def("mu_phi",
        [](const std::string& dist, const std::string& transform) {
          return mu_phi(dist_from_spec(dist), transform_from_name(transform));
        },
        py::arg("dist_json"), py::arg("transform"));
  m.def("psi", [](double a, double b) { return psi(a, b); }, py::arg("a"), py::arg("b"));
  m.def("bound_quantile",
        [](const std::string& dist, double q) { return bound_quantile(dist_from_spec(dist), q); },
        py::arg("dist_json"), py::arg("q"));
  m.def("bound_sprs",
        [](const std::string& dist, std::size_t i_max) { return bound_sprs(dist_from_spec(dist), i_max); },
        py::arg("dist_json"), py::arg("i_max") = 64);
  m.def("bound_ssprs",
        [](const std::string& dist, std::size_t i_max) { return bound_ssprs(dist_from_spec(dist), i_max); },
        py::arg("dist_json"), py::arg("i_max") = 64);
  m.def("c_power", &c_power, py::arg("r"), py::arg("beta"), py::arg("eps"));
  m.def("c_general",
        [](double r, const std::string& transform, double eps) {
          return c_general(r, transform_from_name(transform), eps);
        },
        py::arg("r"), py::arg("transform"), py::arg("eps"));
  m.def("lb_sandwich",
        [](const std::string& dist) {
          const auto r = lb_sandwich(dist_from_spec(dist));
          return py::make_tuple(r.lower, r.upper);
        },
        py::arg("dist_json"));
  m.def("curvature_ratio",
        [](const std::string& transform, double t) {
          return curvature_ratio(transform_from_name(transform), t);
        },
        py::arg("transform"), py::arg("t"));
  m.def("curvature_classify",
        [](const std::string& transform) {
          const auto r = curvature_classify(transform_from_name(transform));
          return py::make_tuple(r.limit, to_string(r.verdict));
        },
        py::arg("transform"), "(limit, verdict)");

  m.def("oracle_report",
        [](const std::string& dist) {
          const RuntimeDistribution d = dist_from_spec(dist);
          const OracleReport rep = oracle_report(d);
          json j;
          j["distribution"] = distribution_to_json(d);
          j["ellstar"] = json_number(rep.ellstar);
          j["alphastar"] = json_number(rep.alphastar);
          j["lstar"] = json_number(rep.lstar);
          j["qstar"] = json_number(rep.qstar);
          json quantiles = json::array();
          for (const auto& [q, v] : rep.quantiles)
            quantiles.push_back({{"q", q}, {"value", json_number(v)}});
          j["quantiles"] = quantiles;
          json mu;
          for (const auto& [name, v] : rep.mu_values) mu[name] = json_number(v);
          j["mu"] = mu;
          json bounds;
          for (const auto& [name, v] : rep.bound_values) bounds[name] = json_number(v);
          j["bounds"] = bounds;
          return j.dump();
        },
        py::arg("dist_json"), "full oracle report as a JSON string");

  py::register_exception<ConfigError>(m, "ConfigError");
}
