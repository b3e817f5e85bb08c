#include "restartlab/config.hpp"

#include <algorithm>
#include <cmath>

namespace restartlab {

using nlohmann::json;

namespace {

double get_number(const json& j, const char* key, const char* ctx) {
  if (!j.contains(key))
    throw ConfigError(std::string(ctx) + ": missing field '" + key + "'");
  const auto& v = j.at(key);
  if (v.is_string() && v.get<std::string>() == "inf") return kInf;
  if (!v.is_number())
    throw ConfigError(std::string(ctx) + ": field '" + key + "' must be a number");
  return v.get<double>();
}

double get_number_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? number_from_json(j.at(key)) : fallback;
}

}  // namespace

json json_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double number_from_json(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    throw ConfigError("expected a number, got string '" + s + "'");
  }
  return j.get<double>();
}

RuntimeDistribution parse_distribution(const json& spec) {
  if (!spec.is_object() || !spec.contains("family"))
    throw ConfigError("distribution spec must be an object with a 'family' field");
  const std::string family = spec.at("family").get<std::string>();
  try {
    if (family == "deterministic") return RuntimeDistribution::deterministic(get_number(spec, "c", "deterministic"));
    if (family == "two_point" || family == "discrete") {
      if (!spec.contains("atoms") || !spec.at("atoms").is_array())
        throw ConfigError(family + ": missing 'atoms' array");
      std::vector<fam::Atom> atoms;
      for (const auto& a : spec.at("atoms")) {
        if (!a.is_array() || a.size() != 2)
          throw ConfigError(family + ": each atom must be a [time, probability] pair");
        atoms.push_back({number_from_json(a[0]), number_from_json(a[1])});
      }
      if (family == "two_point") {
        if (atoms.size() != 2) throw ConfigError("two_point: exactly two atoms required");
        return RuntimeDistribution::two_point(atoms[0], atoms[1]);
      }
      return RuntimeDistribution::discrete(std::move(atoms), get_number_or(spec, "mass_at_infinity", 0.0));
    }
    if (family == "geometric_trials")
      return RuntimeDistribution::geometric_trials(get_number(spec, "p", "geometric_trials"));
    if (family == "pareto_tail")
      return RuntimeDistribution::pareto_tail(get_number(spec, "shape", "pareto_tail"),
                                              get_number(spec, "scale", "pareto_tail"));
    if (family == "worst_case_pr")
      return RuntimeDistribution::worst_case_pr(get_number(spec, "r", "worst_case_pr"),
                                                get_number(spec, "eps", "worst_case_pr"));
    if (family == "mixture") {
      if (!spec.contains("components") || !spec.at("components").is_array())
        throw ConfigError("mixture: missing 'components' array");
      std::vector<RuntimeDistribution> comps;
      for (const auto& c : spec.at("components")) comps.push_back(parse_distribution(c));
      std::vector<double> weights;
      if (!spec.contains("weights") || !spec.at("weights").is_array())
        throw ConfigError("mixture: missing 'weights' array");
      for (const auto& w : spec.at("weights")) weights.push_back(number_from_json(w));
      return RuntimeDistribution::mixture(std::move(comps), std::move(weights),
                                          get_number_or(spec, "mass_at_infinity", 0.0));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError("distribution '" + family + "': " + e.what());
  } catch (const std::domain_error& e) {
    throw ConfigError("distribution '" + family + "': " + e.what());
  }
  throw ConfigError("unknown distribution family '" + family + "'");
}

json distribution_to_json(const RuntimeDistribution& d) {
  json j;
  switch (d.kind()) {
    case RuntimeDistribution::Kind::Deterministic:
      j["family"] = "deterministic";
      j["c"] = d.family_as<fam::Discrete>()->atoms[0].t;
      break;
    case RuntimeDistribution::Kind::TwoPoint:
    case RuntimeDistribution::Kind::Discrete: {
      const auto* f = d.family_as<fam::Discrete>();
      j["family"] = d.kind() == RuntimeDistribution::Kind::TwoPoint ? "two_point" : "discrete";
      json atoms = json::array();
      for (const auto& a : f->atoms) atoms.push_back({a.t, a.p});
      j["atoms"] = atoms;
      if (d.mass_at_infinity() > 0.0) j["mass_at_infinity"] = d.mass_at_infinity();
      break;
    }
    case RuntimeDistribution::Kind::GeometricTrials:
      j["family"] = "geometric_trials";
      j["p"] = d.family_as<fam::Geometric>()->success_prob;
      break;
    case RuntimeDistribution::Kind::ParetoTail: {
      const auto* f = d.family_as<fam::Pareto>();
      j["family"] = "pareto_tail";
      j["shape"] = f->shape;
      j["scale"] = f->scale;
      break;
    }
    case RuntimeDistribution::Kind::WorstCasePr: {
      const auto* f = d.family_as<fam::WorstCase>();
      j["family"] = "worst_case_pr";
      j["r"] = f->r;
      j["eps"] = f->eps;
      break;
    }
    case RuntimeDistribution::Kind::Mixture: {
      const auto* f = d.family_as<fam::Mixture>();
      j["family"] = "mixture";
      json comps = json::array();
      for (const auto& c : f->components) comps.push_back(distribution_to_json(c));
      j["components"] = comps;
      j["weights"] = f->weights;
      double w_expl = 1.0;
      for (double w : f->weights) w_expl -= w;
      if (w_expl > 1e-15) j["mass_at_infinity"] = w_expl;
      break;
    }
  }
  return j;
}

Strategy parse_strategy(const json& spec) {
  if (!spec.is_object() || !spec.contains("strategy"))
    throw ConfigError("strategy spec must be an object with a 'strategy' field");
  const std::string name = spec.at("strategy").get<std::string>();
  try {
    if (name == "luby") return Strategy::luby();
    if (name == "quantile") return Strategy::quantile(get_number(spec, "q", "quantile"));
    if (name == "constant") return Strategy::constant(get_number(spec, "alpha", "constant"));
    if (name == "explicit") {
      if (!spec.contains("cutoffs") || !spec.at("cutoffs").is_array())
        throw ConfigError("explicit: missing 'cutoffs' array");
      std::vector<TimeValue> cutoffs;
      for (const auto& c : spec.at("cutoffs")) cutoffs.push_back(number_from_json(c));
      return Strategy::explicit_list(std::move(cutoffs));
    }
    if (name == "sprs")
      return Strategy::sprs(static_cast<std::size_t>(get_number_or(spec, "i_max", 64)));
    if (name == "ssprs")
      return Strategy::ssprs(static_cast<std::size_t>(get_number_or(spec, "i_max", 64)));
    if (name == "combine") {
      if (!spec.contains("parts") || !spec.at("parts").is_array())
        throw ConfigError("combine: missing 'parts' array");
      std::vector<Strategy> parts;
      for (const auto& p : spec.at("parts")) parts.push_back(parse_strategy(p));
      std::vector<double> weights;
      if (!spec.contains("weights") || !spec.at("weights").is_array())
        throw ConfigError("combine: missing 'weights' array");
      for (const auto& w : spec.at("weights")) weights.push_back(number_from_json(w));
      return Strategy::combine(std::move(parts), std::move(weights));
    }
  } catch (const std::domain_error& e) {
    throw ConfigError("strategy '" + name + "': " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError("strategy '" + name + "': " + e.what());
  }
  throw ConfigError("unknown strategy '" + name + "'");
}

json strategy_to_json(const Strategy& s) {
  json j;
  switch (s.kind()) {
    case Strategy::Kind::Luby: j["strategy"] = "luby"; break;
    case Strategy::Kind::Quantile:
      j["strategy"] = "quantile";
      j["q"] = s.q();
      break;
    case Strategy::Kind::Constant:
      j["strategy"] = "constant";
      j["alpha"] = s.alpha();
      break;
    case Strategy::Kind::Explicit:
      j["strategy"] = "explicit";
      j["cutoffs"] = s.cutoffs();
      break;
    case Strategy::Kind::Sprs:
      j["strategy"] = "sprs";
      j["i_max"] = s.i_max();
      break;
    case Strategy::Kind::Ssprs:
      j["strategy"] = "ssprs";
      j["i_max"] = s.i_max();
      break;
    case Strategy::Kind::Combine: {
      j["strategy"] = "combine";
      json parts = json::array();
      for (const auto& p : s.parts()) parts.push_back(strategy_to_json(p));
      j["parts"] = parts;
      j["weights"] = s.weights();
      break;
    }
  }
  return j;
}

const std::vector<std::string>& known_bound_names() {
  static const std::vector<std::string> names = {"quantile_4", "sprs_23",  "ssprs_psi",
                                                 "moments",    "powers",   "lb_lower",
                                                 "lb_upper"};
  return names;
}

namespace {

BoundRequest parse_bound(const json& spec, const Strategy& strategy) {
  BoundRequest b;
  if (spec.is_string())
    b.name = spec.get<std::string>();
  else if (spec.is_object() && spec.contains("name")) {
    b.name = spec.at("name").get<std::string>();
    b.q = get_number_or(spec, "q", b.q);
    b.a = get_number_or(spec, "a", b.a);
    b.beta = get_number_or(spec, "beta", b.beta);
    b.eps = get_number_or(spec, "eps", b.eps);
  } else {
    throw ConfigError("each bound must be a name or an object with a 'name' field");
  }
  const auto& known = known_bound_names();
  if (std::find(known.begin(), known.end(), b.name) == known.end()) {
    std::string msg = "unknown bound '" + b.name + "'; valid names:";
    for (const auto& n : known) msg += " " + n;
    throw ConfigError(msg);
  }
  // quantile-style bounds default to the strategy's own q when available
  if (!spec.is_object() || !spec.contains("q")) {
    if (strategy.kind() == Strategy::Kind::Quantile) b.q = strategy.q();
  }
  return b;
}

}  // namespace

ExperimentConfig parse_experiment(const json& spec) {
  if (!spec.is_object()) throw ConfigError("experiment config must be a JSON object");
  if (!spec.contains("distribution")) throw ConfigError("experiment config: missing 'distribution'");
  if (!spec.contains("strategy")) throw ConfigError("experiment config: missing 'strategy'");
  ExperimentConfig c{parse_distribution(spec.at("distribution")), parse_strategy(spec.at("strategy"))};
  const double n = get_number_or(spec, "n_trials", static_cast<double>(c.n_trials));
  if (!(n >= 1.0)) throw ConfigError("n_trials must be >= 1");
  c.n_trials = static_cast<std::size_t>(n);
  c.seed = static_cast<std::uint64_t>(get_number_or(spec, "seed", 1.0));
  c.horizon = get_number_or(spec, "horizon", 1e9);
  if (!(c.horizon >= 1.0)) throw ConfigError("horizon must be >= 1");
  c.exact = spec.value("exact", false);
  if (c.exact && c.strategy.randomized())
    throw ConfigError("exact evaluation requires a deterministic strategy");
  c.threads = static_cast<unsigned>(get_number_or(spec, "threads", 1.0));
  if (spec.contains("bounds_to_check")) {
    if (!spec.at("bounds_to_check").is_array()) throw ConfigError("bounds_to_check must be an array");
    for (const auto& b : spec.at("bounds_to_check")) c.bounds_to_check.push_back(parse_bound(b, c.strategy));
  }
  if (spec.contains("output")) {
    const auto& out = spec.at("output");
    if (out.is_string()) {
      c.output_path = out.get<std::string>();
    } else if (out.is_object()) {
      c.output_path = out.value("path", "");
      c.output_format = out.value("format", "csv");
    }
    if (c.output_format != "csv" && c.output_format != "json")
      throw ConfigError("output format must be 'csv' or 'json'");
  }
  return c;
}

json experiment_to_json(const ExperimentConfig& c) {
  json j;
  j["distribution"] = distribution_to_json(c.distribution);
  j["strategy"] = strategy_to_json(c.strategy);
  j["n_trials"] = c.n_trials;
  j["seed"] = c.seed;
  j["horizon"] = json_number(c.horizon);
  j["exact"] = c.exact;
  if (c.threads != 1) j["threads"] = c.threads;
  if (!c.bounds_to_check.empty()) {
    json bounds = json::array();
    for (const auto& b : c.bounds_to_check) {
      json jb;
      jb["name"] = b.name;
      if (b.name == "quantile_4" || b.name == "moments") jb["q"] = b.q;
      if (b.name == "moments") jb["a"] = b.a;
      if (b.name == "powers") {
        jb["beta"] = b.beta;
        jb["eps"] = b.eps;
      }
      bounds.push_back(jb);
    }
    j["bounds_to_check"] = bounds;
  }
  return j;
}

}  // namespace restartlab
