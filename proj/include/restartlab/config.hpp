#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "restartlab/distribution.hpp"
#include "restartlab/strategy.hpp"

namespace restartlab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Tagged distribution specs, e.g. {"family":"two_point","atoms":[[1,0.5],
// [100,0.5]]}, {"family":"deterministic","c":5}, {"family":"worst_case_pr",
// "r":100,"eps":0.1}, {"family":"mixture","components":[...],"weights":
// [...],"mass_at_infinity":0.25}.
RuntimeDistribution parse_distribution(const nlohmann::json& spec);
nlohmann::json distribution_to_json(const RuntimeDistribution& d);

// Strategy specs: {"strategy":"luby"}, {"strategy":"quantile","q":0.5},
// {"strategy":"constant","alpha":8}, {"strategy":"explicit","cutoffs":[...]},
// {"strategy":"sprs","i_max":64}, {"strategy":"ssprs","i_max":64},
// {"strategy":"combine","parts":[...],"weights":[...]}.
Strategy parse_strategy(const nlohmann::json& spec);
nlohmann::json strategy_to_json(const Strategy& s);

struct BoundRequest {
  std::string name;       // quantile_4 | sprs_23 | ssprs_psi | moments | powers | lb_lower | lb_upper
  double q = 0.5;         // quantile_4, moments
  double a = 1.0;         // moments
  double beta = 0.5;      // powers
  double eps = 0.1;       // powers
};

struct ExperimentConfig {
  RuntimeDistribution distribution;
  Strategy strategy;
  std::size_t n_trials = 10'000;
  std::uint64_t seed = 1;
  TimeValue horizon = 1e9;
  bool exact = false;  // use the series evaluator instead of Monte Carlo
  unsigned threads = 1;
  std::vector<BoundRequest> bounds_to_check;
  std::string output_path;  // empty = stdout
  std::string output_format = "csv";
};

// Parses one experiment object; throws ConfigError with field diagnostics.
ExperimentConfig parse_experiment(const nlohmann::json& spec);
nlohmann::json experiment_to_json(const ExperimentConfig& c);

const std::vector<std::string>& known_bound_names();

// Serialization helper: +inf becomes the string "inf" (JSON has no
// infinity); parse side accepts both.
nlohmann::json json_number(double x);
double number_from_json(const nlohmann::json& j);

}  // namespace restartlab
