#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "restartlab/distribution.hpp"
#include "restartlab/strategy.hpp"

namespace restartlab {

struct RunRecord {
  std::size_t sub_index;  // combiner arm; 0 for deterministic strategies
  TimeValue cutoff;
  TimeValue consumed;  // min(sampled T, cutoff)
  bool success;        // sampled T <= cutoff
};

// One execution of the multi-start algorithm.
struct RunTrace {
  std::vector<RunRecord> runs;
  std::optional<std::size_t> kstar;  // terminating run ordinal, unset if truncated
  double total_actual = 0.0;         // sum_{k<K*} S_k + T_{K*}; clamped to horizon on truncation
  double total_charged = 0.0;        // sum_{k<=K*} S_k; always >= total_actual
  bool truncated = false;
  bool from_combiner = false;
};

// Draws T_k ~ d i.i.d., pulls cutoffs from the strategy and accrues
// min(T_k, S_k) until the first success, until total_actual would exceed
// `horizon` (truncated, totals clamped to the horizon), or until `max_runs`
// runs have been recorded (truncated, totals left as accumulated).
RunTrace run_restart(const Strategy& strategy, const RuntimeDistribution& d, RandomStream& rng,
                     TimeValue horizon = 1e9, std::size_t max_runs = SIZE_MAX);

struct ExactExpectedTime {
  double lbar = 0.0;       // expected total running time L(S)
  double lbar_plus = 0.0;  // expected sum of charged cutoffs L+(S)
  bool converged = false;
  std::size_t terms = 0;
  std::string note;
};

// Series evaluation of the expected running time of a deterministic
// sequence: both series share the survival products pi_k = prod_{l<k}
// P(T > S_l) and are truncated once a sound geometric tail bound drops
// below `tol` (absolute). Returns +inf with a diagnostic note when the
// products do not decay.
ExactExpectedTime exact_expected_time(const CutoffSequence& s, const RuntimeDistribution& d,
                                      double tol = 1e-12);

struct MCStats {
  std::size_t n_trials = 0;
  double mean_actual = 0.0;
  double mean_charged = 0.0;
  double stderr_actual = 0.0;
  double stderr_charged = 0.0;
  double truncation_rate = 0.0;
  std::uint64_t seed = 0;
};

// Seeded Monte Carlo estimate of L(S) and L+(S). Per-trial streams are
// derived from (seed, trial index); means use pairwise summation over the
// trial-indexed buffers, so results are bit-identical for any thread count.
MCStats monte_carlo(const Strategy& strategy, const RuntimeDistribution& d, std::size_t n,
                    std::uint64_t seed, TimeValue horizon = 1e9, unsigned threads = 1);

// Fraction of total charged time attributed to each combiner arm (the
// empirical R_{i,t} / R~_t). Throws std::domain_error on traces that did
// not come from a combiner strategy.
std::vector<double> time_share(std::span<const RunTrace> traces);

}  // namespace restartlab
