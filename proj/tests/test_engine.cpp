#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "restartlab/engine.hpp"
#include "zoo_helpers.hpp"

using namespace restartlab;
using restartlab::testing::close_rel;
using restartlab::testing::zoo;

namespace {

RuntimeDistribution half_at_one_half_inf() {
  return RuntimeDistribution::discrete({{1.0, 0.5}}, 0.5);
}

void check_trace_invariants(const RunTrace& t) {
  REQUIRE(!t.runs.empty());
  double actual = 0.0, charged = 0.0;
  for (std::size_t k = 0; k < t.runs.size(); ++k) {
    const auto& r = t.runs[k];
    CHECK(r.consumed <= r.cutoff);
    CHECK(r.success == (k + 1 == t.runs.size() && !t.truncated));
    if (!(t.truncated && k + 1 == t.runs.size())) {
      actual += r.consumed;
      charged += r.cutoff;
    }
  }
  if (!t.truncated) {
    CHECK(t.total_actual == doctest::Approx(actual));
    CHECK(t.total_charged == doctest::Approx(charged));
    CHECK(t.kstar.has_value());
    CHECK(*t.kstar == t.runs.size() - 1);
    // charged - actual is the final run's unused budget
    const auto& last = t.runs.back();
    CHECK(t.total_charged - t.total_actual ==
          doctest::Approx(last.cutoff - last.consumed).epsilon(1e-12));
  }
  CHECK(t.total_charged >= t.total_actual - 1e-12);
}

}  // namespace

TEST_CASE("run_restart: immediate success at the cutoff") {
  RandomStream rng(1);
  const auto t = run_restart(Strategy::constant(5.0), RuntimeDistribution::deterministic(5.0), rng);
  CHECK(t.kstar == 0);
  CHECK(t.total_actual == 5.0);
  CHECK(t.total_charged == 5.0);
  CHECK(!t.truncated);
  check_trace_invariants(t);
}

TEST_CASE("run_restart: cutoff below the atom truncates at the horizon") {
  RandomStream rng(1);
  const auto t =
      run_restart(Strategy::constant(4.0), RuntimeDistribution::deterministic(5.0), rng, 100.0);
  CHECK(t.truncated);
  CHECK(!t.kstar.has_value());
  CHECK(t.total_actual == 100.0);
  CHECK(t.total_charged == 100.0);
  // 25 full runs of consumed 4 fit below the horizon
  std::size_t full = 0;
  for (const auto& r : t.runs)
    if (r.consumed == 4.0 && !r.success) ++full;
  CHECK(full >= 25);
}

TEST_CASE("run_restart: geometric number of runs when half the mass is at infinity") {
  const auto stats = monte_carlo(Strategy::constant(1.0), half_at_one_half_inf(), 100'000, 31);
  CHECK(std::fabs(stats.mean_actual - 2.0) <= 3.0 * stats.stderr_actual);
}

TEST_CASE("run_restart traces satisfy the accounting invariants") {
  const Strategy strategies[] = {Strategy::luby(), Strategy::quantile(0.5), Strategy::sprs(16),
                                 Strategy::ssprs(16)};
  for (const auto& m : zoo()) {
    for (const auto& s : strategies) {
      RandomStream rng(m.finite_mean ? 11 : 13);
      const auto t = run_restart(s, m.dist, rng, 1e7);
      check_trace_invariants(t);
      CHECK(t.from_combiner == s.randomized());
    }
  }
}

TEST_CASE("exact series reproduces the constant-cutoff closed form") {
  const auto tp = RuntimeDistribution::two_point({1.0, 0.5}, {100.0, 0.5});
  const auto r = exact_expected_time(CutoffSequence::constant(1.0), tp);
  CHECK(r.converged);
  CHECK(close_rel(r.lbar, 2.0, 1e-9));
  CHECK(close_rel(r.lbar_plus, 2.0, 1e-9));
  // Eq. (1) ratio across the zoo and a spread of cutoffs
  for (const auto& m : zoo()) {
    for (double alpha : {1.0, 2.0, 8.0, 1024.0}) {
      const double f = m.dist.cdf(alpha);
      if (f <= 0.0) continue;
      const auto e = exact_expected_time(CutoffSequence::constant(alpha), m.dist);
      REQUIRE(e.converged);
      CHECK(close_rel(e.lbar, m.dist.expected_min(alpha) / f, 1e-9));
      CHECK(close_rel(e.lbar_plus, alpha / f, 1e-9));
    }
  }
}

TEST_CASE("exact series on a deterministic path") {
  // Deterministic(5) under S^1 = 1,2,4,8,...: first success at k = 3
  const auto r =
      exact_expected_time(CutoffSequence::geometric_quantile(1.0), RuntimeDistribution::deterministic(5.0));
  CHECK(r.converged);
  CHECK(r.lbar == doctest::Approx(1.0 + 2.0 + 4.0 + 5.0));
  CHECK(r.lbar_plus == doctest::Approx(1.0 + 2.0 + 4.0 + 8.0));
}

TEST_CASE("exact series: quantile sequence meets the 4 Q(q)/q bound") {
  const auto tp = RuntimeDistribution::two_point({1.0, 0.5}, {100.0, 0.5});
  const auto r = exact_expected_time(CutoffSequence::geometric_quantile(0.5), tp);
  CHECK(r.converged);
  CHECK(r.lbar_plus <= 4.0 * tp.quantile(0.5) / 0.5);  // = 8
}

TEST_CASE("exact series detects divergence") {
  const auto r =
      exact_expected_time(CutoffSequence::constant(4.0), RuntimeDistribution::deterministic(5.0));
  CHECK(!r.converged);
  CHECK(std::isinf(r.lbar));
  CHECK(std::isinf(r.lbar_plus));
  CHECK(!r.note.empty());
}

TEST_CASE("exact series under the luby sequence") {
  // Deterministic(5): the series ends exactly at the first cutoff >= 5,
  // which is the 8 at position 14; enumerate by hand.
  const auto r = exact_expected_time(CutoffSequence::luby(), RuntimeDistribution::deterministic(5.0));
  CHECK(r.converged);
  double charged = 0.0, actual = 0.0;
  for (std::size_t k = 0; k < 14; ++k) {
    charged += luby_value(k);
    actual += std::min(5.0, luby_value(k));
  }
  CHECK(r.lbar == doctest::Approx(actual + 5.0));
  CHECK(r.lbar_plus == doctest::Approx(charged + 8.0));

  // mass at 1 present: the F(1) > 0 tail bound drives convergence
  const auto tp = RuntimeDistribution::two_point({1.0, 0.5}, {100.0, 0.5});
  const auto r2 = exact_expected_time(CutoffSequence::luby(), tp);
  CHECK(r2.converged);
  const auto mc = monte_carlo(Strategy::luby(), tp, 50'000, 7);
  CHECK(std::fabs(mc.mean_actual - r2.lbar) <= 4.0 * mc.stderr_actual);

  // no mass below 2: convergence comes from the block-level bound
  const auto pareto = RuntimeDistribution::pareto_tail(2.0, 1.0);
  const auto r3 = exact_expected_time(CutoffSequence::luby(), pareto);
  CHECK(r3.converged);
  const auto mc3 = monte_carlo(Strategy::luby(), pareto, 50'000, 8);
  CHECK(std::fabs(mc3.mean_actual - r3.lbar) <= 4.0 * mc3.stderr_actual);
}

TEST_CASE("monte carlo agrees with the exact evaluator on deterministic sequences") {
  const CutoffSequence seqs[] = {CutoffSequence::constant(8.0),
                                 CutoffSequence::geometric_quantile(0.5), CutoffSequence::luby()};
  const Strategy strategies[] = {Strategy::constant(8.0), Strategy::quantile(0.5), Strategy::luby()};
  for (const auto& m : zoo()) {
    for (std::size_t si = 0; si < 3; ++si) {
      const auto e = exact_expected_time(seqs[si], m.dist);
      if (!e.converged || std::isinf(e.lbar)) continue;
      const auto mc = monte_carlo(strategies[si], m.dist, 20'000, 17, 1e9);
      CHECK(std::fabs(mc.mean_actual - e.lbar) <= 4.0 * mc.stderr_actual + 1e-12);
      CHECK(std::fabs(mc.mean_charged - e.lbar_plus) <= 4.0 * mc.stderr_charged + 1e-12);
    }
  }
}

TEST_CASE("monte carlo basics") {
  const auto det = RuntimeDistribution::deterministic(5.0);
  const auto s = monte_carlo(Strategy::constant(5.0), det, 100, 1);
  CHECK(s.mean_actual == 5.0);
  CHECK(s.stderr_actual == 0.0);
  CHECK(s.truncation_rate == 0.0);
  CHECK(s.n_trials == 100);
  CHECK(s.seed == 1);
}

TEST_CASE("monte carlo is bit-identical across reruns and thread counts") {
  const auto tp = RuntimeDistribution::two_point({1.0, 0.5}, {100.0, 0.5});
  for (const Strategy& s : {Strategy::sprs(16), Strategy::quantile(0.25)}) {
    const auto a = monte_carlo(s, tp, 10'000, 99, 1e9, 1);
    const auto b = monte_carlo(s, tp, 10'000, 99, 1e9, 1);
    const auto c = monte_carlo(s, tp, 10'000, 99, 1e9, 8);
    CHECK(a.mean_actual == b.mean_actual);
    CHECK(a.stderr_actual == b.stderr_actual);
    CHECK(a.mean_charged == b.mean_charged);
    CHECK(a.stderr_charged == b.stderr_charged);
    CHECK(a.mean_actual == c.mean_actual);
    CHECK(a.stderr_actual == c.stderr_actual);
    CHECK(a.mean_charged == c.mean_charged);
    CHECK(a.stderr_charged == c.stderr_charged);
    CHECK(a.truncation_rate == c.truncation_rate);
  }
}

TEST_CASE("stochastic dominance: pointwise larger CDFs give smaller lbar") {
  // F_1 >= F_2 pointwise means T_1 is stochastically smaller
  const std::pair<RuntimeDistribution, RuntimeDistribution> pairs[] = {
      {RuntimeDistribution::two_point({1.0, 0.6}, {100.0, 0.4}),
       RuntimeDistribution::two_point({1.0, 0.5}, {100.0, 0.5})},
      {RuntimeDistribution::worst_case_pr(10.0, 0.0), RuntimeDistribution::worst_case_pr(100.0, 0.0)},
      {RuntimeDistribution::geometric_trials(0.5), RuntimeDistribution::geometric_trials(0.3)},
  };
  const CutoffSequence seqs[] = {CutoffSequence::constant(1.0), CutoffSequence::constant(8.0),
                                 CutoffSequence::geometric_quantile(0.5), CutoffSequence::luby()};
  for (const auto& [small, large] : pairs) {
    for (const auto& s : seqs) {
      const auto a = exact_expected_time(s, small);
      const auto b = exact_expected_time(s, large);
      if (!a.converged || !b.converged) continue;
      CHECK(a.lbar <= b.lbar * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("time_share: single-sequence combiner charges everything to index 0") {
  const auto strategy = Strategy::combine({Strategy::constant(2.0)}, {1.0});
  RandomStream rng(3);
  const auto t = run_restart(strategy, half_at_one_half_inf(), rng, 1e6);
  const auto shares = time_share(std::span(&t, 1));
  REQUIRE(shares.size() == 1);
  CHECK(shares[0] == 1.0);
}

TEST_CASE("time_share rejects non-combiner traces") {
  RandomStream rng(3);
  const auto t = run_restart(Strategy::constant(1.0), half_at_one_half_inf(), rng);
  CHECK_THROWS_AS(time_share(std::span(&t, 1)), std::domain_error);
}

TEST_CASE("time_share: two equal-weight constants split the charged time") {
  // p_inf = 1: runs never succeed, so a max_runs cap provides the steps
  const auto never = RuntimeDistribution::discrete({{1.0, 1e-300}}, 1.0 - 1e-300);
  const auto strategy =
      Strategy::combine({Strategy::constant(2.0), Strategy::constant(3.0)}, {0.5, 0.5});
  RandomStream rng(5);
  const auto t = run_restart(strategy, never, rng, kMaxFiniteTime, 100'000);
  CHECK(t.truncated);
  const auto shares = time_share(std::span(&t, 1));
  REQUIRE(shares.size() == 2);
  CHECK(std::fabs(shares[0] - 0.5) < 0.02);
  CHECK(std::fabs(shares[1] - 0.5) < 0.02);
}

TEST_CASE("horizon validation") {
  RandomStream rng(1);
  CHECK_THROWS_AS(run_restart(Strategy::luby(), half_at_one_half_inf(), rng, 0.5), std::domain_error);
  CHECK_THROWS_AS(monte_carlo(Strategy::luby(), half_at_one_half_inf(), 0, 1), std::domain_error);
}
