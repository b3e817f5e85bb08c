#include "restartlab/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "restartlab/common.hpp"

namespace restartlab {

namespace {

struct TrialTotals {
  double actual = 0.0;
  double charged = 0.0;
  bool truncated = false;
};

template <class OnRun>
TrialTotals run_core(SchedulePlayer& player, const RuntimeDistribution& d, RandomStream& rng,
                     TimeValue horizon, std::size_t max_runs, OnRun&& on_run) {
  TrialTotals t;
  for (std::size_t k = 0; k < max_runs; ++k) {
    const auto [sub, cutoff] = player.next(rng);
    const TimeValue sampled = d.sample(rng);
    const bool success = sampled <= cutoff;
    const TimeValue consumed = std::min(sampled, cutoff);
    if (t.actual + consumed > horizon) {
      on_run(sub, cutoff, consumed, false);
      t.truncated = true;
      t.actual = horizon;
      t.charged = horizon;
      return t;
    }
    t.actual += consumed;
    t.charged += cutoff;
    on_run(sub, cutoff, consumed, success);
    if (success) return t;
  }
  t.truncated = true;  // max_runs reached; totals left as accumulated
  return t;
}

}  // namespace

RunTrace run_restart(const Strategy& strategy, const RuntimeDistribution& d, RandomStream& rng,
                     TimeValue horizon, std::size_t max_runs) {
  if (!(horizon >= 1.0)) throw std::domain_error("run_restart requires horizon >= 1");
  SchedulePlayer player(strategy);
  RunTrace trace;
  trace.from_combiner = player.randomized();
  const TrialTotals t = run_core(player, d, rng, horizon, max_runs,
                                 [&](std::size_t sub, TimeValue cutoff, TimeValue consumed, bool success) {
                                   trace.runs.push_back({sub, cutoff, consumed, success});
                                 });
  trace.total_actual = t.actual;
  trace.total_charged = t.charged;
  trace.truncated = t.truncated;
  if (!t.truncated) trace.kstar = trace.runs.size() - 1;
  return trace;
}

MCStats monte_carlo(const Strategy& strategy, const RuntimeDistribution& d, std::size_t n,
                    std::uint64_t seed, TimeValue horizon, unsigned threads) {
  if (n < 1) throw std::domain_error("monte_carlo requires n >= 1");
  std::vector<double> actual(n), charged(n);
  std::vector<unsigned char> truncated(n, 0);

  auto worker = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      RandomStream rng = RandomStream::for_trial(seed, i);
      SchedulePlayer player(strategy);
      const TrialTotals t = run_core(player, d, rng, horizon, SIZE_MAX,
                                     [](std::size_t, TimeValue, TimeValue, bool) {});
      actual[i] = t.actual;
      charged[i] = t.charged;
      truncated[i] = t.truncated ? 1 : 0;
    }
  };

  const unsigned nthreads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (nthreads == 1) {
    worker(0, n);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (unsigned t = 0; t < nthreads; ++t) {
      const std::size_t begin = n * t / nthreads;
      const std::size_t end = n * (t + 1) / nthreads;
      pool.emplace_back(worker, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  MCStats stats;
  stats.n_trials = n;
  stats.seed = seed;
  const double nn = static_cast<double>(n);
  stats.mean_actual = pairwise_sum(actual) / nn;
  stats.mean_charged = pairwise_sum(charged) / nn;
  if (n > 1) {
    std::vector<double> dev(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double da = actual[i] - stats.mean_actual;
      dev[i] = da * da;
    }
    stats.stderr_actual = std::sqrt(pairwise_sum(dev) / (nn - 1.0)) / std::sqrt(nn);
    for (std::size_t i = 0; i < n; ++i) {
      const double dc = charged[i] - stats.mean_charged;
      dev[i] = dc * dc;
    }
    stats.stderr_charged = std::sqrt(pairwise_sum(dev) / (nn - 1.0)) / std::sqrt(nn);
  }
  std::size_t ntrunc = 0;
  for (unsigned char f : truncated) ntrunc += f;
  stats.truncation_rate = static_cast<double>(ntrunc) / nn;
  return stats;
}

namespace {

// Sound bound on the remaining Luby-sequence series past the boundary of
// super-block i (position 2^i - 2). The continuation regroups as
// G_1 = block_i ++ [2^i], G_2 = block_{i+1} ++ [2^{i+1}], ... where block_j
// has cutoff sum sigma_j (sigma_1 = 1, sigma_{j+1} = 2 sigma_j + 2^j).
// Group G_m ends with the cutoff 2^{i+m-1}, so the survival product shrinks
// by at least (1 - F(2^{i+m-1})) across it, and consecutive group sums grow
// by a factor of at most 2.7.
double luby_block_tail(const RuntimeDistribution& d, double pi, int block, double tol) {
  double sigma = 1.0;  // sigma_block after the warmup loop
  double p2 = 2.0;     // 2^block after the warmup loop
  for (int j = 1; j < block; ++j) {
    sigma = 2.0 * sigma + p2;  // sigma_{j+1} = 2 sigma_j + 2^j, with p2 = 2^j
    p2 *= 2.0;
  }
  double bound = 0.0;
  double surv = pi;
  for (int m = 0; m < 900; ++m) {
    const double group_sum = sigma + p2;
    if (!std::isfinite(group_sum)) return kInf;
    bound += surv * group_sum;
    const double f_end = d.cdf(p2);
    surv *= 1.0 - f_end;
    const double rho = (1.0 - f_end) * 2.7;  // future groups decay at least this fast
    if (rho < 1.0) {
      const double remaining = surv * 2.7 * group_sum / (1.0 - rho);
      if (remaining < 0.25 * tol) return bound + remaining;
    }
    sigma = 2.0 * sigma + p2;
    p2 *= 2.0;
  }
  return kInf;
}

}  // namespace

ExactExpectedTime exact_expected_time(const CutoffSequence& s, const RuntimeDistribution& d,
                                      double tol) {
  if (!(tol > 0.0)) throw std::domain_error("exact_expected_time requires tol > 0");
  ExactExpectedTime out;
  constexpr std::size_t kMaxTerms = 10'000'000;
  constexpr std::size_t kDivergenceProbe = 1'000'000;
  const double growth = s.growth_ratio();
  double pi = 1.0;
  int luby_block = 0;  // completed super-blocks (boundary at k = 2^i - 2)

  for (std::size_t k = 0; k < kMaxTerms; ++k) {
    const TimeValue cutoff = s.at(k);
    const double f = d.cdf(cutoff);
    const double emin = d.expected_min(std::min(cutoff, kMaxFiniteTime));
    out.lbar += pi * emin;
    out.lbar_plus += pi * cutoff;
    out.terms = k + 1;
    if (!std::isfinite(out.lbar) || !std::isfinite(out.lbar_plus)) {
      out.lbar = kInf;
      out.lbar_plus = kInf;
      out.note = "series diverges: partial sums overflow";
      return out;
    }
    pi *= 1.0 - f;
    if (pi <= 1e-300) {
      out.converged = true;
      return out;
    }
    if (s.eventually_nondecreasing()) {
      // future cdf >= f, future cutoffs <= cutoff * growth^m
      if (f > 0.0) {
        const double rho = (1.0 - f) * growth;
        if (rho < 1.0) {
          const double tail = pi * cutoff * growth / (1.0 - rho);
          if (tail < tol) {
            out.converged = true;
            return out;
          }
        }
      }
    } else {
      // Luby: all future cutoffs are >= 1, and position m from here has
      // value <= (k + m + 2).
      const double f1 = d.cdf(1.0);
      if (f1 > 0.0) {
        const double kk = static_cast<double>(k);
        const double tail = pi * ((kk + 3.0) / f1 + (1.0 - f1) / (f1 * f1));
        if (tail < tol) {
          out.converged = true;
          return out;
        }
      } else if (k + 2 >= (std::size_t{1} << (luby_block + 1))) {
        ++luby_block;  // k = 2^{block+1} - 2 just processed
        const double tail = luby_block_tail(d, pi, luby_block, tol);
        if (tail < tol) {
          out.converged = true;
          return out;
        }
      }
    }
    if (k + 1 == kDivergenceProbe && pi >= 1.0 - 1e-15 &&
        (s.kind() == CutoffSequence::Kind::Constant || s.kind() == CutoffSequence::Kind::Explicit)) {
      out.lbar = kInf;
      out.lbar_plus = kInf;
      out.note = "series diverges: no mass at or below the cutoffs";
      return out;
    }
  }
  out.lbar = kInf;
  out.lbar_plus = kInf;
  out.note = "series did not converge within the term budget";
  return out;
}

std::vector<double> time_share(std::span<const RunTrace> traces) {
  std::vector<double> charged;
  double total = 0.0;
  for (const auto& tr : traces) {
    if (!tr.from_combiner) throw std::domain_error("time_share requires combiner traces");
    for (const auto& run : tr.runs) {
      if (run.sub_index >= charged.size()) charged.resize(run.sub_index + 1, 0.0);
      charged[run.sub_index] += run.cutoff;
      total += run.cutoff;
    }
  }
  if (total > 0.0)
    for (auto& c : charged) c /= total;
  return charged;
}

}  // namespace restartlab
