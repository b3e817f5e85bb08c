#pragma once

#include <cmath>
#include <algorithm>
#include <string>
#include <vector>

#include "restartlab/distribution.hpp"
#include "restartlab/quadrature.hpp"

namespace restartlab::testing {

struct ZooMember {
  RuntimeDistribution dist;
  bool finite_mean;
};

// The standard test zoo: deterministic times, a two-point spread, geometric
// trials, a heavy tail, mixtures with mass at infinity, and worst-case
// quantile-extremal distributions.
inline std::vector<ZooMember> zoo() {
  std::vector<ZooMember> z;
  for (double c : {1.0, 5.0, 1024.0}) z.push_back({RuntimeDistribution::deterministic(c), true});
  z.push_back({RuntimeDistribution::two_point({1.0, 0.5}, {100.0, 0.5}), true});
  z.push_back({RuntimeDistribution::geometric_trials(0.3), true});
  z.push_back({RuntimeDistribution::pareto_tail(2.0, 1.0), true});
  for (double q0 : {0.1, 0x1p-4, 0x1p-10})
    z.push_back({RuntimeDistribution::mixture({RuntimeDistribution::deterministic(1.0)}, {q0}, 1.0 - q0),
                 false});
  for (double r : {10.0, 100.0, 1000.0})
    for (double eps : {0.0, 0.1})
      z.push_back({RuntimeDistribution::worst_case_pr(r, eps), true});
  return z;
}

inline bool close_rel(double a, double b, double tol) {
  if (std::isinf(a) || std::isinf(b)) return std::isinf(a) && std::isinf(b) && (a > 0) == (b > 0);
  return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

// Integrates f over [a, b] splitting at the given breakpoints, so kinks and
// steps of piecewise CDFs cannot be aliased away by the adaptive rule.
template <class F>
double integrate_piecewise(F&& f, double a, double b, std::vector<double> pts, double tol) {
  pts.push_back(a);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double lo = pts[i];
    const double hi = pts[i + 1];
    if (hi <= a || lo >= b || hi <= lo) continue;
    total += integrate(f, std::max(lo, a), std::min(hi, b), tol);
  }
  return total;
}

}  // namespace restartlab::testing
