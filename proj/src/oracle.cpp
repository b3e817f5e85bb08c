#include "restartlab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <stdexcept>

#include "restartlab/quadrature.hpp"

namespace restartlab {

namespace {

// Golden-section minimization on [a, b]; relative tolerance on the abscissa.
std::pair<double, double> golden_min(const std::function<double(double)>& f, double a, double b,
                                     double rel_tol = 1e-9, int max_iter = 200) {
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int i = 0; i < max_iter && (b - a) > rel_tol * (std::fabs(a) + std::fabs(b) + 1.0); ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

// Coarse log-grid bracket followed by golden-section refinement.
std::pair<double, double> grid_then_golden(const std::function<double(double)>& f, double lo,
                                           double hi, int grid = 1024) {
  const double la = std::log(lo);
  const double lb = std::log(hi);
  auto g = [&](double x) { return f(std::exp(x)); };
  int best = 0;
  double best_v = kInf;
  for (int i = 0; i <= grid; ++i) {
    const double x = la + (lb - la) * i / grid;
    const double v = g(x);
    if (v < best_v) {
      best_v = v;
      best = i;
    }
  }
  const double xa = la + (lb - la) * std::max(0, best - 1) / grid;
  const double xb = la + (lb - la) * std::min(grid, best + 1) / grid;
  auto [x, v] = golden_min(g, xa, xb);
  if (best_v < v) return {std::exp(la + (lb - la) * best / grid), best_v};
  return {std::exp(x), v};
}

}  // namespace

OptimalConstant optimal_constant(const RuntimeDistribution& d) {
  if (d.finite_mass() <= 0.0) return {kInf, kInf};
  auto g = [&](double alpha) {
    const double f = d.cdf(alpha);
    return f > 0.0 ? d.expected_min(alpha) / f : kInf;
  };
  TimeValue best_alpha = kInf;
  double best = kInf;
  auto consider = [&](double alpha, double v) {
    if (v < best) {
      best = v;
      best_alpha = alpha;
    }
  };
  for (double t : d.candidate_cutoffs()) consider(t, g(t));
  if (d.has_continuous_part()) {
    const double qhi = d.finite_mass() - 1e-9;
    if (qhi > 0.0) {
      const TimeValue hi = d.quantile(std::min(qhi, d.finite_mass()));
      if (std::isfinite(hi) && hi > 1.0) {
        auto [alpha, v] = grid_then_golden(g, 1.0, hi);
        consider(alpha, v);
      }
    }
  }
  return {best_alpha, best};
}

QuantileOptimum lstar(const RuntimeDistribution& d) {
  if (d.finite_mass() <= 0.0) return {0.0, kInf};
  auto h = [&](double q) {
    if (!(q > 0.0 && q <= 1.0)) return kInf;
    const TimeValue Q = d.quantile(q);
    return std::isfinite(Q) ? Q / q : kInf;
  };
  double best_q = 0.0;
  double best = kInf;
  auto consider = [&](double q, double v) {
    if (v < best) {
      best = v;
      best_q = q;
    }
  };
  for (double q : d.cdf_image()) consider(q, h(q));
  if (d.has_continuous_part()) {
    auto [q, v] = grid_then_golden(h, 1e-12, d.finite_mass());
    consider(q, v);
  }
  return {best_q, best};
}

double mu_phi(const RuntimeDistribution& d, const ConcaveTransform& phi) {
  if (phi.kind() == ConcaveTransform::Kind::ExpNeg) {
    // phi^{-1}(E[phi(T)]) = -ln(E[e^{-sT}])/s; the log-space Laplace
    // transform survives where 1 - e^{-sT} rounds to 1.
    const double ll = d.log_laplace(phi.param());
    if (!std::isfinite(ll)) return kInf;
    return std::max(1.0, -ll / phi.param());
  }
  const double e = d.expected_transform(phi);
  if (std::isinf(e)) return kInf;
  return phi.inverse(e);
}

double psi(double a, double b) {
  if (!(a >= 0.0 && b >= 0.0)) throw std::domain_error("psi requires a, b >= 0");
  return 1.0 + std::min({a + b, x_log2_sq(a), x_log2_sq(b)});
}

double psi(double a, double b, const WeightFunction& wf) {
  if (!(a >= 0.0 && b >= 0.0)) throw std::domain_error("psi requires a, b >= 0");
  return 1.0 + std::min({a + b, wf.phi(a), wf.phi(b)});
}

double bound_quantile(const RuntimeDistribution& d, double q) {
  const TimeValue Q = d.quantile(q);
  return std::isfinite(Q) ? 4.0 * Q / q : kInf;
}

namespace {

std::vector<double> bound_q_grid(const RuntimeDistribution& d, std::size_t i_max) {
  std::set<double> qs;
  qs.insert(1.0);
  for (std::size_t i = 0; i <= i_max; ++i) qs.insert(std::exp2(-static_cast<double>(i) - 1.0));
  for (double q : d.cdf_image()) qs.insert(q);
  return {qs.begin(), qs.end()};
}

}  // namespace

double bound_sprs(const RuntimeDistribution& d, std::size_t i_max) {
  double best = kInf;
  for (double q : bound_q_grid(d, i_max)) {
    const TimeValue Q = d.quantile(q);
    if (!std::isfinite(Q)) continue;
    const double factor = 1.0 + x_log2_sq(std::log2(1.0 / q));
    best = std::min(best, Q / q * factor);
  }
  return 23.0 * best;
}

namespace {

double bound_ssprs_impl(const RuntimeDistribution& d, std::size_t i_max,
                        const std::function<double(double, double)>& psi_fn) {
  double best = kInf;
  for (double q : bound_q_grid(d, i_max)) {
    const TimeValue Q = d.quantile(q);
    if (!std::isfinite(Q)) continue;
    const double a = std::floor(std::log2(Q));
    const double b = std::floor(std::log2(1.0 / q));
    best = std::min(best, Q / q * psi_fn(a, b));
  }
  return best;
}

}  // namespace

double bound_ssprs(const RuntimeDistribution& d, std::size_t i_max) {
  return bound_ssprs_impl(d, i_max, [](double a, double b) { return psi(a, b); });
}

double bound_ssprs(const RuntimeDistribution& d, const WeightFunction& wf, std::size_t i_max) {
  return bound_ssprs_impl(d, i_max, [&](double a, double b) { return psi(a, b, wf); });
}

double c_power(double r, double beta, double eps) {
  if (!(beta > 0.0) || !(eps >= 0.0)) throw std::domain_error("c_power requires beta > 0 and eps >= 0");
  const double B = beta * (1.0 + eps);
  if (B >= 1.0) throw std::domain_error("c_power requires beta(1+eps) < 1");
  if (!(r >= 1.0)) throw std::domain_error("c_power requires r >= 1");
  const double bracket = (1.0 - B * std::pow(r, beta - 1.0 / (1.0 + eps))) / (1.0 - B);
  return std::pow(bracket, -1.0 / beta);
}

double c_general(double r, const ConcaveTransform& phi, double eps) {
  if (!(r >= 1.0)) throw std::domain_error("c_general requires r >= 1");
  if (!(eps >= 0.0)) throw std::domain_error("c_general requires eps >= 0");
  const double kappa = 1.0 / (1.0 + eps);
  double integral = 0.0;
  if (r > 1.0) {
    // int_1^r (t/r)^kappa phi'(t) dt with t = e^s
    const double scale = std::max(1.0, std::fabs(phi.forward(r) - phi.forward(1.0)));
    integral = integrate(
        [&](double s) {
          const double t = std::exp(s);
          return std::pow(t / r, kappa) * phi.deriv(t) * t;
        },
        0.0, std::log(r), 1e-11 * scale);
  }
  return phi.inverse(phi.forward(r) - integral) / r;
}

LbSandwich lb_sandwich(const RuntimeDistribution& d) {
  const double mu = mu_phi(d, ConcaveTransform::one_minus_pow(1.0));
  if (std::isinf(mu)) return {kInf, kInf};
  return {mu, std::exp(2.0) * mu * (1.0 + std::log(mu))};
}

double curvature_ratio(const ConcaveTransform& phi, double t) {
  if (!(t >= 1.0)) throw std::domain_error("curvature_ratio requires t >= 1");
  return phi.curvature(t);
}

CurvatureReport curvature_classify(const ConcaveTransform& phi) {
  const double lim = phi.curvature_limit();
  JensenVerdict v = JensenVerdict::Boundary;
  if (lim > -2.0) v = JensenVerdict::Achievable;
  if (lim < -2.0) v = JensenVerdict::Impossible;
  return {lim, v};
}

std::string to_string(JensenVerdict v) {
  switch (v) {
    case JensenVerdict::Achievable: return "ACHIEVABLE";
    case JensenVerdict::Impossible: return "IMPOSSIBLE";
    case JensenVerdict::Boundary: return "BOUNDARY";
  }
  return "?";
}

OracleReport oracle_report(const RuntimeDistribution& d) {
  OracleReport rep;
  const auto oc = optimal_constant(d);
  rep.alphastar = oc.alphastar;
  rep.ellstar = oc.ellstar;
  const auto ls = lstar(d);
  rep.qstar = ls.qstar;
  rep.lstar = ls.lstar;
  for (double q : {1.0, 0.9, 0.75, 0.5, 0.25, 0.125, 0x1p-10})
    rep.quantiles.emplace_back(q, d.quantile(q));
  const ConcaveTransform transforms[] = {
      ConcaveTransform::identity(),           ConcaveTransform::log(),
      ConcaveTransform::loglog(),             ConcaveTransform::power(0.5),
      ConcaveTransform::one_minus_pow(0.5),   ConcaveTransform::one_minus_pow(1.0),
      ConcaveTransform::exp_neg(1.0),
  };
  for (const auto& t : transforms) rep.mu_values.emplace_back(t.name(), mu_phi(d, t));
  rep.bound_values.emplace_back("quantile_4(q=0.5)", bound_quantile(d, 0.5));
  rep.bound_values.emplace_back("sprs_23", bound_sprs(d));
  rep.bound_values.emplace_back("ssprs_psi", bound_ssprs(d));
  const auto lb = lb_sandwich(d);
  rep.bound_values.emplace_back("lb_lower", lb.lower);
  rep.bound_values.emplace_back("lb_upper", lb.upper);
  return rep;
}

}  // namespace restartlab
