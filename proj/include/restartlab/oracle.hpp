#pragma once

#include <string>
#include <utility>
#include <vector>

#include "restartlab/distribution.hpp"
#include "restartlab/transform.hpp"
#include "restartlab/weights.hpp"

namespace restartlab {

struct OptimalConstant {
  TimeValue alphastar;  // argmin of E[min{T,a}] / P(T <= a)
  double ellstar;       // the optimal expected running time
};

// Minimizes g(a) = E[min{T,a}] / P(T <= a): every atom is probed, and
// families with a continuous part additionally get a golden-section search
// on ln a validated against a coarse grid bracket. Returns (+inf, +inf)
// when no finite mass exists.
OptimalConstant optimal_constant(const RuntimeDistribution& d);

struct QuantileOptimum {
  double qstar;
  double lstar;  // inf_q Q(q)/q
};

// Minimizes Q(q)/q over the CDF image (discrete part) plus a numeric search
// when a continuous part is present.
QuantileOptimum lstar(const RuntimeDistribution& d);

// Generalized mean phi^{-1}(E[phi(T)]); +inf propagates.
double mu_phi(const RuntimeDistribution& d, const ConcaveTransform& phi);

// psi(a,b) = 1 + min{a + b, a log^2 a, b log^2 b}  (logs base 2, the
// abstract's normative form; 0 log^2 0 = 1 log^2 1 = 0).
double psi(double a, double b);
// Variant with phi from a weight profile: 1 + min{a + b, phi(a), phi(b)}.
double psi(double a, double b, const WeightFunction& wf);

// 4 Q(q)/q; vacuously +inf when q exceeds the finite mass.
double bound_quantile(const RuntimeDistribution& d, double q);

// 23 inf_q (Q(q)/q)(1 + log(1/q) log^2 log(1/q)) over the dyadic grid
// {2^{-i-1}}_{i<=i_max} together with 1 and the CDF image.
double bound_sprs(const RuntimeDistribution& d, std::size_t i_max = 64);

// inf_q (Q(q)/q) psi(floor(log Q(q)), floor(log 1/q)) over the same grid,
// reported without any universal constant.
double bound_ssprs(const RuntimeDistribution& d, std::size_t i_max = 64);
double bound_ssprs(const RuntimeDistribution& d, const WeightFunction& wf, std::size_t i_max = 64);

// Closed form of c_{phi,varphi}(r) for phi_beta(x) = 1 - x^{-beta} and
// varphi(x) = x^{1+eps}; requires beta(1+eps) < 1. Its infimum over r >= 1
// is (1 - beta(1+eps))^{1/beta}.
double c_power(double r, double beta, double eps);

// c_{phi,varphi}(r) = (1/r) phi^{-1}(phi(r) - int_1^r (t/r)^{1/(1+eps)}
// phi'(t) dt) by adaptive quadrature; equals mu_phi(p_r)/r.
double c_general(double r, const ConcaveTransform& phi, double eps);

struct LbSandwich {
  double lower;  // mu_{phi_1}(T) = 1/E[1/T]
  double upper;  // e^2 mu (1 + ln mu)
};
LbSandwich lb_sandwich(const RuntimeDistribution& d);

enum class JensenVerdict { Achievable, Impossible, Boundary };

struct CurvatureReport {
  double limit;  // lim of t phi''/phi' at infinity
  JensenVerdict verdict;
};

double curvature_ratio(const ConcaveTransform& phi, double t);
CurvatureReport curvature_classify(const ConcaveTransform& phi);
std::string to_string(JensenVerdict v);

struct OracleReport {
  double ellstar = 0.0;
  TimeValue alphastar = 0.0;
  double lstar = 0.0;
  double qstar = 0.0;
  std::vector<std::pair<double, TimeValue>> quantiles;
  std::vector<std::pair<std::string, double>> mu_values;
  std::vector<std::pair<std::string, double>> bound_values;
};

OracleReport oracle_report(const RuntimeDistribution& d);

}  // namespace restartlab
