#pragma once

#include <string>

namespace restartlab {

// Increasing transforms phi on [1, +inf) used to form generalized means
// mu_phi(T) = phi^{-1}(E[phi(T)]). All six families have closed-form
// forward, inverse and first two derivatives.
class ConcaveTransform {
 public:
  enum class Kind {
    Identity,     // x
    Log,          // ln x
    LogLog,       // ln(1 + ln x)
    Power,        // x^a, a > 0
    OneMinusPow,  // 1 - x^{-beta}, beta > 0
    ExpNeg,       // 1 - e^{-s x}, s > 0
  };

  static ConcaveTransform identity() { return {Kind::Identity, 0.0}; }
  static ConcaveTransform log() { return {Kind::Log, 0.0}; }
  static ConcaveTransform loglog() { return {Kind::LogLog, 0.0}; }
  static ConcaveTransform power(double a);
  static ConcaveTransform one_minus_pow(double beta);
  static ConcaveTransform exp_neg(double s);

  double forward(double t) const;  // t in [1, +inf]
  double inverse(double y) const;  // minimal t with forward(t) = y; sup() -> +inf
  double deriv(double t) const;
  double deriv2(double t) const;

  // Limit of forward at +inf (the supremum of the image).
  double sup() const;
  bool bounded() const;

  // t * phi''(t) / phi'(t); its limit at infinity decides whether a reverse
  // Jensen inequality is achievable (> -2) or impossible (< -2).
  double curvature(double t) const { return t * deriv2(t) / deriv(t); }
  double curvature_limit() const;

  Kind kind() const { return kind_; }
  double param() const { return a_; }
  std::string name() const;

 private:
  ConcaveTransform(Kind k, double a) : kind_(k), a_(a) {}
  Kind kind_;
  double a_;
};

// Parses names like "identity", "log", "loglog", "power(0.5)",
// "one_minus_pow(1)", "exp_neg(1)". Throws std::invalid_argument.
ConcaveTransform parse_transform(const std::string& name);

}  // namespace restartlab
