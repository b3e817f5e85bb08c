#pragma once

#include <cstddef>
#include <string>

namespace restartlab {

// 0 * log^2 0 = 1 * log^2 1 = 0, so x_log2_sq(0) = x_log2_sq(1) = 0.
// Logs are base 2 throughout.
double x_log2_sq(double x);

// Summable weight profiles phi with sum_i 1/phi(i) <= series_upper_bound().
// Arm i of a combiner gets weight 1 / (C * phi(i)); the weights form a
// sub-probability and the combiner only uses them relatively.
class WeightFunction {
 public:
  enum class Kind { PolyLog, Power1PlusEps };

  // phi(i) = 1 + i log^2 i with phi(0) = phi(1) = 1; C = 2.8.
  static WeightFunction polylog() { return {Kind::PolyLog, 0.0}; }
  // phi(i) = (1 + i)^{1+eps}; C = 1 + 1/eps.
  static WeightFunction power_one_plus_eps(double eps);

  double phi(double i) const;
  double series_upper_bound() const;
  double weight(std::size_t i) const { return 1.0 / (series_upper_bound() * phi(static_cast<double>(i))); }

  Kind kind() const { return kind_; }
  double eps() const { return eps_; }
  std::string name() const;

 private:
  WeightFunction(Kind k, double e) : kind_(k), eps_(e) {}
  Kind kind_;
  double eps_;
};

}  // namespace restartlab
