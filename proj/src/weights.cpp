#include "restartlab/weights.hpp"

#include <cmath>
#include <stdexcept>

namespace restartlab {

double x_log2_sq(double x) {
  if (x <= 1.0) return 0.0;
  const double l = std::log2(x);
  return x * l * l;
}

WeightFunction WeightFunction::power_one_plus_eps(double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("power_one_plus_eps requires eps > 0");
  return {Kind::Power1PlusEps, eps};
}

double WeightFunction::phi(double i) const {
  switch (kind_) {
    case Kind::PolyLog: return 1.0 + x_log2_sq(i);
    case Kind::Power1PlusEps: return std::pow(1.0 + i, 1.0 + eps_);
  }
  return 1.0;
}

double WeightFunction::series_upper_bound() const {
  switch (kind_) {
    case Kind::PolyLog: return 2.8;
    case Kind::Power1PlusEps: return 1.0 + 1.0 / eps_;
  }
  return 1.0;
}

std::string WeightFunction::name() const {
  switch (kind_) {
    case Kind::PolyLog: return "polylog";
    case Kind::Power1PlusEps: return "power_one_plus_eps(" + std::to_string(eps_) + ")";
  }
  return "?";
}

}  // namespace restartlab
