#include "restartlab/transform.hpp"

#include <cmath>
#include <stdexcept>

#include "restartlab/common.hpp"

namespace restartlab {

ConcaveTransform ConcaveTransform::power(double a) {
  if (!(a > 0.0)) throw std::invalid_argument("power transform requires a > 0");
  return {Kind::Power, a};
}

ConcaveTransform ConcaveTransform::one_minus_pow(double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("one_minus_pow transform requires beta > 0");
  return {Kind::OneMinusPow, beta};
}

ConcaveTransform ConcaveTransform::exp_neg(double s) {
  if (!(s > 0.0)) throw std::invalid_argument("exp_neg transform requires s > 0");
  return {Kind::ExpNeg, s};
}

double ConcaveTransform::forward(double t) const {
  if (std::isinf(t)) return sup();
  switch (kind_) {
    case Kind::Identity: return t;
    case Kind::Log: return std::log(t);
    case Kind::LogLog: return std::log1p(std::log(t));
    case Kind::Power: return std::pow(t, a_);
    case Kind::OneMinusPow: return 1.0 - std::pow(t, -a_);
    case Kind::ExpNeg: return 1.0 - std::exp(-a_ * t);
  }
  return 0.0;
}

double ConcaveTransform::inverse(double y) const {
  switch (kind_) {
    case Kind::Identity: return y;
    case Kind::Log: return std::exp(y);
    case Kind::LogLog: return std::exp(std::expm1(y));
    case Kind::Power: return std::pow(y, 1.0 / a_);
    case Kind::OneMinusPow:
      if (y >= 1.0) return kInf;
      return std::pow(1.0 - y, -1.0 / a_);
    case Kind::ExpNeg:
      if (y >= 1.0) return kInf;
      return -std::log1p(-y) / a_;
  }
  return 0.0;
}

double ConcaveTransform::deriv(double t) const {
  switch (kind_) {
    case Kind::Identity: return 1.0;
    case Kind::Log: return 1.0 / t;
    case Kind::LogLog: return 1.0 / (t * (1.0 + std::log(t)));
    case Kind::Power: return a_ * std::pow(t, a_ - 1.0);
    case Kind::OneMinusPow: return a_ * std::pow(t, -a_ - 1.0);
    case Kind::ExpNeg: return a_ * std::exp(-a_ * t);
  }
  return 0.0;
}

double ConcaveTransform::deriv2(double t) const {
  switch (kind_) {
    case Kind::Identity: return 0.0;
    case Kind::Log: return -1.0 / (t * t);
    case Kind::LogLog: {
      const double l = 1.0 + std::log(t);
      return -(1.0 + l) / (t * t * l * l);
    }
    case Kind::Power: return a_ * (a_ - 1.0) * std::pow(t, a_ - 2.0);
    case Kind::OneMinusPow: return -a_ * (a_ + 1.0) * std::pow(t, -a_ - 2.0);
    case Kind::ExpNeg: return -a_ * a_ * std::exp(-a_ * t);
  }
  return 0.0;
}

double ConcaveTransform::sup() const {
  switch (kind_) {
    case Kind::Identity:
    case Kind::Log:
    case Kind::LogLog:
    case Kind::Power: return kInf;
    case Kind::OneMinusPow:
    case Kind::ExpNeg: return 1.0;
  }
  return kInf;
}

bool ConcaveTransform::bounded() const { return std::isfinite(sup()); }

double ConcaveTransform::curvature_limit() const {
  switch (kind_) {
    case Kind::Identity: return 0.0;
    case Kind::Log: return -1.0;
    case Kind::LogLog: return -1.0;
    case Kind::Power: return a_ - 1.0;
    case Kind::OneMinusPow: return -(a_ + 1.0);
    case Kind::ExpNeg: return -kInf;
  }
  return 0.0;
}

std::string ConcaveTransform::name() const {
  switch (kind_) {
    case Kind::Identity: return "identity";
    case Kind::Log: return "log";
    case Kind::LogLog: return "loglog";
    case Kind::Power: return "power(" + std::to_string(a_) + ")";
    case Kind::OneMinusPow: return "one_minus_pow(" + std::to_string(a_) + ")";
    case Kind::ExpNeg: return "exp_neg(" + std::to_string(a_) + ")";
  }
  return "?";
}

ConcaveTransform parse_transform(const std::string& name) {
  auto param = [&](std::size_t open) {
    const std::size_t close = name.rfind(')');
    if (close == std::string::npos || close <= open + 1)
      throw std::invalid_argument("malformed transform name: " + name);
    return std::stod(name.substr(open + 1, close - open - 1));
  };
  if (name == "identity") return ConcaveTransform::identity();
  if (name == "log") return ConcaveTransform::log();
  if (name == "loglog") return ConcaveTransform::loglog();
  const std::size_t open = name.find('(');
  const std::string head = name.substr(0, open);
  if (head == "power") return ConcaveTransform::power(param(open));
  if (head == "one_minus_pow") return ConcaveTransform::one_minus_pow(param(open));
  if (head == "exp_neg") return ConcaveTransform::exp_neg(param(open));
  throw std::invalid_argument("unknown transform: " + name);
}

}  // namespace restartlab
