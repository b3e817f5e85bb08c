#include "restartlab/sequence.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace restartlab {

std::uint64_t luby_value_u64(std::uint64_t k) {
  // u_k = 2^{i-1} when k = 2^i - 2, else u_{k - 2^{i-1} + 1} where
  // 2^{i-1} - 1 <= k < 2^i - 2. With n = k + 2 the first case is "n is a
  // power of two" and the recursion subtracts 2^{i-1} - 1.
  for (;;) {
    const std::uint64_t n = k + 2;
    if ((n & (n - 1)) == 0) return n >> 1;
    const int i = std::bit_width(n) - 1;  // 2^i < n < 2^{i+1}
    k -= (std::uint64_t{1} << i) - 1;
  }
}

TimeValue geometric_quantile_value(double q, std::size_t k, bool* overflowed) {
  if (!(q > 0.0 && q <= 1.0)) throw std::domain_error("geometric_quantile requires q in (0,1]");
  if (overflowed) *overflowed = false;
  // (1 - q/2)^{-k} = exp(-k ln(1 - q/2)); log1p keeps small q accurate.
  const double v = std::exp(-static_cast<double>(k) * std::log1p(-0.5 * q));
  if (!(v <= kMaxFiniteTime)) {
    if (overflowed) *overflowed = true;
    return kMaxFiniteTime;
  }
  return v < 1.0 ? 1.0 : v;
}

CutoffSequence CutoffSequence::geometric_quantile(double q) {
  if (!(q > 0.0 && q <= 1.0)) throw std::domain_error("geometric_quantile requires q in (0,1]");
  return CutoffSequence(Kind::GeometricQuantile, q, {});
}

CutoffSequence CutoffSequence::constant(TimeValue alpha) {
  if (!(alpha >= 1.0)) throw std::domain_error("constant sequence requires alpha >= 1");
  return CutoffSequence(Kind::Constant, alpha, {});
}

CutoffSequence CutoffSequence::explicit_list(std::vector<TimeValue> cutoffs) {
  if (cutoffs.empty()) throw std::domain_error("explicit sequence requires at least one cutoff");
  for (TimeValue c : cutoffs)
    if (!(c >= 1.0) || std::isinf(c)) throw std::domain_error("cutoffs must be finite and >= 1");
  return CutoffSequence(Kind::Explicit, 0.0, std::move(cutoffs));
}

TimeValue CutoffSequence::at(std::size_t k) const {
  switch (kind_) {
    case Kind::Luby: return luby_value(k);
    case Kind::GeometricQuantile: return geometric_quantile_value(param_, k);
    case Kind::Constant: return param_;
    case Kind::Explicit: return k < list_.size() ? list_[k] : list_.back();
  }
  return 1.0;
}

double CutoffSequence::growth_ratio() const {
  switch (kind_) {
    case Kind::Luby: return 2.0;
    case Kind::GeometricQuantile: return 1.0 / (1.0 - 0.5 * param_);
    case Kind::Constant:
    case Kind::Explicit: return 1.0;
  }
  return 1.0;
}

}  // namespace restartlab
