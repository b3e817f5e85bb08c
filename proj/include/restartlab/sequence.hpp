#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "restartlab/common.hpp"

namespace restartlab {

// k-th term of the reluctant-doubling (Luby) sequence, 0-indexed:
// 1,1,2,1,1,2,4,1,1,2,1,1,2,4,8,... Computed in O(log k).
std::uint64_t luby_value_u64(std::uint64_t k);
inline TimeValue luby_value(std::size_t k) { return static_cast<TimeValue>(luby_value_u64(k)); }

// S^q_k = (1 - q/2)^{-k}. Saturates at the largest finite time on overflow;
// if `overflowed` is non-null it is set accordingly.
TimeValue geometric_quantile_value(double q, std::size_t k, bool* overflowed = nullptr);

// Deterministic cutoff sequences as pure index -> value functions.
class CutoffSequence {
 public:
  enum class Kind { Luby, GeometricQuantile, Constant, Explicit };

  static CutoffSequence luby() { return CutoffSequence(Kind::Luby, 0.0, {}); }
  static CutoffSequence geometric_quantile(double q);
  static CutoffSequence constant(TimeValue alpha);
  // Repeats the last element beyond the end of the list.
  static CutoffSequence explicit_list(std::vector<TimeValue> cutoffs);

  TimeValue at(std::size_t k) const;

  Kind kind() const { return kind_; }
  double param() const { return param_; }
  const std::vector<TimeValue>& cutoffs() const { return list_; }

  // Upper bound on long-run S_{k+1}/S_k, used by the exact series evaluator
  // for its geometric tail bound.
  double growth_ratio() const;
  // True when the sequence is nondecreasing in k (possibly after the
  // explicit prefix).
  bool eventually_nondecreasing() const { return kind_ != Kind::Luby; }

 private:
  CutoffSequence(Kind k, double p, std::vector<TimeValue> l)
      : kind_(k), param_(p), list_(std::move(l)) {}
  Kind kind_;
  double param_;
  std::vector<TimeValue> list_;
};

}  // namespace restartlab
