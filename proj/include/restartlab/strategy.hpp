#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "restartlab/combiner.hpp"
#include "restartlab/sequence.hpp"
#include "restartlab/weights.hpp"

namespace restartlab {

// Config-level description of a cutoff strategy: either a deterministic
// sequence or a randomized schedule template instantiated fresh per trial.
class Strategy {
 public:
  enum class Kind { Luby, Quantile, Constant, Explicit, Sprs, Ssprs, Combine };

  static Strategy luby();
  static Strategy quantile(double q);
  static Strategy constant(TimeValue alpha);
  static Strategy explicit_list(std::vector<TimeValue> cutoffs);
  static Strategy sprs(std::size_t i_max = 64);
  static Strategy ssprs(std::size_t i_max = 64);
  // Alg. 2 over deterministic base sequences; weights must sum to <= 1.
  static Strategy combine(std::vector<Strategy> parts, std::vector<double> weights);

  bool randomized() const { return kind_ == Kind::Sprs || kind_ == Kind::Ssprs || kind_ == Kind::Combine; }
  Kind kind() const { return kind_; }
  double q() const { return q_; }
  TimeValue alpha() const { return alpha_; }
  std::size_t i_max() const { return i_max_; }
  const std::vector<Strategy>& parts() const { return parts_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<TimeValue>& cutoffs() const { return cutoffs_; }

  // Deterministic kinds only.
  CutoffSequence sequence() const;
  // Randomized kinds only; fresh state per call.
  Combiner make_combiner() const;

  std::string label() const;

 private:
  Strategy() = default;
  Kind kind_ = Kind::Luby;
  double q_ = 0.5;
  TimeValue alpha_ = 1.0;
  std::size_t i_max_ = 64;
  std::vector<TimeValue> cutoffs_;
  std::vector<Strategy> parts_;
  std::vector<double> weights_;
};

// Per-trial cursor: deterministic sequences advance an index, randomized
// schedules own a Combiner. Sub-index is the combiner arm (0 for
// deterministic strategies).
class SchedulePlayer {
 public:
  explicit SchedulePlayer(const Strategy& s);
  std::pair<std::size_t, TimeValue> next(RandomStream& rng);
  bool randomized() const { return combiner_.has_value(); }
  const Combiner* combiner() const { return combiner_ ? &*combiner_ : nullptr; }

 private:
  std::optional<CutoffSequence> seq_;
  std::optional<Combiner> combiner_;
  std::size_t k_ = 0;
};

}  // namespace restartlab
