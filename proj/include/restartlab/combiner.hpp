#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "restartlab/rng.hpp"
#include "restartlab/sequence.hpp"
#include "restartlab/weights.hpp"

namespace restartlab {

// Simulated-parallel scheduler over a family of cutoff sequences: each draw
// selects arm I with probability proportional to r_I / S^I_{K_I}, emits
// S^I_{K_I} and advances K_I. Single-owner mutable state; one instance per
// simulation trial.
class Combiner {
 public:
  struct Arm {
    CutoffSequence seq;
    double weight;            // r_i, relative (may form a sub-probability)
    std::uint64_t count = 0;  // K_i
  };

  explicit Combiner(std::vector<Arm> arms);

  // Family {S^{q_i}}_{i <= i_max} with q_i = 2^{-i-1} and weights
  // 1/(C phi(i)).
  static Combiner sprs(const WeightFunction& wf, std::size_t i_max = 64);
  // Flat three-branch family: arm 0 the universal sequence with weight 1/3,
  // arm 2i+1 = S^{q_i} and arm 2i+2 the constant sequence (2^{i+1},...),
  // both with weight 1/(3 C phi(i)).
  static Combiner ssprs(const WeightFunction& wf, CutoffSequence universal,
                        std::size_t i_max = 64);
  static Combiner combine(std::vector<CutoffSequence> parts, std::vector<double> weights);

  // Samples an arm, returns (index, cutoff) and advances the arm's counter.
  std::pair<std::size_t, TimeValue> next(RandomStream& rng);

  std::size_t arm_count() const { return arms_.size(); }
  const Arm& arm(std::size_t i) const { return arms_[i]; }
  std::uint64_t draws() const { return draws_; }

  // r_i / sum_j r_j; the long-run fraction of emitted cutoff time charged
  // to arm i.
  double normalized_weight(std::size_t i) const;
  // Current selection probabilities (r_i / S^i_{K_i}) / Z.
  std::vector<double> selection_probabilities() const;
  // Samples an arm index from the current state without advancing it.
  std::size_t peek_index(RandomStream& rng) const;

 private:
  std::size_t pick(double u) const;
  void recompute_z();

  std::vector<Arm> arms_;
  std::vector<double> w_over_cutoff_;
  double z_ = 0.0;
  std::uint64_t draws_ = 0;
};

}  // namespace restartlab
