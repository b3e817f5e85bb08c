#include "restartlab/combiner.hpp"

#include <cmath>
#include <stdexcept>

namespace restartlab {

namespace {
// Full recomputation period for the incremental normalizer, bounding
// floating-point drift.
constexpr std::uint64_t kRecomputePeriod = std::uint64_t{1} << 16;
}  // namespace

Combiner::Combiner(std::vector<Arm> arms) : arms_(std::move(arms)) {
  if (arms_.empty()) throw std::invalid_argument("combiner requires at least one sequence");
  double total = 0.0;
  for (const auto& a : arms_) {
    if (!(a.weight > 0.0)) throw std::invalid_argument("combiner weights must be positive");
    total += a.weight;
  }
  if (total > 1.0 + 1e-12) throw std::invalid_argument("combiner weights must sum to at most 1");
  w_over_cutoff_.resize(arms_.size());
  recompute_z();
}

Combiner Combiner::sprs(const WeightFunction& wf, std::size_t i_max) {
  std::vector<Arm> arms;
  arms.reserve(i_max + 1);
  for (std::size_t i = 0; i <= i_max; ++i) {
    const double q = std::exp2(-static_cast<double>(i) - 1.0);
    arms.push_back({CutoffSequence::geometric_quantile(q), wf.weight(i)});
  }
  return Combiner(std::move(arms));
}

Combiner Combiner::ssprs(const WeightFunction& wf, CutoffSequence universal, std::size_t i_max) {
  std::vector<Arm> arms;
  arms.reserve(2 * (i_max + 1) + 1);
  arms.push_back({std::move(universal), 1.0 / 3.0});
  for (std::size_t i = 0; i <= i_max; ++i) {
    const double q = std::exp2(-static_cast<double>(i) - 1.0);
    const double r = wf.weight(i) / 3.0;
    arms.push_back({CutoffSequence::geometric_quantile(q), r});
    arms.push_back({CutoffSequence::constant(std::exp2(static_cast<double>(i) + 1.0)), r});
  }
  return Combiner(std::move(arms));
}

Combiner Combiner::combine(std::vector<CutoffSequence> parts, std::vector<double> weights) {
  if (parts.size() != weights.size())
    throw std::invalid_argument("combine needs one weight per sequence");
  std::vector<Arm> arms;
  arms.reserve(parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i) arms.push_back({std::move(parts[i]), weights[i]});
  return Combiner(std::move(arms));
}

void Combiner::recompute_z() {
  z_ = 0.0;
  for (std::size_t i = 0; i < arms_.size(); ++i) {
    w_over_cutoff_[i] = arms_[i].weight / arms_[i].seq.at(arms_[i].count);
    z_ += w_over_cutoff_[i];
  }
}

std::size_t Combiner::pick(double u) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < w_over_cutoff_.size(); ++i) {
    acc += w_over_cutoff_[i];
    if (u < acc) return i;
  }
  return w_over_cutoff_.size() - 1;  // guards fp drift at the right edge
}

std::pair<std::size_t, TimeValue> Combiner::next(RandomStream& rng) {
  const std::size_t idx = pick(rng.uniform01() * z_);
  Arm& a = arms_[idx];
  const TimeValue cutoff = a.seq.at(a.count);
  a.count += 1;
  ++draws_;
  if (draws_ % kRecomputePeriod == 0) {
    recompute_z();
  } else {
    z_ -= w_over_cutoff_[idx];
    w_over_cutoff_[idx] = a.weight / a.seq.at(a.count);
    z_ += w_over_cutoff_[idx];
  }
  return {idx, cutoff};
}

std::size_t Combiner::peek_index(RandomStream& rng) const { return pick(rng.uniform01() * z_); }

double Combiner::normalized_weight(std::size_t i) const {
  double total = 0.0;
  for (const auto& a : arms_) total += a.weight;
  return arms_[i].weight / total;
}

std::vector<double> Combiner::selection_probabilities() const {
  std::vector<double> p(arms_.size());
  double z = 0.0;
  for (std::size_t i = 0; i < arms_.size(); ++i) {
    p[i] = arms_[i].weight / arms_[i].seq.at(arms_[i].count);
    z += p[i];
  }
  for (auto& x : p) x /= z;
  return p;
}

}  // namespace restartlab
