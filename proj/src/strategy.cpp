#include "restartlab/strategy.hpp"

#include <sstream>
#include <stdexcept>

namespace restartlab {

Strategy Strategy::luby() {
  Strategy s;
  s.kind_ = Kind::Luby;
  return s;
}

Strategy Strategy::quantile(double q) {
  if (!(q > 0.0 && q <= 1.0)) throw std::domain_error("quantile strategy requires q in (0,1]");
  Strategy s;
  s.kind_ = Kind::Quantile;
  s.q_ = q;
  return s;
}

Strategy Strategy::constant(TimeValue alpha) {
  if (!(alpha >= 1.0)) throw std::domain_error("constant strategy requires alpha >= 1");
  Strategy s;
  s.kind_ = Kind::Constant;
  s.alpha_ = alpha;
  return s;
}

Strategy Strategy::explicit_list(std::vector<TimeValue> cutoffs) {
  (void)CutoffSequence::explicit_list(cutoffs);  // validate
  Strategy s;
  s.kind_ = Kind::Explicit;
  s.cutoffs_ = std::move(cutoffs);
  return s;
}

Strategy Strategy::sprs(std::size_t i_max) {
  Strategy s;
  s.kind_ = Kind::Sprs;
  s.i_max_ = i_max;
  return s;
}

Strategy Strategy::ssprs(std::size_t i_max) {
  Strategy s;
  s.kind_ = Kind::Ssprs;
  s.i_max_ = i_max;
  return s;
}

Strategy Strategy::combine(std::vector<Strategy> parts, std::vector<double> weights) {
  if (parts.size() != weights.size()) throw std::domain_error("combine needs one weight per part");
  if (parts.empty()) throw std::domain_error("combine needs at least one part");
  for (const auto& p : parts)
    if (p.randomized())
      throw std::domain_error("combine parts must be deterministic cutoff sequences");
  Strategy s;
  s.kind_ = Kind::Combine;
  s.parts_ = std::move(parts);
  s.weights_ = std::move(weights);
  return s;
}

CutoffSequence Strategy::sequence() const {
  switch (kind_) {
    case Kind::Luby: return CutoffSequence::luby();
    case Kind::Quantile: return CutoffSequence::geometric_quantile(q_);
    case Kind::Constant: return CutoffSequence::constant(alpha_);
    case Kind::Explicit: return CutoffSequence::explicit_list(cutoffs_);
    default: throw std::logic_error("sequence() called on a randomized strategy");
  }
}

Combiner Strategy::make_combiner() const {
  switch (kind_) {
    case Kind::Sprs: return Combiner::sprs(WeightFunction::polylog(), i_max_);
    case Kind::Ssprs: return Combiner::ssprs(WeightFunction::polylog(), CutoffSequence::luby(), i_max_);
    case Kind::Combine: {
      std::vector<CutoffSequence> seqs;
      seqs.reserve(parts_.size());
      for (const auto& p : parts_) seqs.push_back(p.sequence());
      return Combiner::combine(std::move(seqs), weights_);
    }
    default: throw std::logic_error("make_combiner() called on a deterministic strategy");
  }
}

std::string Strategy::label() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Luby: return "luby";
    case Kind::Quantile: os << "quantile(q=" << q_ << ")"; break;
    case Kind::Constant: os << "constant(alpha=" << alpha_ << ")"; break;
    case Kind::Explicit: {
      os << "explicit[";
      for (std::size_t i = 0; i < cutoffs_.size(); ++i) os << (i ? ";" : "") << cutoffs_[i];
      os << "]";
      break;
    }
    case Kind::Sprs: os << "sprs(i_max=" << i_max_ << ")"; break;
    case Kind::Ssprs: os << "ssprs(i_max=" << i_max_ << ")"; break;
    case Kind::Combine: {
      os << "combine(";
      for (std::size_t i = 0; i < parts_.size(); ++i)
        os << (i ? ";" : "") << parts_[i].label() << ":" << weights_[i];
      os << ")";
      break;
    }
  }
  return os.str();
}

SchedulePlayer::SchedulePlayer(const Strategy& s) {
  if (s.randomized())
    combiner_.emplace(s.make_combiner());
  else
    seq_.emplace(s.sequence());
}

std::pair<std::size_t, TimeValue> SchedulePlayer::next(RandomStream& rng) {
  if (combiner_) return combiner_->next(rng);
  return {0, seq_->at(k_++)};
}

}  // namespace restartlab
