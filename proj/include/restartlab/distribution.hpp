#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "restartlab/common.hpp"
#include "restartlab/rng.hpp"
#include "restartlab/transform.hpp"

namespace restartlab {

class RuntimeDistribution;

namespace fam {

struct Atom {
  double t;  // >= 1, finite
  double p;  // > 0
};

struct Discrete {
  std::vector<Atom> atoms;  // sorted by t, duplicates merged
  std::vector<double> cum;  // running sums of p
};

struct Geometric {
  double success_prob;  // support {1,2,...}, P(T=k) = (1-p)^{k-1} p
};

struct Pareto {
  double shape;  // survival (scale/a)^shape for a >= scale
  double scale;  // >= 1
};

struct WorstCase {
  double r;          // >= 1
  double eps;        // >= 0
  double kappa;      // 1/(1+eps)
  double atom_mass;  // (1/r)^kappa at t = 1
};

struct Mixture {
  std::vector<RuntimeDistribution> components;
  std::vector<double> weights;
};

}  // namespace fam

// Running-time distribution p over [1, +inf], with an optional atom at +inf.
// Immutable after construction and safely shareable across threads.
class RuntimeDistribution {
 public:
  enum class Kind { Discrete, TwoPoint, Deterministic, GeometricTrials, ParetoTail, WorstCasePr, Mixture };

  static RuntimeDistribution discrete(std::vector<fam::Atom> atoms, double mass_at_infinity = 0.0);
  static RuntimeDistribution two_point(fam::Atom a, fam::Atom b);
  static RuntimeDistribution deterministic(double c);
  static RuntimeDistribution geometric_trials(double success_prob);
  static RuntimeDistribution pareto_tail(double shape, double scale);
  // The extremal distribution p_r with CDF min{(a/r)^{1/(1+eps)}, 1} on
  // [1, +inf): an atom of mass (1/r)^{1/(1+eps)} at 1 plus a continuous
  // part on (1, r]. Satisfies inf_q Q(q)/q^{1+eps} = r.
  static RuntimeDistribution worst_case_pr(double r, double eps);
  static RuntimeDistribution mixture(std::vector<RuntimeDistribution> components,
                                     std::vector<double> weights, double mass_at_infinity = 0.0);

  // P(T <= alpha); cdf(+inf) = 1 - mass_at_infinity.
  double cdf(double alpha) const;
  // Q_p(q) = min{alpha in [1,+inf] : P(T <= alpha) >= q}; +inf when q
  // exceeds the finite mass. Throws std::domain_error unless q in (0,1].
  TimeValue quantile(double q) const;
  // Inverse-CDF draw; returns +inf with probability mass_at_infinity.
  TimeValue sample(RandomStream& rng) const;
  // E[min{T, alpha}] for finite alpha >= 1; atoms at +inf contribute alpha.
  double expected_min(double alpha) const;
  // E[phi(T)], +inf when phi is unbounded and mass_at_infinity > 0.
  double expected_transform(const ConcaveTransform& phi) const;
  // E[T]; +inf when mass_at_infinity > 0 or the tail is too heavy.
  double mean() const;
  // E[T^a] for a > 0.
  double moment(double a) const;

  double mass_at_infinity() const { return p_inf_; }
  double finite_mass() const { return finite_mass_; }

  // ln E[e^{-s T}] evaluated in log space (the mass at +inf contributes
  // nothing); stays meaningful where 1 - e^{-sT} saturates in doubles.
  double log_laplace(double s) const;

  Kind kind() const { return kind_; }
  std::string label() const;

  // Oracle support -------------------------------------------------------
  // Merged atom list when the distribution is purely discrete (no
  // continuous part anywhere), nullopt otherwise.
  std::optional<std::vector<fam::Atom>> merged_atoms() const;
  bool has_continuous_part() const;
  // Candidate cutoffs: atom times plus continuous-family breakpoints.
  std::vector<double> candidate_cutoffs() const;
  // Candidate quantile levels: the CDF image at atoms/breakpoints.
  std::vector<double> cdf_image() const;

  template <class F>
  const F* family_as() const { return std::get_if<F>(&fam_); }

 private:
  using Family = std::variant<fam::Discrete, fam::Geometric, fam::Pareto, fam::WorstCase, fam::Mixture>;
  RuntimeDistribution(Kind k, Family f, double p_inf);

  Family fam_;
  double p_inf_;
  double finite_mass_;
  Kind kind_;
};

}  // namespace restartlab
