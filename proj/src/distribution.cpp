#include "restartlab/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "restartlab/quadrature.hpp"

namespace restartlab {

namespace {

constexpr double kMassTolerance = 1e-12;

std::vector<fam::Atom> normalize_atoms(std::vector<fam::Atom> atoms, double& p_inf) {
  for (const auto& a : atoms) {
    if (!(a.t >= 1.0) || std::isinf(a.t)) throw std::invalid_argument("atom times must be finite and >= 1");
    if (!(a.p > 0.0)) throw std::invalid_argument("atom probabilities must be positive");
  }
  if (!(p_inf >= 0.0 && p_inf <= 1.0)) throw std::invalid_argument("mass_at_infinity must be in [0,1]");
  std::sort(atoms.begin(), atoms.end(), [](const fam::Atom& x, const fam::Atom& y) { return x.t < y.t; });
  // merge equal times
  std::vector<fam::Atom> merged;
  for (const auto& a : atoms) {
    if (!merged.empty() && merged.back().t == a.t)
      merged.back().p += a.p;
    else
      merged.push_back(a);
  }
  double mass = p_inf;
  for (const auto& a : merged) mass += a.p;
  if (std::fabs(mass - 1.0) > kMassTolerance)
    throw std::invalid_argument("total mass differs from 1 by more than 1e-12");
  for (auto& a : merged) a.p /= mass;
  p_inf /= mass;
  return merged;
}

}  // namespace

RuntimeDistribution::RuntimeDistribution(Kind k, Family f, double p_inf)
    : fam_(std::move(f)), p_inf_(p_inf), finite_mass_(1.0 - p_inf), kind_(k) {
  // keep the finite mass exact where it can be summed directly
  if (const auto* d = std::get_if<fam::Discrete>(&fam_)) {
    if (!d->cum.empty()) finite_mass_ = d->cum.back();
  } else if (const auto* m = std::get_if<fam::Mixture>(&fam_)) {
    double fm = 0.0;
    for (std::size_t i = 0; i < m->components.size(); ++i)
      fm += m->weights[i] * m->components[i].finite_mass();
    finite_mass_ = fm;
  }
}

RuntimeDistribution RuntimeDistribution::discrete(std::vector<fam::Atom> atoms, double mass_at_infinity) {
  if (atoms.empty() && mass_at_infinity < 1.0) throw std::invalid_argument("discrete distribution needs atoms");
  double p_inf = mass_at_infinity;
  fam::Discrete d;
  d.atoms = normalize_atoms(std::move(atoms), p_inf);
  d.cum.reserve(d.atoms.size());
  double c = 0.0;
  for (const auto& a : d.atoms) d.cum.push_back(c += a.p);
  return RuntimeDistribution(Kind::Discrete, std::move(d), p_inf);
}

RuntimeDistribution RuntimeDistribution::two_point(fam::Atom a, fam::Atom b) {
  auto d = discrete({a, b}, 0.0);
  d.kind_ = Kind::TwoPoint;
  return d;
}

RuntimeDistribution RuntimeDistribution::deterministic(double c) {
  auto d = discrete({{c, 1.0}}, 0.0);
  d.kind_ = Kind::Deterministic;
  return d;
}

RuntimeDistribution RuntimeDistribution::geometric_trials(double success_prob) {
  if (!(success_prob > 0.0 && success_prob <= 1.0))
    throw std::invalid_argument("geometric_trials requires success probability in (0,1]");
  return RuntimeDistribution(Kind::GeometricTrials, fam::Geometric{success_prob}, 0.0);
}

RuntimeDistribution RuntimeDistribution::pareto_tail(double shape, double scale) {
  if (!(shape > 0.0)) throw std::invalid_argument("pareto_tail requires shape > 0");
  if (!(scale >= 1.0)) throw std::invalid_argument("pareto_tail requires scale >= 1");
  return RuntimeDistribution(Kind::ParetoTail, fam::Pareto{shape, scale}, 0.0);
}

RuntimeDistribution RuntimeDistribution::worst_case_pr(double r, double eps) {
  if (!(r >= 1.0)) throw std::domain_error("worst_case_pr requires r >= 1");
  if (!(eps >= 0.0)) throw std::domain_error("worst_case_pr requires eps >= 0");
  const double kappa = 1.0 / (1.0 + eps);
  const double atom = std::pow(1.0 / r, kappa);
  return RuntimeDistribution(Kind::WorstCasePr, fam::WorstCase{r, eps, kappa, atom}, 0.0);
}

RuntimeDistribution RuntimeDistribution::mixture(std::vector<RuntimeDistribution> components,
                                                 std::vector<double> weights, double mass_at_infinity) {
  if (components.size() != weights.size())
    throw std::invalid_argument("mixture needs one weight per component");
  if (components.empty() && mass_at_infinity < 1.0)
    throw std::invalid_argument("mixture needs at least one component");
  double mass = mass_at_infinity;
  for (double w : weights) {
    if (!(w > 0.0)) throw std::invalid_argument("mixture weights must be positive");
    mass += w;
  }
  if (std::fabs(mass - 1.0) > kMassTolerance)
    throw std::invalid_argument("total mass differs from 1 by more than 1e-12");
  for (auto& w : weights) w /= mass;
  mass_at_infinity /= mass;
  double p_inf = mass_at_infinity;
  for (std::size_t i = 0; i < components.size(); ++i) p_inf += weights[i] * components[i].mass_at_infinity();
  fam::Mixture m{std::move(components), std::move(weights)};
  return RuntimeDistribution(Kind::Mixture, std::move(m), p_inf);
}

double RuntimeDistribution::cdf(double alpha) const {
  if (std::isinf(alpha)) return finite_mass();
  if (alpha < 1.0) return 0.0;
  if (const auto* d = family_as<fam::Discrete>()) {
    // last atom with t <= alpha
    auto it = std::upper_bound(d->atoms.begin(), d->atoms.end(), alpha,
                               [](double a, const fam::Atom& x) { return a < x.t; });
    if (it == d->atoms.begin()) return 0.0;
    return d->cum[static_cast<std::size_t>(it - d->atoms.begin()) - 1];
  }
  if (const auto* g = family_as<fam::Geometric>()) {
    const double k = std::floor(alpha);
    if (k < 1.0) return 0.0;
    return -std::expm1(k * std::log1p(-g->success_prob));
  }
  if (const auto* p = family_as<fam::Pareto>()) {
    if (alpha < p->scale) return 0.0;
    return 1.0 - std::pow(p->scale / alpha, p->shape);
  }
  if (const auto* w = family_as<fam::WorstCase>()) {
    if (alpha >= w->r) return 1.0;
    return std::pow(alpha / w->r, w->kappa);
  }
  const auto& m = std::get<fam::Mixture>(fam_);
  double f = 0.0;
  for (std::size_t i = 0; i < m.components.size(); ++i) f += m.weights[i] * m.components[i].cdf(alpha);
  return f;
}

TimeValue RuntimeDistribution::quantile(double q) const {
  if (!(q > 0.0 && q <= 1.0)) throw std::domain_error("quantile requires q in (0,1]");
  if (q > finite_mass()) return kInf;
  if (const auto* d = family_as<fam::Discrete>()) {
    auto it = std::lower_bound(d->cum.begin(), d->cum.end(), q);
    if (it == d->cum.end()) return kInf;
    return d->atoms[static_cast<std::size_t>(it - d->cum.begin())].t;
  }
  if (const auto* g = family_as<fam::Geometric>()) {
    if (q >= 1.0) {
      if (g->success_prob == 1.0) return 1.0;
      return kInf;  // F(alpha) < 1 for every finite alpha
    }
    const double x = std::log1p(-q) / std::log1p(-g->success_prob);
    double k = std::max(1.0, std::ceil(x));
    while (k > 1.0 && cdf(k - 1.0) >= q) k -= 1.0;
    while (cdf(k) < q) k += 1.0;
    return k;
  }
  double alpha;
  if (const auto* p = family_as<fam::Pareto>()) {
    if (q >= 1.0) return kInf;
    alpha = p->scale * std::pow(1.0 - q, -1.0 / p->shape);
    alpha = std::max(alpha, p->scale);
  } else if (const auto* w = family_as<fam::WorstCase>()) {
    alpha = std::min(std::max(1.0, w->r * std::pow(q, 1.0 + w->eps)), w->r);
  } else {
    // Mixture: minimal alpha with cdf(alpha) >= q by bisection over doubles.
    if (cdf(1.0) >= q) return 1.0;
    double hi = 2.0;
    while (cdf(hi) < q) {
      hi *= 2.0;
      if (std::isinf(hi)) return kInf;
    }
    double lo = std::max(1.0, hi / 2.0);
    while (true) {
      const double mid = lo + 0.5 * (hi - lo);
      if (mid <= lo || mid >= hi) break;
      (cdf(mid) >= q ? hi : lo) = mid;
    }
    return hi;
  }
  // snap to the minimal double with cdf >= q
  for (int i = 0; i < 64 && alpha > 1.0; ++i) {
    const double prev = std::nextafter(alpha, 0.0);
    if (prev < 1.0 || cdf(prev) < q) break;
    alpha = prev;
  }
  for (int i = 0; i < 64 && cdf(alpha) < q; ++i) alpha = std::nextafter(alpha, kInf);
  return alpha;
}

TimeValue RuntimeDistribution::sample(RandomStream& rng) const {
  const double u = rng.uniform_open01();
  if (u > finite_mass()) return kInf;
  return quantile(u);
}

double RuntimeDistribution::expected_min(double alpha) const {
  if (!(alpha >= 1.0)) throw std::domain_error("expected_min requires alpha >= 1");
  if (std::isinf(alpha)) throw std::domain_error("expected_min requires finite alpha");
  if (const auto* d = family_as<fam::Discrete>()) {
    double s = 0.0;
    for (const auto& a : d->atoms) {
      if (a.t > alpha) break;
      s += a.p * a.t;
    }
    return s + (1.0 - cdf(alpha)) * alpha;
  }
  if (const auto* g = family_as<fam::Geometric>()) {
    // int_0^alpha P(T > u) du with P(T > u) = (1-p)^{floor(u)}
    const double p = g->success_prob;
    const double m = std::floor(alpha);
    const double sm = std::exp(m * std::log1p(-p));  // (1-p)^m
    return -std::expm1(m * std::log1p(-p)) / p + (alpha - m) * sm;
  }
  if (const auto* pt = family_as<fam::Pareto>()) {
    if (alpha <= pt->scale) return alpha;
    if (pt->shape == 1.0) return pt->scale + pt->scale * std::log(alpha / pt->scale);
    const double sh = pt->shape;
    return pt->scale + std::pow(pt->scale, sh) / (sh - 1.0) *
                           (std::pow(pt->scale, 1.0 - sh) - std::pow(alpha, 1.0 - sh));
  }
  if (const auto* w = family_as<fam::WorstCase>()) {
    const double x = std::min(alpha, w->r);
    if (x <= 1.0) return alpha >= 1.0 ? 1.0 : alpha;
    const double k1 = w->kappa + 1.0;
    return x - std::pow(w->r, -w->kappa) * (std::pow(x, k1) - 1.0) / k1;
  }
  const auto& m = std::get<fam::Mixture>(fam_);
  double s = 0.0;
  for (std::size_t i = 0; i < m.components.size(); ++i)
    s += m.weights[i] * m.components[i].expected_min(alpha);
  // explicit mass at infinity contributes alpha; component masses already do
  double w_expl = 1.0;
  for (double w : m.weights) w_expl -= w;
  return s + std::max(0.0, w_expl) * alpha;
}

double RuntimeDistribution::expected_transform(const ConcaveTransform& phi) const {
  if (p_inf_ > 0.0 && !phi.bounded()) return kInf;
  if (const auto* d = family_as<fam::Discrete>()) {
    double s = 0.0;
    for (const auto& a : d->atoms) s += a.p * phi.forward(a.t);
    if (p_inf_ > 0.0) s += p_inf_ * phi.sup();
    return s;
  }
  if (const auto* g = family_as<fam::Geometric>()) {
    const double p = g->success_prob;
    const double one_minus = 1.0 - p;
    double weight = p;  // (1-p)^{k-1} p
    double s = 0.0;
    for (double k = 1.0; k < 1e9; k += 1.0) {
      const double term = weight * phi.forward(k);
      s += term;
      weight *= one_minus;
      // tail <= weight * remaining; for increasing concave phi the ratio of
      // consecutive terms is at most (1-p)(k+1)/k
      const double rho = one_minus * (k + 1.0) / k;
      if (k >= 8.0 && rho < 1.0) {
        const double tail = weight * std::max(phi.forward(k + 1.0), 0.0) / (1.0 - rho);
        if (tail <= 1e-15 * (std::fabs(s) + 1e-300)) break;
      }
      if (weight < 1e-300) break;
    }
    return s;
  }
  if (const auto* pt = family_as<fam::Pareto>()) {
    const double sh = pt->shape;
    const double sc = pt->scale;
    switch (phi.kind()) {
      case ConcaveTransform::Kind::Identity: return mean();
      case ConcaveTransform::Kind::Power: {
        const double a = phi.param();
        if (a >= sh) return kInf;
        return sh * std::pow(sc, a) / (sh - a);
      }
      case ConcaveTransform::Kind::Log: return std::log(sc) + 1.0 / sh;
      case ConcaveTransform::Kind::OneMinusPow: {
        const double b = phi.param();
        return 1.0 - sh / (sh + b) * std::pow(sc, -b);
      }
      default: break;
    }
    // E[phi] = int_0^inf phi(scale e^s) shape e^{-shape s} ds
    double hi = 4.0 / sh;
    while (hi < 1e6 && std::fabs(phi.forward(sc * std::exp(hi))) * std::exp(-sh * hi) > 1e-16) hi *= 1.5;
    return integrate(
        [&](double s) { return phi.forward(sc * std::exp(s)) * sh * std::exp(-sh * s); }, 0.0, hi,
        1e-12 * (1.0 + std::fabs(phi.forward(sc))) );
  }
  if (const auto* w = family_as<fam::WorstCase>()) {
    double s = w->atom_mass * phi.forward(1.0);
    if (w->r > 1.0) {
      // continuous density kappa u^{kappa-1} / r^kappa on (1, r], u = e^x
      const double lr = std::log(w->r);
      const double scale = std::max(1.0, std::fabs(phi.forward(w->r)));
      s += integrate(
          [&](double x) {
            return phi.forward(std::exp(x)) * w->kappa * std::exp(w->kappa * x) *
                   std::pow(w->r, -w->kappa);
          },
          0.0, lr, 1e-12 * scale);
    }
    return s;
  }
  const auto& m = std::get<fam::Mixture>(fam_);
  double s = 0.0;
  for (std::size_t i = 0; i < m.components.size(); ++i) {
    const double e = m.components[i].expected_transform(phi);
    if (std::isinf(e)) return kInf;
    s += m.weights[i] * e;
  }
  double w_expl = 1.0;
  for (double w : m.weights) w_expl -= w;
  if (w_expl > 0.0) s += w_expl * phi.sup();
  return s;
}

double RuntimeDistribution::mean() const {
  if (p_inf_ > 0.0) return kInf;
  if (const auto* d = family_as<fam::Discrete>()) {
    double s = 0.0;
    for (const auto& a : d->atoms) s += a.p * a.t;
    return s;
  }
  if (const auto* g = family_as<fam::Geometric>()) return 1.0 / g->success_prob;
  if (const auto* p = family_as<fam::Pareto>()) {
    if (p->shape <= 1.0) return kInf;
    return p->shape * p->scale / (p->shape - 1.0);
  }
  if (const auto* w = family_as<fam::WorstCase>()) return expected_min(w->r);
  const auto& m = std::get<fam::Mixture>(fam_);
  double s = 0.0;
  for (std::size_t i = 0; i < m.components.size(); ++i) {
    const double e = m.components[i].mean();
    if (std::isinf(e)) return kInf;
    s += m.weights[i] * e;
  }
  return s;
}

double RuntimeDistribution::moment(double a) const {
  return expected_transform(ConcaveTransform::power(a));
}

double RuntimeDistribution::log_laplace(double s) const {
  if (finite_mass_ <= 0.0) return -kInf;
  if (const auto* d = family_as<fam::Discrete>()) {
    double m = -kInf;
    for (const auto& a : d->atoms) m = std::max(m, std::log(a.p) - s * a.t);
    double sum = 0.0;
    for (const auto& a : d->atoms) sum += std::exp(std::log(a.p) - s * a.t - m);
    return m + std::log(sum);
  }
  if (const auto* g = family_as<fam::Geometric>()) {
    // E[e^{-sT}] = p e^{-s} / (1 - (1-p) e^{-s})
    const double p = g->success_prob;
    return std::log(p) - s - std::log1p(-(1.0 - p) * std::exp(-s));
  }
  if (const auto* pt = family_as<fam::Pareto>()) {
    const double sh = pt->shape;
    const double sc = pt->scale;
    // int_0^inf e^{-s sc e^x} sh e^{-sh x} dx, shifted by the dominant
    // factor e^{-s sc} so the quadrature stays in range
    double hi = 4.0 / sh + 4.0 / (s * sc + 1.0);
    while (hi < 1e4 && std::exp(-s * sc * (std::exp(hi) - 1.0) - sh * hi) > 1e-18) hi *= 1.5;
    const double integral = integrate(
        [&](double x) { return sh * std::exp(-s * sc * std::expm1(x) - sh * x); }, 0.0, hi, 1e-14);
    return -s * sc + std::log(integral);
  }
  if (const auto* w = family_as<fam::WorstCase>()) {
    double sum = w->atom_mass;  // e^{-s*1} factored out of the atom at 1
    if (w->r > 1.0) {
      sum += integrate(
          [&](double x) {
            return std::exp(-s * std::expm1(x)) * w->kappa * std::exp(w->kappa * x) *
                   std::pow(w->r, -w->kappa);
          },
          0.0, std::log(w->r), 1e-14);
    }
    return -s + std::log(sum);
  }
  const auto& m = std::get<fam::Mixture>(fam_);
  double peak = -kInf;
  std::vector<double> logs;
  logs.reserve(m.components.size());
  for (std::size_t i = 0; i < m.components.size(); ++i) {
    const double l = std::log(m.weights[i]) + m.components[i].log_laplace(s);
    logs.push_back(l);
    peak = std::max(peak, l);
  }
  if (!std::isfinite(peak)) return -kInf;
  double sum = 0.0;
  for (double l : logs) sum += std::exp(l - peak);
  return peak + std::log(sum);
}

std::optional<std::vector<fam::Atom>> RuntimeDistribution::merged_atoms() const {
  if (const auto* d = family_as<fam::Discrete>()) return d->atoms;
  if (const auto* m = family_as<fam::Mixture>()) {
    std::vector<fam::Atom> all;
    for (std::size_t i = 0; i < m->components.size(); ++i) {
      auto sub = m->components[i].merged_atoms();
      if (!sub) return std::nullopt;
      for (const auto& a : *sub) all.push_back({a.t, a.p * m->weights[i]});
    }
    std::sort(all.begin(), all.end(), [](const fam::Atom& x, const fam::Atom& y) { return x.t < y.t; });
    std::vector<fam::Atom> merged;
    for (const auto& a : all) {
      if (!merged.empty() && merged.back().t == a.t)
        merged.back().p += a.p;
      else
        merged.push_back(a);
    }
    return merged;
  }
  return std::nullopt;
}

bool RuntimeDistribution::has_continuous_part() const { return !merged_atoms().has_value(); }

std::vector<double> RuntimeDistribution::candidate_cutoffs() const {
  std::set<double> out;
  if (auto atoms = merged_atoms()) {
    for (const auto& a : *atoms) out.insert(a.t);
  } else if (const auto* g = family_as<fam::Geometric>()) {
    // enumerate atoms up to all but 1e-12 of the mass, capped
    const double kmax = std::min(2048.0, std::ceil(std::log(1e-12) / std::log1p(-g->success_prob)));
    for (double k = 1.0; k <= kmax; k += 1.0) out.insert(k);
  } else if (const auto* p = family_as<fam::Pareto>()) {
    out.insert(p->scale);
  } else if (const auto* w = family_as<fam::WorstCase>()) {
    out.insert(1.0);
    out.insert(w->r);
  } else if (const auto* m = family_as<fam::Mixture>()) {
    for (const auto& c : m->components)
      for (double t : c.candidate_cutoffs()) out.insert(t);
  }
  return {out.begin(), out.end()};
}

std::vector<double> RuntimeDistribution::cdf_image() const {
  std::set<double> out;
  for (double t : candidate_cutoffs()) {
    const double q = cdf(t);
    if (q > 0.0) out.insert(q);
  }
  if (finite_mass() > 0.0) out.insert(finite_mass());
  return {out.begin(), out.end()};
}

std::string RuntimeDistribution::label() const {
  std::ostringstream os;
  auto num = [](double x) {
    std::ostringstream o;
    o << x;
    return o.str();
  };
  switch (kind_) {
    case Kind::Deterministic:
      os << "deterministic(c=" << num(family_as<fam::Discrete>()->atoms[0].t) << ")";
      break;
    case Kind::TwoPoint:
    case Kind::Discrete: {
      const auto* d = family_as<fam::Discrete>();
      os << (kind_ == Kind::TwoPoint ? "two_point(" : "discrete(");
      for (std::size_t i = 0; i < d->atoms.size(); ++i)
        os << (i ? ";" : "") << num(d->atoms[i].t) << ":" << num(d->atoms[i].p);
      if (p_inf_ > 0.0) os << ";inf:" << num(p_inf_);
      os << ")";
      break;
    }
    case Kind::GeometricTrials:
      os << "geometric_trials(p=" << num(family_as<fam::Geometric>()->success_prob) << ")";
      break;
    case Kind::ParetoTail: {
      const auto* p = family_as<fam::Pareto>();
      os << "pareto_tail(shape=" << num(p->shape) << ";scale=" << num(p->scale) << ")";
      break;
    }
    case Kind::WorstCasePr: {
      const auto* w = family_as<fam::WorstCase>();
      os << "worst_case_pr(r=" << num(w->r) << ";eps=" << num(w->eps) << ")";
      break;
    }
    case Kind::Mixture: {
      const auto* m = family_as<fam::Mixture>();
      os << "mixture(";
      for (std::size_t i = 0; i < m->components.size(); ++i)
        os << (i ? ";" : "") << m->components[i].label() << ":" << num(m->weights[i]);
      double w_expl = 1.0;
      for (double w : m->weights) w_expl -= w;
      if (w_expl > 1e-15) os << ";inf:" << num(w_expl);
      os << ")";
      break;
    }
  }
  return os.str();
}

}  // namespace restartlab
