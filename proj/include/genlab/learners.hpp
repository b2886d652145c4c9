#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "genlab/measures.hpp"

namespace genlab {

enum class LearnerKind { Ewa, Opt2Ewa, Ftrl, OptFtrl };

inline std::string learner_kind_name(LearnerKind k) {
  switch (k) {
    case LearnerKind::Ewa: return "EWA";
    case LearnerKind::Opt2Ewa: return "OPT2EWA";
    case LearnerKind::Ftrl: return "FTRL";
    case LearnerKind::OptFtrl: return "OPTFTRL";
  }
  return "?";
}

// Strong-convexity modulus of the regularizer w.r.t. its paired norm
// (KL w.r.t. l1, CHI2 w.r.t. the weighted 2-norm, squared p-norm w.r.t. the
// weighted p-norm).  For p > 2 the regularizer is only p-uniformly convex
// and the modulus below is not used.
inline double strong_convexity_modulus(const DivergenceSpec& spec) {
  switch (spec.kind) {
    case DivergenceKind::KL: return 1.0;
    case DivergenceKind::Chi2: return 2.0;
    case DivergenceKind::PNorm:
      if (spec.p <= 2.0) return 2.0 * (spec.p - 1.0);
      throw std::invalid_argument(
          "strong_convexity_modulus: p > 2 regularizer is only p-uniformly convex");
    case DivergenceKind::TV:
      throw std::invalid_argument("strong_convexity_modulus: TV is not strongly convex");
  }
  return 0.0;
}

// Dual norm of a cost-space vector under the spec's norm pairing.
inline double spec_dual_norm(const DivergenceSpec& spec, const CostVector& f) {
  switch (spec.kind) {
    case DivergenceKind::KL: return f.max_abs();
    case DivergenceKind::Chi2: return dual_q_norm(f, spec.base, 2.0);
    case DivergenceKind::PNorm: return dual_q_norm(f, spec.base, spec.p / (spec.p - 1.0));
    case DivergenceKind::TV: return f.max_abs();
  }
  return 0.0;
}

namespace detail {

// Per-coordinate stationarity solution at multiplier lambda for the
// separable regularizers (CHI2, p-th power p >= 2); relative density x_i,
// clipped at -1 where the nonnegativity constraint binds.
inline double simplex_mass_separable(const DivergenceSpec& spec, double eta,
                                     const CostVector& c, double lambda,
                                     std::vector<double>* out) {
  const std::size_t k = c.size();
  CompensatedSum mass;
  for (std::size_t i = 0; i < k; ++i) {
    const double s = lambda - c[i];
    double x;
    if (spec.kind == DivergenceKind::Chi2) {
      x = 0.5 * eta * s;
    } else {
      const double pw = spec.p;
      x = (s == 0.0) ? 0.0
                     : std::copysign(std::pow(eta * std::abs(s) / pw, 1.0 / (pw - 1.0)), s);
    }
    const double pi = std::max(0.0, spec.base[i] * (1.0 + x));
    if (out) (*out)[i] = pi;
    mass.add(pi);
  }
  return mass.value();
}

// Squared-p-norm regularizer, p in (1,2): the stationarity condition couples
// coordinates through the solution's own norm N, so we solve the scalar
// fixed point N = F(N) by bisection (F is strictly decreasing in N).
inline double simplex_mass_pnorm_sq(const DivergenceSpec& spec, double eta,
                                    const CostVector& c, double lambda,
                                    std::vector<double>* out) {
  const std::size_t k = c.size();
  const double pw = spec.p;
  const auto x_of = [&](std::size_t i, double norm) {
    const double s = lambda - c[i];
    if (s == 0.0) return 0.0;
    const double mag =
        std::pow(eta * std::abs(s) * std::pow(norm, pw - 2.0) / 2.0, 1.0 / (pw - 1.0));
    return std::max(-1.0, std::copysign(mag, s));
  };
  const auto norm_of = [&](double norm) {
    CompensatedSum s;
    for (std::size_t i = 0; i < k; ++i) {
      s.add(spec.base[i] * std::pow(std::abs(x_of(i, norm)), pw));
    }
    return std::pow(std::max(0.0, s.value()), 1.0 / pw);
  };
  bool all_zero = true;
  for (std::size_t i = 0; i < k; ++i) all_zero = all_zero && (lambda - c[i] == 0.0);
  double n_star = 0.0;
  if (!all_zero) {
    double hi = 1.0;
    while (norm_of(hi) > hi) hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      if (norm_of(mid) > mid) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    n_star = 0.5 * (lo + hi);
  }
  CompensatedSum mass;
  for (std::size_t i = 0; i < k; ++i) {
    const double pi = std::max(0.0, spec.base[i] * (1.0 + x_of(i, n_star)));
    if (out) (*out)[i] = pi;
    mass.add(pi);
  }
  return mass.value();
}

inline double simplex_mass(const DivergenceSpec& spec, double eta, const CostVector& c,
                           double lambda, std::vector<double>* out) {
  if (spec.kind == DivergenceKind::PNorm && spec.p < 2.0) {
    return simplex_mass_pnorm_sq(spec, eta, c, lambda, out);
  }
  return simplex_mass_separable(spec, eta, c, lambda, out);
}

}  // namespace detail

// argmin_{P in simplex} <P, C> + (1/eta) h(P).  KL in closed form; the other
// regularizers by bisection on the normalization multiplier with active-set
// clipping at the nonnegativity constraints.
inline ProbVector ftrl_solve(const DivergenceSpec& spec, double eta, const CostVector& c) {
  detail::check_dim(spec.base.size(), c.size(), "ftrl_solve");
  if (!(eta > 0.0)) throw std::invalid_argument("ftrl_solve: eta must be positive");
  if (spec.kind == DivergenceKind::TV) {
    throw std::invalid_argument("ftrl_solve: TV regularizer is not supported");
  }
  if (spec.kind == DivergenceKind::KL) return gibbs(spec.base, c, eta);

  // Bracket the multiplier: mass is nondecreasing in lambda.
  double span = 1.0 + c.max_abs();
  double lo = -span, hi = span;
  for (int it = 0; it < 200 && detail::simplex_mass(spec, eta, c, lo, nullptr) > 1.0; ++it) {
    lo -= span;
    span *= 2.0;
  }
  span = 1.0 + c.max_abs();
  for (int it = 0; it < 200 && detail::simplex_mass(spec, eta, c, hi, nullptr) < 1.0; ++it) {
    hi += span;
    span *= 2.0;
  }
  std::vector<double> p(c.size(), 0.0);
  double mass = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    mass = detail::simplex_mass(spec, eta, c, mid, &p);
    if (std::abs(mass - 1.0) <= 1e-13) break;
    if (mid == lo || mid == hi) break;  // interval exhausted at double precision
    if (mass < 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (std::abs(mass - 1.0) > 1e-10) {
    throw std::runtime_error("ftrl_solve: bisection did not converge, |mass-1| = " +
                             std::to_string(std::abs(mass - 1.0)));
  }
  return normalized(std::move(p));
}

inline ProbVector optftrl_solve(const DivergenceSpec& spec, double eta,
                                const CostVector& c, const CostVector& g) {
  detail::check_dim(c.size(), g.size(), "optftrl_solve");
  std::vector<double> shifted(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) shifted[i] = c[i] + g[i];
  return ftrl_solve(spec, eta, CostVector(std::move(shifted)));
}

// State of one online learner; step operations return a new value.
struct OnlineLearnerState {
  LearnerKind kind = LearnerKind::Ewa;
  double eta = 1.0;
  std::optional<DivergenceSpec> spec;  // FTRL kinds
  ProbVector prior;
  CostVector accumulated;   // C_{t-1}, FTRL kinds
  ProbVector aux;           // auxiliary distribution, OPT2EWA
  ProbVector current;       // EWA's next play
  std::size_t round = 0;
};

inline OnlineLearnerState make_ewa(double eta, ProbVector prior) {
  if (!(eta > 0.0)) throw std::invalid_argument("make_ewa: eta must be positive");
  if (!prior.full_support()) throw std::invalid_argument("make_ewa: prior needs full support");
  OnlineLearnerState s;
  s.kind = LearnerKind::Ewa;
  s.eta = eta;
  s.prior = prior;
  s.current = std::move(prior);
  return s;
}

inline OnlineLearnerState make_opt2ewa(double eta, ProbVector prior) {
  if (!(eta > 0.0) || eta > 0.5) {
    throw std::invalid_argument("make_opt2ewa: requires 0 < eta <= 1/2");
  }
  if (!prior.full_support()) {
    throw std::invalid_argument("make_opt2ewa: prior needs full support");
  }
  OnlineLearnerState s;
  s.kind = LearnerKind::Opt2Ewa;
  s.eta = eta;
  s.prior = prior;
  s.aux = std::move(prior);
  return s;
}

inline OnlineLearnerState make_ftrl(LearnerKind kind, double eta, DivergenceSpec spec) {
  if (kind != LearnerKind::Ftrl && kind != LearnerKind::OptFtrl) {
    throw std::invalid_argument("make_ftrl: kind must be FTRL or OPTFTRL");
  }
  if (!(eta > 0.0)) throw std::invalid_argument("make_ftrl: eta must be positive");
  OnlineLearnerState s;
  s.kind = kind;
  s.eta = eta;
  s.prior = spec.base;
  s.accumulated = CostVector::zeros(spec.base.size());
  s.spec = std::move(spec);
  return s;
}

inline OnlineLearnerState ewa_step(OnlineLearnerState state, const CostVector& c) {
  if (state.kind != LearnerKind::Ewa) throw std::invalid_argument("ewa_step: wrong kind");
  state.current = gibbs(state.current, c, state.eta);
  ++state.round;
  return state;
}

inline OnlineLearnerState opt2ewa_step(OnlineLearnerState state, const CostVector& c,
                                       const CostVector& g, const CostVector& g_next) {
  if (state.kind != LearnerKind::Opt2Ewa) {
    throw std::invalid_argument("opt2ewa_step: wrong kind");
  }
  if (state.eta > 0.5) throw std::invalid_argument("opt2ewa_step: requires eta <= 1/2");
  detail::check_dim(c.size(), g.size(), "opt2ewa_step");
  // Auxiliary exponent -eta c - eta^2 (c-g)^2 folded into a surrogate cost.
  std::vector<double> surrogate(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double gap = c[i] - g[i];
    surrogate[i] = c[i] + state.eta * gap * gap;
  }
  state.aux = gibbs(state.aux, CostVector(std::move(surrogate)), state.eta);
  state.current = gibbs(state.aux, g_next, state.eta);
  ++state.round;
  return state;
}

// Played distribution for the current round, given this round's hint.
inline ProbVector learner_predict(const OnlineLearnerState& state, const CostVector& hint) {
  switch (state.kind) {
    case LearnerKind::Ewa:
      return state.current;
    case LearnerKind::Opt2Ewa:
      return gibbs(state.aux, hint, state.eta);
    case LearnerKind::Ftrl:
      return ftrl_solve(*state.spec, state.eta, state.accumulated);
    case LearnerKind::OptFtrl:
      return optftrl_solve(*state.spec, state.eta, state.accumulated, hint);
  }
  throw std::invalid_argument("learner_predict: unknown kind");
}

// Consume the revealed cost (and the hints involved, for OPT2EWA).
inline OnlineLearnerState learner_observe(OnlineLearnerState state, const CostVector& c,
                                          const CostVector& hint,
                                          const CostVector& next_hint) {
  switch (state.kind) {
    case LearnerKind::Ewa:
      return ewa_step(std::move(state), c);
    case LearnerKind::Opt2Ewa:
      return opt2ewa_step(std::move(state), c, hint, next_hint);
    case LearnerKind::Ftrl:
    case LearnerKind::OptFtrl: {
      for (std::size_t i = 0; i < c.size(); ++i) state.accumulated.v[i] += c[i];
      ++state.round;
      return state;
    }
  }
  throw std::invalid_argument("learner_observe: unknown kind");
}

// regret = sum_t <P_t - P*, c_t>.
inline double regret(const std::vector<ProbVector>& predictions,
                     const std::vector<CostVector>& costs, const ProbVector& comparator) {
  if (predictions.size() != costs.size()) {
    throw std::invalid_argument("regret: length mismatch");
  }
  CompensatedSum s;
  for (std::size_t t = 0; t < costs.size(); ++t) {
    s.add(inner(predictions[t], costs[t]) - inner(comparator, costs[t]));
  }
  return s.value();
}

struct RegretBoundParams {
  LearnerKind kind = LearnerKind::Ewa;
  double eta = 1.0;
  std::optional<DivergenceSpec> spec;  // FTRL kinds
  ProbVector prior;                    // P_1 (or the auxiliary prior for OPT2EWA)
};

// Right-hand side of the matching pathwise regret bound evaluated on the
// realized cost/hint sequence.
inline double regret_bound_rhs(const RegretBoundParams& params,
                               const std::vector<CostVector>& costs,
                               const std::vector<CostVector>& hints,
                               const ProbVector& comparator) {
  if (!hints.empty() && hints.size() != costs.size()) {
    throw std::invalid_argument("regret_bound_rhs: hint/cost length mismatch");
  }
  const double eta = params.eta;
  const auto hint_at = [&](std::size_t t) -> CostVector {
    if (hints.empty()) {
      return CostVector::zeros(costs.empty() ? params.prior.size() : costs[t].size());
    }
    return hints[t];
  };
  switch (params.kind) {
    case LearnerKind::Ewa: {
      CompensatedSum s;
      for (const CostVector& c : costs) {
        const double m = c.max_abs();
        s.add(m * m);
      }
      return kl(comparator, params.prior) / eta + 0.5 * eta * s.value();
    }
    case LearnerKind::Opt2Ewa: {
      CompensatedSum s;
      for (std::size_t t = 0; t < costs.size(); ++t) {
        const CostVector g = hint_at(t);
        for (std::size_t i = 0; i < costs[t].size(); ++i) {
          const double gap = costs[t][i] - g[i];
          s.add(comparator[i] * gap * gap);
        }
      }
      return kl(comparator, params.prior) / eta + eta * s.value();
    }
    case LearnerKind::Ftrl:
    case LearnerKind::OptFtrl: {
      if (!params.spec) throw std::invalid_argument("regret_bound_rhs: missing spec");
      const DivergenceSpec& spec = *params.spec;
      const bool optimistic = params.kind == LearnerKind::OptFtrl;
      const double div_term =
          (regularizer_value(spec, comparator) - regularizer_value(spec, spec.base)) / eta;
      if (std::isinf(div_term)) return kInf;
      CompensatedSum s;
      const bool uniform_regime = spec.kind == DivergenceKind::PNorm && spec.p > 2.0;
      const double q =
          spec.kind == DivergenceKind::PNorm ? spec.p / (spec.p - 1.0) : 2.0;
      for (std::size_t t = 0; t < costs.size(); ++t) {
        CostVector gap = costs[t];
        if (optimistic) {
          const CostVector g = hint_at(t);
          for (std::size_t i = 0; i < gap.size(); ++i) gap.v[i] -= g[i];
        }
        const double nrm = spec_dual_norm(spec, gap);
        s.add(uniform_regime ? std::pow(nrm, q) : nrm * nrm);
      }
      if (uniform_regime) {
        return div_term + std::pow(0.5 * eta, q - 1.0) / q * s.value();
      }
      const double alpha = strong_convexity_modulus(spec);
      return div_term + eta / (2.0 * alpha) * s.value();
    }
  }
  throw std::invalid_argument("regret_bound_rhs: unknown kind");
}

}  // namespace genlab
