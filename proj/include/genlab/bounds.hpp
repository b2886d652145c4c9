#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "genlab/game.hpp"
#include "genlab/learners.hpp"
#include "genlab/measures.hpp"
#include "genlab/rng.hpp"
#include "genlab/transport.hpp"

namespace genlab {

// Evaluated right-hand side of a named generalization bound.  `terms` are
// additive (the certificate value is their sum); `info` records non-additive
// metadata such as grid sizes and Monte-Carlo standard errors.
struct BoundCertificate {
  std::string bound_id;
  std::vector<std::pair<std::string, double>> terms;
  std::vector<std::pair<std::string, double>> info;
  bool valid = true;

  void term(std::string name, double v) { terms.emplace_back(std::move(name), v); }
  void note(std::string name, double v) { info.emplace_back(std::move(name), v); }

  double value() const {
    CompensatedSum s;
    for (const auto& [name, v] : terms) {
      if (std::isinf(v)) return kInf;
      s.add(v);
    }
    return s.value();
  }

  // Invalid certificates count as vacuous in coverage accounting.
  double coverage_value() const { return valid ? value() : kInf; }
};

namespace detail {

inline bool losses_in_unit_range(const Environment& env) {
  return env.loss_lo >= 0.0 && env.loss_hi <= 1.0;
}

// sup_w E[l(w,Z')^r], exact finite sum.
inline double sup_loss_moment(const Environment& env, double r) {
  double sup = 0.0;
  for (std::size_t w = 0; w < env.k(); ++w) {
    CompensatedSum s;
    for (std::size_t z = 0; z < env.m(); ++z) {
      s.add(env.z_probs[z] * std::pow(env.loss(w, z), r));
    }
    sup = std::max(sup, s.value());
  }
  return sup;
}

inline double log_log_grid_term(std::size_t n, double eps, double delta) {
  return std::log(std::log(4.0 * std::sqrt(static_cast<double>(n)))) +
         std::log(1.0 / delta) + std::log(2.0 / eps);
}

}  // namespace detail

enum class EwaBoundVariant { Vanilla, Tuned, ParamFree };

// PAC-Bayes-style certificates built on exponential-weights regret bounds.
// VANILLA: KL/(eta n) + (eta/2n) sum ||l(.,Z_t) - E l||_inf^2 + sqrt(s^2 log(1/d)/(2n)).
// TUNED:   (1+e^2/2) sqrt(KL/2n) + sqrt((loglog(4 sqrt n) + log(1/d) + log(2/e))/(2n)).
// PARAMFREE: sqrt((3 KL + 9)/n) + sqrt(log(1/d)/(2n)).
inline BoundCertificate cert_ewa_family(EwaBoundVariant variant, const ProbVector& post,
                                        const ProbVector& prior, const Environment& env,
                                        const std::vector<std::size_t>& sample,
                                        double eta_or_eps, double delta, double sigma) {
  const std::size_t n = sample.size();
  if (n == 0) throw std::invalid_argument("cert_ewa_family: empty sample");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("cert_ewa_family: delta must be in (0,1)");
  }
  const double dn = static_cast<double>(n);
  const double d_kl = kl(post, prior);
  BoundCertificate cert;
  switch (variant) {
    case EwaBoundVariant::Vanilla: {
      cert.bound_id = "VANILLA";
      const double eta = eta_or_eps;
      if (!(eta > 0.0)) {
        cert.valid = false;
        cert.note("eta", eta);
        return cert;
      }
      if (detail::sup_loss_moment(env, 2.0) > sigma * sigma + 1e-12) cert.valid = false;
      CompensatedSum gap2;
      const CostVector risks = risk_vector(env);
      for (std::size_t z : sample) {
        double m = 0.0;
        for (std::size_t w = 0; w < env.k(); ++w) {
          m = std::max(m, std::abs(env.loss(w, z) - risks[w]));
        }
        gap2.add(m * m);
      }
      cert.term("divergence", d_kl / (eta * dn));
      cert.term("second_order", eta / (2.0 * dn) * gap2.value());
      cert.term("martingale", std::sqrt(sigma * sigma * std::log(1.0 / delta) / (2.0 * dn)));
      cert.note("eta", eta);
      cert.note("sigma", sigma);
      return cert;
    }
    case EwaBoundVariant::Tuned: {
      cert.bound_id = "TUNED";
      const double eps = eta_or_eps;
      if (!(eps > 0.0 && eps <= 1.0) || n <= 1 || !detail::losses_in_unit_range(env)) {
        cert.valid = false;
        cert.note("epsilon", eps);
        return cert;
      }
      cert.term("divergence", (1.0 + eps * eps / 2.0) * std::sqrt(d_kl / (2.0 * dn)));
      cert.term("martingale",
                std::sqrt(detail::log_log_grid_term(n, eps, delta) / (2.0 * dn)));
      // Underlying union-bound grid: eta in {a^i} intersected with [2/sqrt n, 8].
      const double a = 1.0 + eps;
      const double lo = 2.0 / std::sqrt(dn);
      double grid_size = 0.0;
      for (double g = 1.0; g <= 8.0; g *= a) {
        if (g >= lo) grid_size += 1.0;
      }
      cert.note("epsilon", eps);
      cert.note("grid_base_a", a);
      cert.note("grid_lo", lo);
      cert.note("grid_hi", 8.0);
      cert.note("grid_size_N", grid_size);
      return cert;
    }
    case EwaBoundVariant::ParamFree: {
      cert.bound_id = "PARAMFREE";
      if (!detail::losses_in_unit_range(env)) {
        cert.valid = false;
        return cert;
      }
      cert.term("divergence", std::isinf(d_kl) ? kInf : std::sqrt((3.0 * d_kl + 9.0) / dn));
      cert.term("martingale", std::sqrt(std::log(1.0 / delta) / (2.0 * dn)));
      return cert;
    }
  }
  throw std::invalid_argument("cert_ewa_family: unknown variant");
}

enum class SecondOrderForm { Moment, Relaxed };

// Data-dependent certificates from the optimistic second-order update.
// MOMENT (eta in (0, 1/4], bounds gen):
//   KL/(eta n) + (3 eta/n) sum <post, l(.,Z_t)^2> + log(1/d)/(eta n).
// RELAXED (eta in (0, 1/2], bounds the conditional test risk):
//   train/(1-eta) + KL/(eta n) + log(1/d)/(2 eta n).
inline BoundCertificate cert_second_order(SecondOrderForm form, const ProbVector& post,
                                          const ProbVector& prior_tilde,
                                          const Environment& env,
                                          const std::vector<std::size_t>& sample,
                                          double eta, double delta) {
  const std::size_t n = sample.size();
  if (n == 0) throw std::invalid_argument("cert_second_order: empty sample");
  const double dn = static_cast<double>(n);
  const double d_kl = kl(post, prior_tilde);
  BoundCertificate cert;
  cert.note("eta", eta);
  if (!detail::losses_in_unit_range(env)) cert.valid = false;
  switch (form) {
    case SecondOrderForm::Moment: {
      cert.bound_id = "SECOND_ORDER_MOMENT";
      if (!(eta > 0.0 && eta <= 0.25)) {
        cert.valid = false;
        return cert;
      }
      CompensatedSum second;
      for (std::size_t z : sample) {
        for (std::size_t w = 0; w < env.k(); ++w) {
          const double l = env.loss(w, z);
          second.add(post[w] * l * l);
        }
      }
      cert.term("divergence", d_kl / (eta * dn));
      cert.term("second_moment", 3.0 * eta / dn * second.value());
      cert.term("martingale", std::log(1.0 / delta) / (eta * dn));
      return cert;
    }
    case SecondOrderForm::Relaxed: {
      cert.bound_id = "SECOND_ORDER_RELAXED";
      if (!(eta > 0.0 && eta <= 0.5)) {
        cert.valid = false;
        return cert;
      }
      const CostVector totals = cumulative_loss(env, sample);
      CompensatedSum train;
      for (std::size_t w = 0; w < env.k(); ++w) train.add(post[w] * totals[w] / dn);
      cert.term("train", train.value() / (1.0 - eta));
      cert.term("divergence", d_kl / (eta * dn));
      cert.term("martingale", std::log(1.0 / delta) / (2.0 * eta * dn));
      cert.note("bounds_conditional_test_risk", 1.0);
      return cert;
    }
  }
  throw std::invalid_argument("cert_second_order: unknown form");
}

enum class FtrlBoundVariant { Plain, Tuned, Optimistic, PNormA, PNormB };

// Certificates built on the FTRL regret bounds for strongly or p-uniformly
// convex regularizers.
inline BoundCertificate cert_ftrl_family(FtrlBoundVariant variant,
                                         const DivergenceSpec& spec,
                                         const ProbVector& post, const Environment& env,
                                         const std::vector<std::size_t>& sample,
                                         double eta_or_eps, double delta,
                                         double sigma_or_b) {
  const std::size_t n = sample.size();
  if (n == 0) throw std::invalid_argument("cert_ftrl_family: empty sample");
  const double dn = static_cast<double>(n);
  BoundCertificate cert;
  const double h_gap =
      regularizer_value(spec, post) - regularizer_value(spec, spec.base);

  const auto dual_of_losses = [&](bool subtract_risk, double power) {
    const CostVector risks = risk_vector(env);
    CompensatedSum s;
    for (std::size_t z : sample) {
      std::vector<double> f(env.k());
      for (std::size_t w = 0; w < env.k(); ++w) {
        f[w] = env.loss(w, z) - (subtract_risk ? risks[w] : 0.0);
      }
      s.add(std::pow(spec_dual_norm(spec, CostVector(std::move(f))), power));
    }
    return s.value();
  };

  switch (variant) {
    case FtrlBoundVariant::Plain:
    case FtrlBoundVariant::Optimistic: {
      const bool optimistic = variant == FtrlBoundVariant::Optimistic;
      cert.bound_id = optimistic ? "FTRL_OPTIMISTIC" : "FTRL_PLAIN";
      const double eta = eta_or_eps;
      const double sigma = sigma_or_b;
      const double alpha = strong_convexity_modulus(spec);  // rejects p > 2
      if (!(eta > 0.0)) {
        cert.valid = false;
        return cert;
      }
      if (detail::sup_loss_moment(env, 2.0) > sigma * sigma + 1e-12) cert.valid = false;
      cert.term("divergence", h_gap / (eta * dn));
      cert.term("second_order",
                eta / (2.0 * alpha * dn) * dual_of_losses(!optimistic, 2.0));
      cert.term("martingale",
                optimistic
                    ? std::sqrt(sigma * sigma * std::log(1.0 / delta) / dn)
                    : std::sqrt(sigma * sigma * std::log(1.0 / delta) / (2.0 * dn)));
      cert.note("eta", eta);
      cert.note("alpha", alpha);
      return cert;
    }
    case FtrlBoundVariant::Tuned: {
      cert.bound_id = "FTRL_TUNED";
      const double eps = eta_or_eps;
      const double b = sigma_or_b;
      const double alpha = strong_convexity_modulus(spec);
      if (!(eps > 0.0 && eps <= 1.0) || n <= 1 || !detail::losses_in_unit_range(env)) {
        cert.valid = false;
        return cert;
      }
      // The theorem assumes ||l(.,Z_t) - E l||_* <= B; verify on the sample.
      const CostVector risks = risk_vector(env);
      for (std::size_t z : sample) {
        std::vector<double> f(env.k());
        for (std::size_t w = 0; w < env.k(); ++w) f[w] = env.loss(w, z) - risks[w];
        if (spec_dual_norm(spec, CostVector(std::move(f))) > b + 1e-12) {
          cert.valid = false;
          break;
        }
      }
      cert.term("divergence",
                (1.0 + eps * eps / 2.0) *
                    std::sqrt(b * b * std::max(0.0, h_gap) / (2.0 * alpha * dn)));
      cert.term("martingale",
                std::sqrt(detail::log_log_grid_term(n, eps, delta) / (2.0 * dn)));
      cert.note("epsilon", eps);
      cert.note("alpha", alpha);
      cert.note("B", b);
      return cert;
    }
    case FtrlBoundVariant::PNormA: {
      cert.bound_id = "PNORM_A";
      const double eta = eta_or_eps;
      const double b = sigma_or_b;
      if (spec.kind != DivergenceKind::PNorm || spec.p > 2.0) {
        throw std::invalid_argument("cert_ftrl_family: PNORM_A requires p in (1,2]");
      }
      if (!(eta > 0.0)) {
        cert.valid = false;
        return cert;
      }
      if (detail::sup_loss_moment(env, 2.0) > b + 1e-12) cert.valid = false;
      const double q = spec.p / (spec.p - 1.0);
      cert.term("divergence", h_gap / (eta * dn));
      cert.term("second_order", eta / ((spec.p - 1.0) * dn) * dual_of_losses(false, 2.0));
      cert.term("martingale", std::sqrt(b * b * std::log(1.0 / delta) / (2.0 * dn)));
      cert.note("eta", eta);
      cert.note("q", q);
      cert.note("B", b);
      return cert;
    }
    case FtrlBoundVariant::PNormB: {
      cert.bound_id = "PNORM_B";
      const double eta = eta_or_eps;
      const double b = sigma_or_b;
      if (spec.kind != DivergenceKind::PNorm || spec.p < 2.0) {
        throw std::invalid_argument("cert_ftrl_family: PNORM_B requires p >= 2");
      }
      if (!(eta > 0.0)) {
        cert.valid = false;
        return cert;
      }
      const double q = spec.p / (spec.p - 1.0);
      if (detail::sup_loss_moment(env, q) > b + 1e-12) cert.valid = false;
      cert.term("divergence", h_gap / (eta * dn));
      cert.term("second_order", std::pow(eta, q - 1.0) /
                                    (std::pow(2.0, q - 1.0) * q * dn) *
                                    dual_of_losses(false, q));
      cert.term("martingale",
                b * std::pow(std::log(1.0 / delta) / dn, 1.0 - 1.0 / q));
      cert.note("eta", eta);
      cert.note("q", q);
      cert.note("B", b);
      return cert;
    }
  }
  throw std::invalid_argument("cert_ftrl_family: unknown variant");
}

enum class SmoothedBoundVariant { Plain, SmoothPb, Wasserstein };

struct SmoothedMcParams {
  std::size_t n_samples = 100000;
  std::uint64_t seed = 0;
};

// Certificates for point-cloud posteriors on R^d, using the Gaussian-smoothed
// relative entropy (Monte-Carlo) or the exact squared Wasserstein-2 distance.
inline BoundCertificate cert_smoothed_family(SmoothedBoundVariant variant,
                                             const PointCloudMeasure& post,
                                             const PointCloudMeasure& prior, double gamma,
                                             double eta, std::size_t n, double delta,
                                             double sigma, double beta,
                                             const SmoothedMcParams& mc) {
  if (n == 0) throw std::invalid_argument("cert_smoothed_family: n must be >= 1");
  const double dn = static_cast<double>(n);
  const double d = static_cast<double>(post.dim());
  BoundCertificate cert;
  cert.note("eta", eta);
  cert.note("beta", beta);
  if (!(eta > 0.0)) {
    cert.valid = false;
    return cert;
  }
  switch (variant) {
    case SmoothedBoundVariant::Plain:
    case SmoothedBoundVariant::SmoothPb: {
      const bool pb = variant == SmoothedBoundVariant::SmoothPb;
      cert.bound_id = pb ? "SMOOTH_PB" : "SMOOTHED_PLAIN";
      cert.note("gamma", gamma);
      if (!(gamma > 0.0) || gamma * std::sqrt(d) >= 1.0) {
        cert.valid = false;
        return cert;
      }
      const SmoothedEstimate dg = smoothed_kl_mc(post, prior, gamma, mc.n_samples, mc.seed);
      cert.term("divergence", std::max(0.0, dg.value) / (eta * dn));
      if (pb) {
        cert.term("smoothness", eta * beta / (1.0 - gamma * std::sqrt(d)));
      } else {
        const double series = smoothing_series_bound(beta, gamma, post.dim());
        cert.term("smoothness", eta * series * series);
        cert.note("dual_norm_series", series);
      }
      cert.term("martingale", std::sqrt(2.0 * sigma * sigma * std::log(1.0 / delta) / dn));
      cert.note("divergence_std_error", dg.std_error / (eta * dn));
      cert.note("mc_samples", static_cast<double>(dg.n_samples));
      return cert;
    }
    case SmoothedBoundVariant::Wasserstein: {
      cert.bound_id = "WASSERSTEIN";
      const double w2 = wasserstein2_sq(post, prior);
      cert.term("transport", 2.0 * d * w2 / (eta * dn));
      cert.term("smoothness", 2.0 * beta * eta);
      cert.term("martingale", std::sqrt(sigma * sigma * std::log(1.0 / delta) / dn));
      cert.note("gamma", 1.0 / (2.0 * std::sqrt(d)));
      cert.note("w2_sq", w2);
      return cert;
    }
  }
  throw std::invalid_argument("cert_smoothed_family: unknown variant");
}

// Conditional-game PAC-Bayes certificate; the prior may be any function of
// the supersample supplied by the caller.
inline BoundCertificate cert_conditional(const ProbVector& post, const ProbVector& prior,
                                         double eta, std::size_t n, double delta) {
  if (n == 0) throw std::invalid_argument("cert_conditional: n must be >= 1");
  const double dn = static_cast<double>(n);
  BoundCertificate cert;
  cert.bound_id = "CONDITIONAL";
  if (!(eta > 0.0)) {
    cert.valid = false;
    return cert;
  }
  cert.term("divergence", kl(post, prior) / (eta * dn));
  cert.term("regret_overhead", eta / 8.0);
  cert.term("martingale", std::sqrt(2.0 * std::log(1.0 / delta) / dn));
  cert.note("eta", eta);
  return cert;
}

enum class ExpectedBoundVariant { FixedPrior, MutualInfo };

// Expectation bounds evaluated on a batch of replicate transcripts.
// FIXED_PRIOR: E[KL(post || prior)]/(eta n) + eta/8; with eta unset the
// deterministic optimum eta* = sqrt(8 E[KL]/n) collapses it to
// sqrt(E[KL]/(2n)).  MUTUAL_INFO: sqrt(E[KL(post || avg post)]/(2n)) with the
// marginal estimated by the replicate-average posterior.
inline BoundCertificate cert_expected(ExpectedBoundVariant variant,
                                      const std::vector<GameTranscript>& transcripts,
                                      const ProbVector& prior, std::optional<double> eta) {
  if (transcripts.empty()) throw std::invalid_argument("cert_expected: no replicates");
  const double dn = static_cast<double>(transcripts.front().n);
  const double r_count = static_cast<double>(transcripts.size());
  BoundCertificate cert;
  switch (variant) {
    case ExpectedBoundVariant::FixedPrior: {
      cert.bound_id = "EXPECTED_FIXED_PRIOR";
      CompensatedSum s;
      for (const auto& tr : transcripts) s.add(kl(tr.posterior, prior));
      const double e_kl = s.value() / r_count;
      cert.note("expected_kl", e_kl);
      if (eta) {
        cert.term("divergence", e_kl / (*eta * dn));
        cert.term("regret_overhead", *eta / 8.0);
        cert.note("eta", *eta);
      } else {
        cert.term("optimized", std::sqrt(e_kl / (2.0 * dn)));
        cert.note("eta", std::sqrt(8.0 * e_kl / dn));
      }
      return cert;
    }
    case ExpectedBoundVariant::MutualInfo: {
      cert.bound_id = "MUTUAL_INFO";
      if (transcripts.size() < 2) {
        throw std::invalid_argument("cert_expected: MUTUAL_INFO needs >= 2 replicates");
      }
      const std::size_t k = transcripts.front().posterior.size();
      std::vector<double> avg(k, 0.0);
      for (const auto& tr : transcripts) {
        for (std::size_t i = 0; i < k; ++i) avg[i] += tr.posterior[i] / r_count;
      }
      const ProbVector marginal = normalized(std::move(avg));
      CompensatedSum s;
      for (const auto& tr : transcripts) s.add(kl(tr.posterior, marginal));
      const double mi = s.value() / r_count;
      cert.term("optimized", std::sqrt(mi / (2.0 * dn)));
      cert.note("mi_estimate", mi);
      cert.note("plug_in_estimate", 1.0);
      return cert;
    }
  }
  throw std::invalid_argument("cert_expected: unknown variant");
}

enum class ConcentrationLemma { SecondMoment, Bounded, HeavyTail };

struct ConcentrationParams {
  std::vector<double> second_moments;  // per-t sigma_t^2 (SecondMoment)
  std::vector<double> xs;              // realized X_t (Bounded)
  std::vector<double> b;               // per-t q-th moment roots B_t (HeavyTail)
  double q = 2.0;
};

// Plug-in RHS of the martingale lower-tail lemmas; bounds sum_t (mu_t - X_t).
inline double concentration_rhs(ConcentrationLemma lemma, double lambda,
                                const ConcentrationParams& params, double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw std::invalid_argument("concentration_rhs: delta must be in (0,1]");
  }
  const double log_term = std::log(1.0 / delta);
  switch (lemma) {
    case ConcentrationLemma::SecondMoment: {
      if (!(lambda > 0.0)) throw std::invalid_argument("concentration_rhs: lambda > 0 required");
      return lambda / 2.0 * csum(params.second_moments) + log_term / lambda;
    }
    case ConcentrationLemma::Bounded: {
      if (!(lambda > 0.0 && lambda <= 0.5)) {
        throw std::invalid_argument("concentration_rhs: lambda must be in (0, 1/2]");
      }
      CompensatedSum s;
      for (double x : params.xs) s.add(x * x);
      return lambda * s.value() + log_term / lambda;
    }
    case ConcentrationLemma::HeavyTail: {
      if (!(lambda > 0.0)) throw std::invalid_argument("concentration_rhs: lambda > 0 required");
      if (!(params.q > 1.0 && params.q <= 2.0)) {
        throw std::invalid_argument("concentration_rhs: q must be in (1,2]");
      }
      CompensatedSum s;
      for (double bt : params.b) s.add(std::pow(bt, params.q));
      return std::pow(lambda, params.q - 1.0) * s.value() + log_term / lambda;
    }
  }
  throw std::invalid_argument("concentration_rhs: unknown lemma");
}

struct CoverageRow {
  std::uint64_t seed = 0;
  double realized = 0.0;
  double certificate = 0.0;
  bool violated = false;
};

struct CoverageReport {
  std::string bound_id;
  std::size_t trials = 0;
  std::size_t violations = 0;
  double empirical_rate = 0.0;
  double delta = 0.0;
  double binomial_3sigma = 0.0;  // delta + 3 sqrt(delta (1-delta)/trials)
};

struct CoverageOutcome {
  CoverageReport report;
  std::vector<CoverageRow> rows;
};

inline CoverageOutcome make_coverage_outcome(std::string bound_id,
                                             std::vector<CoverageRow> rows, double delta) {
  CoverageOutcome out;
  out.report.bound_id = std::move(bound_id);
  out.report.trials = rows.size();
  for (const auto& r : rows) out.report.violations += r.violated ? 1 : 0;
  out.report.empirical_rate =
      rows.empty() ? 0.0
                   : static_cast<double>(out.report.violations) /
                         static_cast<double>(rows.size());
  out.report.delta = delta;
  out.report.binomial_3sigma =
      delta + 3.0 * std::sqrt(delta * (1.0 - delta) /
                              std::max<std::size_t>(1, rows.size()));
  out.rows = std::move(rows);
  return out;
}

enum class GameBoundId {
  Vanilla,
  Tuned,
  ParamFree,
  SecondOrderMoment,
  SecondOrderRelaxed,
  FtrlChi2,
  PNormA,
  PNormB,
  Conditional,
};

inline std::string game_bound_name(GameBoundId id) {
  switch (id) {
    case GameBoundId::Vanilla: return "VANILLA";
    case GameBoundId::Tuned: return "TUNED";
    case GameBoundId::ParamFree: return "PARAMFREE";
    case GameBoundId::SecondOrderMoment: return "SECOND_ORDER_MOMENT";
    case GameBoundId::SecondOrderRelaxed: return "SECOND_ORDER_RELAXED";
    case GameBoundId::FtrlChi2: return "FTRL_CHI2";
    case GameBoundId::PNormA: return "PNORM_A";
    case GameBoundId::PNormB: return "PNORM_B";
    case GameBoundId::Conditional: return "CONDITIONAL";
  }
  return "?";
}

inline std::optional<GameBoundId> game_bound_from_name(const std::string& name) {
  for (GameBoundId id :
       {GameBoundId::Vanilla, GameBoundId::Tuned, GameBoundId::ParamFree,
        GameBoundId::SecondOrderMoment, GameBoundId::SecondOrderRelaxed,
        GameBoundId::FtrlChi2, GameBoundId::PNormA, GameBoundId::PNormB,
        GameBoundId::Conditional}) {
    if (game_bound_name(id) == name) return id;
  }
  return std::nullopt;
}

struct GameBoundEval {
  BoundCertificate cert;
  double realized = 0.0;  // gen, or conditional test risk for RELAXED
};

// One generalization-bound trial: draw the sample, form the statistical
// learner's posterior, evaluate the certificate, and record the realized
// quantity the bound claims to dominate.
inline GameBoundEval evaluate_game_bound(GameBoundId id, const Environment& env,
                                         const StatLearnerSpec& stat, std::size_t n,
                                         double delta, std::uint64_t seed) {
  const ProbVector uniform_prior = ProbVector::uniform(env.k());
  const double dn = static_cast<double>(n);
  const double eta_sqrt = 1.0 / std::sqrt(dn);
  GameBoundEval out;

  if (id == GameBoundId::Conditional) {
    CounterRng srng(derive_stream(seed, "supersample"));
    std::vector<std::size_t> supersample;
    supersample.reserve(2 * n);
    for (std::size_t t = 0; t < 2 * n; ++t) {
      supersample.push_back(detail::draw_instance(env, srng));
    }
    CounterRng frng(derive_stream(seed, "flips"));
    std::vector<std::size_t> sample;
    sample.reserve(n);
    for (std::size_t t = 0; t < n; ++t) {
      const bool heads = frng.bits() & 1;
      sample.push_back(supersample[2 * t + (heads ? 0 : 1)]);
    }
    const ProbVector post = posterior(stat, env, sample);
    // Supersample-dependent prior: Gibbs weights on the full supersample.
    const ProbVector prior =
        gibbs(uniform_prior, cumulative_loss(env, supersample), 0.5 / dn);
    out.cert = cert_conditional(post, prior, std::min(1.0, eta_sqrt), n, delta);
    const CostVector totals = cumulative_loss(env, sample);
    CompensatedSum train;
    for (std::size_t w = 0; w < env.k(); ++w) train.add(post[w] * totals[w] / dn);
    out.realized = inner(post, risk_vector(env)) - train.value();
    return out;
  }

  CounterRng rng(derive_stream(seed, "sample"));
  std::vector<std::size_t> sample;
  sample.reserve(n);
  for (std::size_t t = 0; t < n; ++t) sample.push_back(detail::draw_instance(env, rng));
  const ProbVector post = posterior(stat, env, sample);

  const CostVector totals = cumulative_loss(env, sample);
  CompensatedSum train;
  for (std::size_t w = 0; w < env.k(); ++w) train.add(post[w] * totals[w] / dn);
  const double test_risk = inner(post, risk_vector(env));
  out.realized = test_risk - train.value();

  BoundCertificate cert;
  switch (id) {
    case GameBoundId::Vanilla:
      cert = cert_ewa_family(EwaBoundVariant::Vanilla, post, uniform_prior, env, sample,
                             eta_sqrt, delta, 1.0);
      break;
    case GameBoundId::Tuned:
      cert = cert_ewa_family(EwaBoundVariant::Tuned, post, uniform_prior, env, sample, 1.0,
                             delta, 1.0);
      break;
    case GameBoundId::ParamFree:
      cert = cert_ewa_family(EwaBoundVariant::ParamFree, post, uniform_prior, env, sample,
                             0.0, delta, 1.0);
      break;
    case GameBoundId::SecondOrderMoment:
      cert = cert_second_order(SecondOrderForm::Moment, post, uniform_prior, env, sample,
                               std::min(0.25, eta_sqrt), delta);
      break;
    case GameBoundId::SecondOrderRelaxed:
      cert = cert_second_order(SecondOrderForm::Relaxed, post, uniform_prior, env, sample,
                               std::min(0.5, eta_sqrt), delta);
      out.realized = test_risk;  // RELAXED bounds the conditional test risk
      break;
    case GameBoundId::FtrlChi2:
      cert = cert_ftrl_family(FtrlBoundVariant::Plain, DivergenceSpec::chi2(uniform_prior),
                              post, env, sample, eta_sqrt, delta, 1.0);
      break;
    case GameBoundId::PNormA:
      cert = cert_ftrl_family(FtrlBoundVariant::PNormA,
                              DivergenceSpec::pnorm(uniform_prior, 1.5), post, env, sample,
                              eta_sqrt, delta, 1.0);
      break;
    case GameBoundId::PNormB:
      cert = cert_ftrl_family(FtrlBoundVariant::PNormB,
                              DivergenceSpec::pnorm(uniform_prior, 3.0), post, env, sample,
                              eta_sqrt, delta, 1.0);
      break;
    case GameBoundId::Conditional:
      break;  // handled above
  }
  out.cert = std::move(cert);
  out.cert.bound_id = game_bound_name(id);
  return out;
}

inline CoverageRow coverage_trial(GameBoundId id, const Environment& env,
                                  const StatLearnerSpec& stat, std::size_t n,
                                  double delta, std::uint64_t seed) {
  const GameBoundEval eval = evaluate_game_bound(id, env, stat, n, delta, seed);
  CoverageRow row;
  row.seed = seed;
  row.realized = eval.realized;
  row.certificate = eval.cert.coverage_value();
  row.violated = row.realized > row.certificate;
  return row;
}

inline CoverageOutcome coverage_bounds(GameBoundId id, const Environment& env,
                                       const StatLearnerSpec& stat, std::size_t n,
                                       std::size_t r_count, double delta,
                                       std::uint64_t base_seed, std::size_t jobs = 1) {
  auto rows = parallel_map<CoverageRow>(r_count, jobs, [&](std::size_t r) {
    return coverage_trial(id, env, stat, n, delta,
                          derive_stream(base_seed, static_cast<std::uint64_t>(r)));
  });
  return make_coverage_outcome(game_bound_name(id), std::move(rows), delta);
}

// One coverage trial of a concentration lemma: simulate the X_t sequence,
// compare the realized lower-tail deviation to the lemma RHS.
inline CoverageRow concentration_trial(ConcentrationLemma lemma, double lambda,
                                       std::size_t n, double delta, std::uint64_t seed) {
  CounterRng rng(derive_stream(seed, "concentration"));
  CoverageRow row;
  row.seed = seed;
  ConcentrationParams params;
  CompensatedSum deviation;  // sum_t (mu_t - X_t)
  switch (lemma) {
    case ConcentrationLemma::SecondMoment: {
      // X_t = E^2 with E standard exponential: mu = 2, E[X^2] = 24.
      params.second_moments.assign(n, 24.0);
      for (std::size_t t = 0; t < n; ++t) {
        const double e = -std::log(rng.uniform_pos());
        deviation.add(2.0 - e * e);
      }
      break;
    }
    case ConcentrationLemma::Bounded: {
      // X_t uniform on [0,1]: mu = 1/2.
      params.xs.resize(n);
      for (std::size_t t = 0; t < n; ++t) {
        params.xs[t] = rng.uniform();
        deviation.add(0.5 - params.xs[t]);
      }
      break;
    }
    case ConcentrationLemma::HeavyTail: {
      // X_t Pareto(alpha = 2.5, x_m = 1): mu = 5/3, E[X^q] = alpha/(alpha-q).
      const double alpha = 2.5;
      params.q = 1.5;
      params.b.assign(n, std::pow(alpha / (alpha - params.q), 1.0 / params.q));
      for (std::size_t t = 0; t < n; ++t) {
        const double x = std::pow(rng.uniform_pos(), -1.0 / alpha);
        deviation.add(alpha / (alpha - 1.0) - x);
      }
      break;
    }
  }
  row.realized = deviation.value();
  row.certificate = concentration_rhs(lemma, lambda, params, delta);
  row.violated = row.realized > row.certificate;
  return row;
}

inline CoverageOutcome coverage_concentration(ConcentrationLemma lemma, double lambda,
                                              std::size_t n, std::size_t r_count,
                                              double delta, std::uint64_t base_seed,
                                              std::size_t jobs = 1) {
  auto rows = parallel_map<CoverageRow>(r_count, jobs, [&](std::size_t r) {
    return concentration_trial(lemma, lambda, n, delta,
                               derive_stream(base_seed, static_cast<std::uint64_t>(r)));
  });
  std::string name;
  switch (lemma) {
    case ConcentrationLemma::SecondMoment: name = "LEMMA_SECOND_MOMENT"; break;
    case ConcentrationLemma::Bounded: name = "LEMMA_BOUNDED"; break;
    case ConcentrationLemma::HeavyTail: name = "LEMMA_HEAVY_TAIL"; break;
  }
  return make_coverage_outcome(std::move(name), std::move(rows), delta);
}

}  // namespace genlab
