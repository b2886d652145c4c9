// End-to-end acceptance checks.  Each criterion prints exactly one PASS/FAIL
// line; the process exit code is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "genlab/battery.hpp"
#include "genlab/bounds.hpp"
#include "genlab/config.hpp"
#include "genlab/game.hpp"
#include "genlab/learners.hpp"
#include "genlab/measures.hpp"
#include "genlab/rng.hpp"
#include "genlab/runner.hpp"
#include "genlab/transport.hpp"
#include "oracles.hpp"

using namespace genlab;

namespace {

constexpr std::size_t kJobs = 8;

struct Criterion {
  int index;
  std::string name;
  bool pass = true;
  std::string detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

int g_failures = 0;

template <typename Fn>
void run_criterion(int index, const std::string& name, double budget_seconds, Fn body) {
  Criterion c;
  c.index = index;
  c.name = name;
  c.budget_seconds = budget_seconds;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.pass = false;
    c.detail = std::string("exception: ") + e.what();
  }
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (c.seconds > c.budget_seconds) {
    c.pass = false;
    c.detail += (c.detail.empty() ? "" : "; ") + std::string("over time budget");
  }
  if (!c.pass) ++g_failures;
  std::printf("%s [%2d] %s: %s (%.1fs / %.0fs budget)\n", c.pass ? "PASS" : "FAIL",
              c.index, c.name.c_str(), c.detail.c_str(), c.seconds, c.budget_seconds);
  std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return std::string(buf);
}

// ---------------------------------------------------------------------------

void criterion_identity(Criterion& c) {
  struct Out {
    double residual = 0.0;
  };
  const std::size_t configs = 126;
  auto outs = parallel_map<Out>(configs, kJobs, [&](std::size_t i) {
    CounterRng rng(derive_stream(1001, static_cast<std::uint64_t>(i)));
    const std::size_t which = i % kLearnerBatterySize;
    const std::size_t stat_kind = (i / kLearnerBatterySize) % 3;
    const Environment env = random_environment(rng, 2, 16, 2, 16);
    RunSpec spec;
    spec.env = env;
    spec.learner = make_battery_learner(which, rng.uniform(0.05, 0.5), env.k());
    spec.stat = make_battery_stat(stat_kind, rng, env.k());
    // Cover the full horizon range, pinning both endpoints.
    spec.n = i == 0 ? 1 : (i == 1 ? 200 : rng.index(1, 200));
    const GameTranscript tr = run_game(spec, rng.bits());
    Out out;
    out.residual = std::abs(tr.gen - (tr.regret_vs_posterior / static_cast<double>(tr.n) -
                                      tr.martingale_avg));
    return out;
  });
  double worst = 0.0;
  for (const Out& o : outs) worst = std::max(worst, o.residual);
  c.pass = worst <= 1e-9;
  c.detail = "max residual " + fmt("%.2e", worst) + " over " + std::to_string(configs) +
             " configs, tol 1e-9";
}

void criterion_conditional_identity(Criterion& c) {
  struct Out {
    double residual = 0.0;
  };
  const std::size_t configs = 126;
  auto outs = parallel_map<Out>(configs, kJobs, [&](std::size_t i) {
    CounterRng rng(derive_stream(2002, static_cast<std::uint64_t>(i)));
    const std::size_t which = i % kLearnerBatterySize;
    const std::size_t stat_kind = (i / kLearnerBatterySize) % 3;
    const Environment env = random_environment(rng, 2, 16, 2, 16);
    RunSpec spec;
    spec.env = env;
    spec.learner = make_battery_learner(which, rng.uniform(0.05, 0.5), env.k());
    spec.stat = make_battery_stat(stat_kind, rng, env.k());
    spec.n = i == 0 ? 1 : (i == 1 ? 200 : rng.index(1, 200));
    // The learner's prior is allowed to depend on the revealed supersample.
    const ConditionalTranscript tr = run_conditional_game(
        spec, rng.bits(),
        [&](const Environment& e, const std::vector<std::size_t>& ss) {
          return gibbs(ProbVector::uniform(e.k()), cumulative_loss(e, ss),
                       0.5 / static_cast<double>(spec.n));
        });
    Out out;
    out.residual =
        std::abs(tr.gen - (tr.regret_vs_posterior / static_cast<double>(tr.n) -
                           tr.martingale_avg + tr.delta));
    return out;
  });
  double worst = 0.0;
  for (const Out& o : outs) worst = std::max(worst, o.residual);
  c.pass = worst <= 1e-9;
  c.detail = "max residual " + fmt("%.2e", worst) + " over " + std::to_string(configs) +
             " configs, tol 1e-9";
}

void criterion_regret_audit(Criterion& c) {
  const std::size_t per_family = 10000;
  std::size_t total_violations = 0;
  double worst_gap = -kInf;
  for (std::size_t which = 0; which < kLearnerBatterySize; ++which) {
    auto gaps = parallel_map<double>(per_family, kJobs, [&](std::size_t r) {
      CounterRng rng(derive_stream(derive_stream(3003, which),
                                   static_cast<std::uint64_t>(r)));
      const std::size_t k = rng.index(2, 16);
      const std::size_t n = rng.index(1, 100);
      const double eta = rng.uniform(0.05, 0.5);
      const std::size_t mode = rng.below(3);  // adversary's cost policy
      OnlineLearnerState learner = make_battery_learner(which, eta, k);
      RegretBoundParams params;
      params.kind = learner.kind;
      params.eta = learner.eta;
      params.spec = learner.spec;
      params.prior = ProbVector::uniform(k);
      const bool optimistic = learner.kind == LearnerKind::Opt2Ewa ||
                              learner.kind == LearnerKind::OptFtrl;

      std::vector<ProbVector> preds;
      std::vector<CostVector> costs, hints;
      CostVector prev = CostVector::zeros(k);
      for (std::size_t t = 0; t < n; ++t) {
        const CostVector g = optimistic ? prev : CostVector::zeros(k);
        const ProbVector p = learner_predict(learner, g);
        // The adversary adapts the cost to the committed prediction.
        std::vector<double> cv(k);
        for (std::size_t w = 0; w < k; ++w) {
          switch (mode) {
            case 0: cv[w] = p[w] > 1.0 / static_cast<double>(k) ? 1.0 : -1.0; break;
            case 1: cv[w] = rng.bits() & 1 ? 1.0 : -1.0; break;
            default: cv[w] = rng.uniform(-1.0, 1.0);
          }
        }
        CostVector cost(std::move(cv));
        learner = learner_observe(std::move(learner), cost, g, g);
        preds.push_back(p);
        if (optimistic) hints.push_back(g);
        costs.push_back(cost);
        prev = std::move(cost);
      }

      double gap = -kInf;
      const auto audit = [&](const ProbVector& u) {
        gap = std::max(gap, regret(preds, costs, u) -
                                regret_bound_rhs(params, costs, hints, u));
      };
      audit(ProbVector::uniform(k));
      for (std::size_t w = 0; w < k; ++w) audit(ProbVector::point_mass(w, k));
      CounterRng crng(derive_stream(rng.bits(), "comparators"));
      for (int j = 0; j < 2; ++j) audit(oracle::random_prob(crng, k));
      return gap;
    });
    for (double g : gaps) {
      worst_gap = std::max(worst_gap, g);
      if (g > 1e-9) ++total_violations;
    }
  }
  c.pass = total_violations == 0;
  c.detail = std::to_string(total_violations) + " violations over " +
             std::to_string(per_family * kLearnerBatterySize) +
             " adaptive sequences, worst gap " + fmt("%.2e", worst_gap) + ", tol 1e-9";
}

void criterion_solver_optimality(Criterion& c) {
  struct Case {
    DivergenceKind kind;
    double p;
  };
  const std::vector<Case> cases = {{DivergenceKind::Chi2, 0.0},
                                   {DivergenceKind::PNorm, 1.5},
                                   {DivergenceKind::PNorm, 2.0},
                                   {DivergenceKind::PNorm, 3.0},
                                   {DivergenceKind::PNorm, 4.0}};
  const std::size_t per_case = 100;
  auto gaps = parallel_map<double>(cases.size() * per_case, kJobs, [&](std::size_t i) {
    const Case& cs = cases[i / per_case];
    CounterRng rng(derive_stream(4004, static_cast<std::uint64_t>(i)));
    const std::size_t k = rng.index(2, 4);
    const ProbVector base = oracle::random_prob(rng, k);
    const DivergenceSpec spec = cs.kind == DivergenceKind::Chi2
                                    ? DivergenceSpec::chi2(base)
                                    : DivergenceSpec::pnorm(base, cs.p);
    const double eta = rng.uniform(0.05, 1.0);
    std::vector<double> cv(k);
    for (double& x : cv) x = rng.uniform(-3.0, 3.0);
    const CostVector cost(std::move(cv));
    const ProbVector got = ftrl_solve(spec, eta, cost);
    const double obj = oracle::ftrl_objective(spec, eta, cost, got.w);
    return obj - oracle::ftrl_grid_min(spec, eta, cost);
  });
  double worst = -kInf;
  std::size_t bad = 0;
  for (double g : gaps) {
    worst = std::max(worst, g);
    if (g > 1e-9) ++bad;
  }
  c.pass = bad == 0;
  c.detail = std::to_string(bad) + " misses over " + std::to_string(gaps.size()) +
             " instances vs grid search, worst objective gap " + fmt("%.2e", worst) +
             ", tol 1e-9";
}

void criterion_concentration_coverage(Criterion& c) {
  const std::size_t trials = 10000;
  std::ostringstream detail;
  bool first = true;
  for (double delta : {0.05, 0.1}) {
    for (ConcentrationLemma lemma :
         {ConcentrationLemma::SecondMoment, ConcentrationLemma::Bounded,
          ConcentrationLemma::HeavyTail}) {
      const CoverageOutcome out = coverage_concentration(
          lemma, 0.05, 50, trials, delta,
          derive_stream(5005, static_cast<std::uint64_t>(lemma) * 100 +
                                  static_cast<std::uint64_t>(delta * 100)),
          kJobs);
      const bool ok = out.report.empirical_rate <= out.report.binomial_3sigma;
      c.pass = c.pass && ok;
      if (!first) detail << ", ";
      first = false;
      detail << out.report.bound_id << "@" << delta << "="
             << fmt("%.4f", out.report.empirical_rate)
             << (ok ? "" : "(>" + fmt("%.4f", out.report.binomial_3sigma) + ")");
    }
  }
  c.detail = "violation rates " + detail.str() + " within delta + 3 binomial sigma";
}

void criterion_bound_coverage(Criterion& c) {
  const std::size_t trials = 10000;
  const double delta = 0.05;
  std::ostringstream detail;
  bool first = true;
  for (GameBoundId id :
       {GameBoundId::Vanilla, GameBoundId::Tuned, GameBoundId::ParamFree,
        GameBoundId::SecondOrderMoment, GameBoundId::SecondOrderRelaxed,
        GameBoundId::FtrlChi2, GameBoundId::PNormA, GameBoundId::PNormB,
        GameBoundId::Conditional}) {
    auto rows = parallel_map<CoverageRow>(trials, kJobs, [&](std::size_t r) {
      const std::uint64_t seed = derive_stream(derive_stream(6006, game_bound_name(id)),
                                               static_cast<std::uint64_t>(r));
      CounterRng rng(derive_stream(seed, "battery"));
      const Environment env = random_environment(rng, 2, 16, 2, 16);
      const StatLearnerSpec stat =
          StatLearnerSpec::gibbs(rng.uniform(0.1, 4.0), ProbVector::uniform(env.k()));
      return coverage_trial(id, env, stat, 50, delta, seed);
    });
    const CoverageOutcome out = make_coverage_outcome(game_bound_name(id), std::move(rows), delta);
    const bool ok = out.report.empirical_rate <= out.report.binomial_3sigma;
    c.pass = c.pass && ok;
    if (!first) detail << ", ";
    first = false;
    detail << out.report.bound_id << "=" << fmt("%.4f", out.report.empirical_rate)
           << (ok ? "" : "(>" + fmt("%.4f", out.report.binomial_3sigma) + ")");
  }
  c.detail = "violation rates " + detail.str() + " within " +
             fmt("%.4f", delta + 3.0 * std::sqrt(delta * (1.0 - delta) / trials));
}

void criterion_fast_rate_slope(Criterion& c) {
  // On realizable environments the relaxed second-order certificate with a
  // fixed eta should exceed the conditional test risk by Theta(1/n).
  const double eta = 0.5;
  const double delta = 0.05;
  const std::size_t reps = 200;
  std::vector<double> log_n, log_excess;
  for (std::size_t n : {50, 100, 200, 400, 800, 1600, 3200}) {
    auto excesses = parallel_map<double>(reps, kJobs, [&](std::size_t r) {
      const std::uint64_t seed = derive_stream(derive_stream(7007, n),
                                               static_cast<std::uint64_t>(r));
      CounterRng rng(derive_stream(seed, "battery"));
      const Environment env = random_environment(rng, 2, 8, 2, 8, true);
      CounterRng srng(derive_stream(seed, "sample"));
      std::vector<std::size_t> sample(n);
      for (std::size_t t = 0; t < n; ++t) sample[t] = detail::draw_instance(env, srng);
      const ProbVector prior = ProbVector::uniform(env.k());
      const ProbVector post =
          posterior(StatLearnerSpec::gibbs(2.0, prior), env, sample);
      const BoundCertificate cert =
          cert_second_order(SecondOrderForm::Relaxed, post, prior, env, sample, eta, delta);
      return cert.coverage_value() - inner(post, risk_vector(env));
    });
    double mean = 0.0;
    for (double e : excesses) mean += e / static_cast<double>(reps);
    log_n.push_back(std::log(static_cast<double>(n)));
    log_excess.push_back(std::log(mean));
  }
  // Least-squares slope of log excess against log n.
  const std::size_t m = log_n.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sx += log_n[i];
    sy += log_excess[i];
    sxx += log_n[i] * log_n[i];
    sxy += log_n[i] * log_excess[i];
  }
  const double dm = static_cast<double>(m);
  const double slope = (dm * sxy - sx * sy) / (dm * sxx - sx * sx);
  c.pass = std::abs(slope + 1.0) <= 0.15;
  c.detail = "log-log slope " + fmt("%.3f", slope) + " (target -1 +/- 0.15), eta " +
             fmt("%.2f", eta) + ", " + std::to_string(reps) + " reps per n";
}

void criterion_transport(Criterion& c) {
  // Exact solver vs brute-force enumeration.
  auto gaps = parallel_map<double>(200, kJobs, [&](std::size_t i) {
    CounterRng rng(derive_stream(8008, static_cast<std::uint64_t>(i)));
    const std::size_t d = rng.index(1, 3);
    const auto cloud = [&](std::size_t m) {
      std::vector<std::vector<double>> pts(m, std::vector<double>(d));
      std::vector<double> w(m);
      for (auto& p : pts) {
        for (double& x : p) x = rng.uniform(-2.0, 2.0);
      }
      for (double& x : w) x = rng.uniform(0.1, 1.0);
      const double total = csum(w);
      for (double& x : w) x /= total;
      double s = 0.0;
      for (double x : w) s += x;
      w.back() += 1.0 - s;
      return PointCloudMeasure(pts, w);
    };
    const PointCloudMeasure p = cloud(rng.index(1, 4));
    const PointCloudMeasure q = cloud(rng.index(1, 4));
    const double got = wasserstein2_sq(p, q);
    const double want = oracle::w2_bruteforce(p, q);
    return std::abs(got - want) / std::max(1.0, want);
  });
  double worst_w2 = 0.0;
  for (double g : gaps) worst_w2 = std::max(worst_w2, g);

  // Smoothed-divergence spread bound and duality against smoothed TV.
  const std::size_t mc = 100000;
  std::size_t spread_bad = 0, duality_bad = 0;
  for (double gd : {0.25, 0.5}) {
    auto bads = parallel_map<std::pair<int, int>>(50, kJobs, [&](std::size_t i) {
      CounterRng rng(derive_stream(derive_stream(8009, i),
                                   static_cast<std::uint64_t>(gd * 100)));
      const std::size_t d = rng.index(1, 2);
      const double gamma = gd / std::sqrt(static_cast<double>(d));
      const auto cloud = [&](std::size_t m) {
        std::vector<std::vector<double>> pts(m, std::vector<double>(d));
        std::vector<double> w(m);
        for (auto& p : pts) {
          for (double& x : p) x = rng.uniform(-2.0, 2.0);
        }
        for (double& x : w) x = rng.uniform(0.1, 1.0);
        const double total = csum(w);
        for (double& x : w) x /= total;
        double s = 0.0;
        for (double x : w) s += x;
        w.back() += 1.0 - s;
        return PointCloudMeasure(pts, w);
      };
      const PointCloudMeasure p = cloud(rng.index(1, 4));
      const PointCloudMeasure q = cloud(rng.index(1, 4));

      // Spread: smoothed relative entropy is at most W2^2 / (2 gamma^2).
      const SmoothedEstimate klh = smoothed_kl_mc(p, q, gamma, mc, rng.bits());
      const double w2 = wasserstein2_sq(p, q);
      const bool spread_ok =
          klh.value <= w2 / (2.0 * gamma * gamma) + 3.0 * klh.std_error + 1e-9;

      // Duality: a test function with all derivative bounds beta_j = 1 obeys
      // |<P - P', f>| <= 2 TV(smoothed) * sum_j (gamma sqrt d)^j beta_j.
      std::vector<double> a(d);
      double norm = 0.0;
      for (double& x : a) {
        x = rng.uniform(-1.0, 1.0);
        norm += x * x;
      }
      norm = std::sqrt(norm);
      if (norm > 1.0) {
        for (double& x : a) x /= norm;
      }
      const double phase = rng.uniform(0.0, 6.28);
      const auto f = [&](const std::vector<double>& x) {
        double s = phase;
        for (std::size_t k = 0; k < d; ++k) s += a[k] * x[k];
        return std::sin(s);
      };
      double lhs = 0.0;
      for (std::size_t k = 0; k < p.size(); ++k) lhs += p.weights[k] * f(p.points[k]);
      for (std::size_t k = 0; k < q.size(); ++k) lhs -= q.weights[k] * f(q.points[k]);
      const SmoothedEstimate tvh = smoothed_tv_mc(p, q, gamma, mc, rng.bits());
      const double series = smoothing_series_bound(1.0, gamma, d);
      const bool duality_ok =
          std::abs(lhs) <= 2.0 * series * (tvh.value + 3.0 * tvh.std_error) + 1e-9;
      return std::pair<int, int>(spread_ok ? 0 : 1, duality_ok ? 0 : 1);
    });
    for (const auto& [s, t] : bads) {
      spread_bad += s;
      duality_bad += t;
    }
  }
  c.pass = worst_w2 <= 1e-9 && spread_bad == 0 && duality_bad == 0;
  c.detail = "worst W2 gap " + fmt("%.2e", worst_w2) + " over 200 instances; " +
             std::to_string(spread_bad) + " spread / " + std::to_string(duality_bad) +
             " duality failures over 100 pairs";
}

void criterion_simplex_geometry(Criterion& c) {
  const std::size_t pairs = 100000;
  auto bads = parallel_map<int>(pairs, kJobs, [&](std::size_t i) {
    CounterRng rng(derive_stream(9009, static_cast<std::uint64_t>(i)));
    const std::size_t k = rng.index(2, 8);
    const ProbVector base = oracle::random_prob(rng, k);
    const ProbVector p = oracle::random_prob(rng, k);
    const ProbVector q = oracle::random_prob(rng, k);
    int bad = 0;
    const double tol = 1e-10;

    // Pinsker: KL >= ||P - Q||_1^2 / 2.
    const double l1 = l1_distance(p, q);
    if (kl(p, q) < 0.5 * l1 * l1 - tol) bad = 1;

    // Chi-squared is the squared base-weighted 2-norm distance.
    const double d2 = pnorm_distance(p, q, q, 2.0);
    if (std::abs(chi2(p, q) - d2 * d2) > tol) bad = 1;

    // Conjugate smoothness of the log partition.
    const double eta = rng.uniform(0.05, 2.0);
    std::vector<double> cv1(k), cv2(k);
    for (double& x : cv1) x = rng.uniform(-3.0, 3.0);
    for (double& x : cv2) x = rng.uniform(-3.0, 3.0);
    const CostVector c1(std::move(cv1)), c2(std::move(cv2));
    const ProbVector g = gibbs(base, c2, eta);
    double cross = 0.0, gap = 0.0;
    for (std::size_t w = 0; w < k; ++w) {
      cross += g[w] * (c1[w] - c2[w]);
      gap = std::max(gap, std::abs(c1[w] - c2[w]));
    }
    const double breg =
        log_partition(base, c1, eta) - log_partition(base, c2, eta) + cross;
    if (breg < -tol || breg > 0.5 * eta * gap * gap + tol) bad = 1;

    // Uniform convexity of the p-norm regularizers.
    for (double pw : {2.0, 3.0, 4.0}) {
      std::vector<double> mid(k);
      for (std::size_t w = 0; w < k; ++w) mid[w] = 0.5 * (p[w] + q[w]);
      const double hp = std::pow(pnorm_distance(p, base, base, pw), pw);
      const double hq = std::pow(pnorm_distance(q, base, base, pw), pw);
      const double hm = std::pow(pnorm_distance(ProbVector(mid), base, base, pw), pw);
      const double half = 0.5 * pnorm_distance(p, q, base, pw);
      if (hm > 0.5 * hp + 0.5 * hq - std::pow(half, pw) + tol) bad = 1;
      const DivergenceSpec spec = DivergenceSpec::pnorm(base, pw);
      const double b = bregman(spec, p, q);
      const double dist = pnorm_distance(p, q, base, pw);
      if (pw == 2.0) {
        if (std::abs(b - dist * dist) > tol) bad = 1;
      } else if (b < std::pow(dist, pw) / (std::pow(2.0, pw - 1.0) - 1.0) - tol) {
        bad = 1;
      }
    }
    return bad;
  });
  std::size_t total = 0;
  for (int b : bads) total += b;
  c.pass = total == 0;
  c.detail = std::to_string(total) + " failures over " + std::to_string(pairs) +
             " random pairs, tol 1e-10";
}

void criterion_expected_bound(Criterion& c) {
  RunSpec spec;
  spec.env = Environment({0.3, 0.7}, {{0.1, 0.9, 0.4}, {0.2, 0.8, 0.5}}, 0.0, 1.0);
  spec.n = 30;
  spec.learner = make_ewa(0.5, ProbVector::uniform(3));
  spec.stat = StatLearnerSpec::gibbs(2.0, ProbVector::uniform(3));
  const std::size_t reps = 10000;
  const auto trs = replicate(spec, reps, 10010, kJobs);
  double mean = 0.0, sumsq = 0.0;
  for (const auto& tr : trs) {
    mean += tr.gen;
    sumsq += tr.gen * tr.gen;
  }
  mean /= static_cast<double>(reps);
  const double var = std::max(0.0, sumsq / static_cast<double>(reps) - mean * mean);
  const double se = std::sqrt(var / static_cast<double>(reps));
  const BoundCertificate mi = cert_expected(ExpectedBoundVariant::MutualInfo, trs,
                                            ProbVector::uniform(3), std::nullopt);
  c.pass = mean <= mi.value() + 3.0 * se;
  c.detail = "mean gen " + fmt("%.4f", mean) + " vs information bound " +
             fmt("%.4f", mi.value()) + " + 3se (" + fmt("%.4f", 3.0 * se) + "), R=" +
             std::to_string(reps);
}

void criterion_determinism(Criterion& c) {
  nlohmann::json j = {{"command", "verify-identity"}, {"n", 30}, {"R", 60}, {"seed", 17}};
  ExperimentConfig cfg = parse_config(j);
  const auto base = std::filesystem::temp_directory_path() / "genlab_acceptance_det";
  std::filesystem::remove_all(base);
  const auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  cfg.jobs = 1;
  const int rc1 = execute(cfg, (base / "j1").string());
  cfg.jobs = 8;
  const int rc8 = execute(cfg, (base / "j8").string());
  const bool same_summary = slurp(base / "j1/summary.json") == slurp(base / "j8/summary.json");
  const bool same_csv = slurp(base / "j1/replicates.csv") == slurp(base / "j8/replicates.csv");
  std::filesystem::remove_all(base);
  c.pass = rc1 == 0 && rc8 == 0 && same_summary && same_csv;
  c.detail = std::string("jobs=1 vs jobs=8 artifacts ") +
             (same_summary && same_csv ? "byte-identical" : "DIFFER") +
             ", exit codes " + std::to_string(rc1) + "/" + std::to_string(rc8);
}

}  // namespace

int main() {
  run_criterion(1, "generalization identity", 30, criterion_identity);
  run_criterion(2, "conditional-game identity", 60, criterion_conditional_identity);
  run_criterion(3, "adaptive regret audit", 300, criterion_regret_audit);
  run_criterion(4, "solver optimality vs grid search", 120, criterion_solver_optimality);
  run_criterion(5, "concentration lemma coverage", 120, criterion_concentration_coverage);
  run_criterion(6, "generalization bound coverage", 900, criterion_bound_coverage);
  run_criterion(7, "fast-rate slope on realizable tasks", 300, criterion_fast_rate_slope);
  run_criterion(8, "transport and smoothing checks", 300, criterion_transport);
  run_criterion(9, "simplex geometry inequalities", 120, criterion_simplex_geometry);
  run_criterion(10, "expected generalization bound", 300, criterion_expected_bound);
  run_criterion(11, "artifact determinism across jobs", 60, criterion_determinism);
  return g_failures;
}
