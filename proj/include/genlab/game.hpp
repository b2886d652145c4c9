#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "genlab/learners.hpp"
#include "genlab/measures.hpp"
#include "genlab/rng.hpp"

namespace genlab {

// Finite-support data distribution with a per-(hypothesis, instance) loss
// table and a declared loss range.
struct Environment {
  std::vector<double> z_probs;                  // m
  std::vector<std::vector<double>> loss_table;  // m rows of K losses
  double loss_lo = 0.0;
  double loss_hi = 1.0;

  Environment() = default;
  Environment(std::vector<double> probs, std::vector<std::vector<double>> table,
              double lo, double hi)
      : z_probs(std::move(probs)), loss_table(std::move(table)), loss_lo(lo), loss_hi(hi) {
    if (z_probs.empty() || loss_table.size() != z_probs.size()) {
      throw std::invalid_argument("Environment: table/probs size mismatch");
    }
    if (!(lo <= hi)) throw std::invalid_argument("Environment: bad loss range");
    CompensatedSum s;
    for (double p : z_probs) {
      if (!(p >= 0.0)) throw std::invalid_argument("Environment: negative probability");
      s.add(p);
    }
    if (std::abs(s.value() - 1.0) > kSimplexTol) {
      throw std::invalid_argument("Environment: probabilities do not sum to 1");
    }
    const std::size_t k = loss_table.front().size();
    if (k == 0) throw std::invalid_argument("Environment: empty hypothesis set");
    for (const auto& row : loss_table) {
      if (row.size() != k) throw std::invalid_argument("Environment: ragged loss table");
      for (double v : row) {
        if (!(v >= 0.0)) throw std::invalid_argument("Environment: negative loss");
        if (v < lo || v > hi) {
          throw std::invalid_argument("Environment: loss outside declared range");
        }
      }
    }
  }

  std::size_t m() const { return z_probs.size(); }
  std::size_t k() const { return loss_table.front().size(); }
  double loss(std::size_t w, std::size_t z) const { return loss_table.at(z).at(w); }
};

// E[l(w, Z')] under the environment distribution.
inline double risk(const Environment& env, std::size_t w) {
  if (w >= env.k()) throw std::invalid_argument("risk: hypothesis index out of range");
  CompensatedSum s;
  for (std::size_t z = 0; z < env.m(); ++z) s.add(env.z_probs[z] * env.loss(w, z));
  return s.value();
}

inline CostVector risk_vector(const Environment& env) {
  std::vector<double> r(env.k());
  for (std::size_t w = 0; w < env.k(); ++w) r[w] = risk(env, w);
  return CostVector(std::move(r));
}

// c(w) = l(w, z) - E[l(w, Z')].
inline CostVector cost_vector(const Environment& env, std::size_t z) {
  if (z >= env.m()) throw std::invalid_argument("cost_vector: instance index out of range");
  std::vector<double> c(env.k());
  for (std::size_t w = 0; w < env.k(); ++w) c[w] = env.loss(w, z) - risk(env, w);
  return CostVector(std::move(c));
}

inline CostVector loss_column(const Environment& env, std::size_t z) {
  std::vector<double> c(env.k());
  for (std::size_t w = 0; w < env.k(); ++w) c[w] = env.loss(w, z);
  return CostVector(std::move(c));
}

// Statistical learner: maps a sample to a posterior over hypotheses.
struct StatLearnerSpec {
  enum class Kind { Gibbs, Erm, Fixed };
  Kind kind = Kind::Gibbs;
  double beta = 1.0;   // Gibbs inverse temperature
  ProbVector prior;    // Gibbs
  ProbVector fixed_p;  // Fixed

  static StatLearnerSpec gibbs(double beta, ProbVector prior) {
    if (!(beta >= 0.0)) throw std::invalid_argument("StatLearnerSpec: beta must be >= 0");
    if (!prior.full_support()) {
      throw std::invalid_argument("StatLearnerSpec: Gibbs prior needs full support");
    }
    StatLearnerSpec s;
    s.kind = Kind::Gibbs;
    s.beta = beta;
    s.prior = std::move(prior);
    return s;
  }
  static StatLearnerSpec erm() {
    StatLearnerSpec s;
    s.kind = Kind::Erm;
    return s;
  }
  static StatLearnerSpec fixed(ProbVector p) {
    StatLearnerSpec s;
    s.kind = Kind::Fixed;
    s.fixed_p = std::move(p);
    return s;
  }
};

// Cumulative loss of each hypothesis over a sample of instance indices.
inline CostVector cumulative_loss(const Environment& env,
                                  const std::vector<std::size_t>& sample) {
  std::vector<double> sums(env.k(), 0.0);
  for (std::size_t w = 0; w < env.k(); ++w) {
    CompensatedSum s;
    for (std::size_t z : sample) {
      if (z >= env.m()) throw std::invalid_argument("cumulative_loss: bad instance index");
      s.add(env.loss(w, z));
    }
    sums[w] = s.value();
  }
  return CostVector(std::move(sums));
}

inline ProbVector posterior(const StatLearnerSpec& spec, const Environment& env,
                            const std::vector<std::size_t>& sample) {
  switch (spec.kind) {
    case StatLearnerSpec::Kind::Gibbs: {
      if (spec.beta == 0.0) return spec.prior;
      return gibbs(spec.prior, cumulative_loss(env, sample), spec.beta);
    }
    case StatLearnerSpec::Kind::Erm: {
      const CostVector totals = cumulative_loss(env, sample);
      std::size_t best = 0;
      for (std::size_t w = 1; w < totals.size(); ++w) {
        if (totals[w] < totals[best]) best = w;  // ties keep the lowest index
      }
      return ProbVector::point_mass(best, env.k());
    }
    case StatLearnerSpec::Kind::Fixed:
      return spec.fixed_p;
  }
  throw std::invalid_argument("posterior: unknown kind");
}

// Cost-function hints supplied to the optimistic learners.
struct HintProvider {
  enum class Mode { Zero, NegTestLoss };
  Mode mode = Mode::Zero;

  CostVector make(const Environment& env) const {
    if (mode == Mode::Zero) return CostVector::zeros(env.k());
    const CostVector r = risk_vector(env);
    std::vector<double> g(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) g[i] = -r[i];
    return CostVector(std::move(g));
  }
};

// Read-side handle handed to learner callbacks.  Every instance lookup is
// logged with the round being predicted, so tests can assert the information
// contract (a prediction may only depend on already-revealed instances).
class GameAccess {
 public:
  GameAccess(const std::vector<std::size_t>& sample) : sample_(sample) {}

  std::size_t instance(std::size_t t) {
    accesses_.emplace_back(predicting_round_, t);
    return sample_.at(t);
  }

  void set_predicting_round(std::size_t r) { predicting_round_ = r; }

  // An access during the prediction of round r to instance index t >= r
  // peeks at data not yet revealed.
  bool violation() const {
    for (const auto& [round, t] : accesses_) {
      if (t >= round) return true;
    }
    return false;
  }

 private:
  const std::vector<std::size_t>& sample_;
  std::size_t predicting_round_ = 0;
  std::vector<std::pair<std::size_t, std::size_t>> accesses_;
};

using PredictFn =
    std::function<ProbVector(std::size_t t, const CostVector& hint, GameAccess& access)>;

struct GameTranscript {
  std::size_t n = 0;
  std::vector<ProbVector> predictions;
  std::vector<CostVector> costs;
  std::vector<std::size_t> sample;
  ProbVector posterior;
  double gen = 0.0;
  double regret_vs_posterior = 0.0;
  double martingale_avg = 0.0;
  std::uint64_t seed = 0;
  bool contract_violation = false;
};

struct ConditionalTranscript : GameTranscript {
  std::vector<std::size_t> supersample;  // 2n, pairs (2t, 2t+1)
  std::vector<int> flips;                // n entries in {-1, +1}
  double emp_gen = 0.0;
  double delta = 0.0;
};

struct RunSpec {
  Environment env;
  OnlineLearnerState learner;
  HintProvider hints;
  StatLearnerSpec stat;
  std::size_t n = 1;
};

namespace detail {

inline std::size_t draw_instance(const Environment& env, CounterRng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t z = 0; z + 1 < env.m(); ++z) {
    acc += env.z_probs[z];
    if (u < acc) return z;
  }
  return env.m() - 1;
}

struct EngineResult {
  std::vector<ProbVector> predictions;
  double martingale_avg = 0.0;
  bool contract_violation = false;
};

// Core loop shared by both games: commit P_t, then reveal c_t.
inline EngineResult engine_loop(const std::vector<CostVector>& costs,
                                const std::vector<std::size_t>& sample,
                                const CostVector& hint, OnlineLearnerState learner,
                                const PredictFn& custom_predict) {
  const std::size_t n = costs.size();
  EngineResult out;
  out.predictions.reserve(n);
  GameAccess access(sample);
  CompensatedSum m_sum;
  for (std::size_t t = 0; t < n; ++t) {
    access.set_predicting_round(t);
    ProbVector p = custom_predict ? custom_predict(t, hint, access)
                                  : learner_predict(learner, hint);
    m_sum.add(inner(p, costs[t]));
    out.predictions.push_back(std::move(p));
    if (!custom_predict) {
      learner = learner_observe(std::move(learner), costs[t], hint, hint);
    }
  }
  out.martingale_avg = m_sum.value() / static_cast<double>(n);
  out.contract_violation = access.violation();
  return out;
}

}  // namespace detail

inline GameTranscript run_game(const RunSpec& spec, std::uint64_t seed,
                               const PredictFn& custom_predict = nullptr) {
  if (spec.n < 1) throw std::invalid_argument("run_game: n must be >= 1");
  const Environment& env = spec.env;
  CounterRng rng(derive_stream(seed, "sample"));

  GameTranscript tr;
  tr.n = spec.n;
  tr.seed = seed;
  tr.sample.reserve(spec.n);
  for (std::size_t t = 0; t < spec.n; ++t) tr.sample.push_back(detail::draw_instance(env, rng));

  tr.costs.reserve(spec.n);
  for (std::size_t z : tr.sample) tr.costs.push_back(cost_vector(env, z));

  const CostVector hint = spec.hints.make(env);
  auto engine = detail::engine_loop(tr.costs, tr.sample, hint, spec.learner, custom_predict);
  tr.predictions = std::move(engine.predictions);
  tr.martingale_avg = engine.martingale_avg;
  tr.contract_violation = engine.contract_violation;

  tr.posterior = posterior(spec.stat, env, tr.sample);
  tr.regret_vs_posterior = regret(tr.predictions, tr.costs, tr.posterior);

  // gen computed directly: expected risk minus expected training loss.
  const CostVector risks = risk_vector(env);
  const CostVector totals = cumulative_loss(env, tr.sample);
  std::vector<double> emp(env.k());
  for (std::size_t w = 0; w < env.k(); ++w) emp[w] = totals[w] / static_cast<double>(spec.n);
  tr.gen = inner(tr.posterior, risks) - inner(tr.posterior, CostVector(std::move(emp)));
  return tr;
}

// Builds the online learner's prior from the revealed supersample (identity
// function of the default prior when absent).
using SupersamplePriorFn = std::function<ProbVector(
    const Environment& env, const std::vector<std::size_t>& supersample)>;

inline ConditionalTranscript run_conditional_game(
    const RunSpec& spec, std::uint64_t seed,
    const SupersamplePriorFn& supersample_prior = nullptr,
    const PredictFn& custom_predict = nullptr) {
  if (spec.n < 1) throw std::invalid_argument("run_conditional_game: n must be >= 1");
  const Environment& env = spec.env;
  const std::size_t n = spec.n;

  ConditionalTranscript tr;
  tr.n = n;
  tr.seed = seed;
  CounterRng srng(derive_stream(seed, "supersample"));
  tr.supersample.reserve(2 * n);
  for (std::size_t t = 0; t < 2 * n; ++t) {
    tr.supersample.push_back(detail::draw_instance(env, srng));
  }
  CounterRng frng(derive_stream(seed, "flips"));
  tr.flips.reserve(n);
  for (std::size_t t = 0; t < n; ++t) tr.flips.push_back(frng.bits() & 1 ? 1 : -1);

  tr.sample.reserve(n);
  std::vector<std::size_t> heldout;
  heldout.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t a = tr.supersample[2 * t];      // I_t = +1 member
    const std::size_t b = tr.supersample[2 * t + 1];  // I_t = -1 member
    tr.sample.push_back(tr.flips[t] > 0 ? a : b);
    heldout.push_back(tr.flips[t] > 0 ? b : a);
  }

  // c_t(w) = l(w, Z_t^{I_t}) - l(w, Z_t^{-I_t}): zero mean over the flip.
  tr.costs.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    std::vector<double> c(env.k());
    for (std::size_t w = 0; w < env.k(); ++w) {
      c[w] = env.loss(w, tr.sample[t]) - env.loss(w, heldout[t]);
    }
    tr.costs.emplace_back(std::move(c));
  }

  // The learner may read the full supersample before round 1.
  OnlineLearnerState learner = spec.learner;
  if (supersample_prior) {
    const ProbVector p1 = supersample_prior(env, tr.supersample);
    switch (learner.kind) {
      case LearnerKind::Ewa:
        learner = make_ewa(learner.eta, p1);
        break;
      case LearnerKind::Opt2Ewa:
        learner = make_opt2ewa(learner.eta, p1);
        break;
      case LearnerKind::Ftrl:
      case LearnerKind::OptFtrl:
        learner = make_ftrl(learner.kind,  learner.eta,
                            DivergenceSpec(learner.spec->kind, p1, learner.spec->p));
        break;
    }
  }

  const CostVector hint = CostVector::zeros(env.k());
  auto engine = detail::engine_loop(tr.costs, tr.sample, hint, std::move(learner),
                                    custom_predict);
  tr.predictions = std::move(engine.predictions);
  tr.martingale_avg = engine.martingale_avg;
  tr.contract_violation = engine.contract_violation;

  tr.posterior = posterior(spec.stat, env, tr.sample);
  tr.regret_vs_posterior = regret(tr.predictions, tr.costs, tr.posterior);

  const CostVector train_totals = cumulative_loss(env, tr.sample);
  const CostVector test_totals = cumulative_loss(env, heldout);
  std::vector<double> train_avg(env.k()), test_avg(env.k());
  for (std::size_t w = 0; w < env.k(); ++w) {
    train_avg[w] = train_totals[w] / static_cast<double>(n);
    test_avg[w] = test_totals[w] / static_cast<double>(n);
  }
  const CostVector train_v(std::move(train_avg));
  const CostVector test_v(std::move(test_avg));
  tr.emp_gen = inner(tr.posterior, test_v) - inner(tr.posterior, train_v);
  tr.gen = inner(tr.posterior, risk_vector(env)) - inner(tr.posterior, train_v);
  tr.delta = tr.gen - tr.emp_gen;
  return tr;
}

// Run fn(i) for i in [0, count) across `jobs` threads; results land in a
// pre-sized vector so the output is independent of scheduling.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t count, std::size_t jobs, Fn fn) {
  std::vector<T> out(count);
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::thread> threads;
  const std::size_t workers = std::min(jobs, count);
  std::atomic<std::size_t> next{0};
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&]() {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        out[i] = fn(i);
      }
    });
  }
  for (auto& t : threads) t.join();
  return out;
}

// R independent runs with per-replicate derived seeds.
inline std::vector<GameTranscript> replicate(const RunSpec& spec, std::size_t r_count,
                                             std::uint64_t base_seed, std::size_t jobs = 1) {
  if (r_count < 1) throw std::invalid_argument("replicate: R must be >= 1");
  return parallel_map<GameTranscript>(r_count, jobs, [&](std::size_t r) {
    return run_game(spec, derive_stream(base_seed, static_cast<std::uint64_t>(r)));
  });
}

// Randomized test environment: losses uniform in [0,1], optional zero-loss
// hypothesis for the realizable family.
inline Environment random_environment(CounterRng& rng, std::size_t k_lo, std::size_t k_hi,
                                      std::size_t m_lo, std::size_t m_hi,
                                      bool realizable = false) {
  const std::size_t k = rng.index(k_lo, k_hi);
  const std::size_t m = rng.index(m_lo, m_hi);
  std::vector<double> probs(m);
  for (double& p : probs) p = rng.uniform(0.05, 1.0);
  const double total = csum(probs);
  for (double& p : probs) p /= total;
  std::vector<std::vector<double>> table(m, std::vector<double>(k));
  for (auto& row : table) {
    for (double& v : row) v = rng.uniform();
  }
  if (realizable) {
    const std::size_t star = rng.below(k);
    for (auto& row : table) row[star] = 0.0;
  }
  return Environment(std::move(probs), std::move(table), 0.0, 1.0);
}

}  // namespace genlab
