#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "genlab/battery.hpp"
#include "genlab/bounds.hpp"
#include "genlab/config.hpp"
#include "genlab/game.hpp"
#include "genlab/serialize.hpp"
#include "genlab/transport.hpp"

namespace genlab {

namespace detail {

inline std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

inline void write_file(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << data;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline Environment config_environment(const ExperimentConfig& cfg, std::uint64_t seed) {
  if (cfg.environment) return *cfg.environment;
  CounterRng rng(derive_stream(seed, "environment"));
  return random_environment(rng, cfg.battery.k_lo, cfg.battery.k_hi, cfg.battery.m_lo,
                            cfg.battery.m_hi, cfg.battery.realizable);
}

inline OnlineLearnerState config_learner(const LearnerConfig& lc, std::size_t k) {
  const ProbVector prior = ProbVector::uniform(k);
  switch (lc.kind) {
    case LearnerKind::Ewa: return make_ewa(lc.eta, prior);
    case LearnerKind::Opt2Ewa: return make_opt2ewa(lc.eta, prior);
    case LearnerKind::Ftrl:
    case LearnerKind::OptFtrl:
      return make_ftrl(lc.kind, lc.eta, DivergenceSpec(lc.divergence, prior, lc.p));
  }
  throw std::invalid_argument("config_learner: unknown kind");
}

inline StatLearnerSpec config_stat(const StatConfig& sc, std::size_t k) {
  switch (sc.kind) {
    case StatLearnerSpec::Kind::Gibbs:
      return StatLearnerSpec::gibbs(sc.beta, ProbVector::uniform(k));
    case StatLearnerSpec::Kind::Erm:
      return StatLearnerSpec::erm();
    case StatLearnerSpec::Kind::Fixed:
      return StatLearnerSpec::fixed(ProbVector(sc.fixed));
  }
  throw std::invalid_argument("config_stat: unknown kind");
}

// Negative-control learner that reads the current round's instance before
// committing its prediction; the engine's access log flags it.
inline PredictFn make_peek_fixture(const Environment& env) {
  return [&env](std::size_t t, const CostVector&, GameAccess& access) {
    const std::size_t z = access.instance(t);
    const CostVector c = cost_vector(env, z);
    std::size_t best = 0;
    for (std::size_t w = 1; w < c.size(); ++w) {
      if (c[w] < c[best]) best = w;
    }
    return ProbVector::point_mass(best, c.size());
  };
}

struct CommandResult {
  nlohmann::json summary;
  std::string csv;
  bool failed = false;
};

inline CommandResult run_verify_identity(const ExperimentConfig& cfg) {
  struct Row {
    std::uint64_t seed;
    std::string learner;
    double residual;
    double cond_residual;
  };
  auto rows = parallel_map<Row>(cfg.r_count, cfg.jobs, [&](std::size_t r) {
    const std::uint64_t seed = derive_stream(cfg.seed, static_cast<std::uint64_t>(r));
    CounterRng brng(derive_stream(seed, "battery"));
    const Environment env = config_environment(cfg, seed);
    const std::size_t which = brng.below(kLearnerBatterySize);
    const double eta = brng.uniform(0.05, 0.5);
    RunSpec spec;
    spec.env = env;
    spec.learner = make_battery_learner(which, eta, env.k());
    spec.hints.mode = cfg.learner.hint_mode;
    spec.stat = make_battery_stat(brng.below(3), brng, env.k());
    spec.n = brng.index(1, cfg.n);

    const GameTranscript tr = run_game(spec, seed);
    const double resid =
        std::abs(tr.gen - (tr.regret_vs_posterior / static_cast<double>(tr.n) -
                           tr.martingale_avg));
    const ConditionalTranscript ctr = run_conditional_game(
        spec, seed, [&](const Environment& e, const std::vector<std::size_t>& ss) {
          return gibbs(ProbVector::uniform(e.k()), cumulative_loss(e, ss),
                       0.5 / static_cast<double>(spec.n));
        });
    const double cond_resid =
        std::abs(ctr.gen - (ctr.regret_vs_posterior / static_cast<double>(ctr.n) -
                            ctr.martingale_avg + ctr.delta));
    return Row{seed, battery_learner_name(which), resid, cond_resid};
  });

  CommandResult out;
  std::ostringstream csv;
  csv << "seed,learner,residual,conditional_residual\n";
  double max_resid = 0.0, max_cond = 0.0;
  for (const Row& row : rows) {
    csv << row.seed << "," << row.learner << "," << csv_double(row.residual) << ","
        << csv_double(row.cond_residual) << "\n";
    max_resid = std::max(max_resid, row.residual);
    max_cond = std::max(max_cond, row.cond_residual);
  }
  out.csv = csv.str();
  out.summary["max_residual"] = max_resid;
  out.summary["max_conditional_residual"] = max_cond;
  out.summary["tolerance"] = 1e-9;
  out.failed = max_resid > 1e-9 || max_cond > 1e-9;
  return out;
}

inline CommandResult run_regret_audit(const ExperimentConfig& cfg) {
  struct Row {
    std::uint64_t seed;
    std::string learner;
    double worst_gap;  // max over comparators of regret - rhs
    bool contract_violation;
  };
  auto rows = parallel_map<Row>(cfg.r_count, cfg.jobs, [&](std::size_t r) {
    const std::uint64_t seed = derive_stream(cfg.seed, static_cast<std::uint64_t>(r));
    CounterRng brng(derive_stream(seed, "battery"));
    const Environment env = config_environment(cfg, seed);
    const std::size_t which = brng.below(kLearnerBatterySize);
    const double eta = brng.uniform(0.05, 0.5);
    RunSpec spec;
    spec.env = env;
    spec.learner = make_battery_learner(which, eta, env.k());
    spec.hints.mode = cfg.learner.hint_mode;
    spec.stat = make_battery_stat(brng.below(3), brng, env.k());
    spec.n = brng.index(1, cfg.n);

    const PredictFn fixture =
        cfg.fixture == "peek" ? make_peek_fixture(env) : PredictFn();
    const GameTranscript tr = run_game(spec, seed, fixture);

    RegretBoundParams params;
    params.kind = spec.learner.kind;
    params.eta = spec.learner.eta;
    params.spec = spec.learner.spec;
    params.prior = ProbVector::uniform(env.k());
    const CostVector hint = spec.hints.make(env);
    const bool optimistic = params.kind == LearnerKind::Opt2Ewa ||
                            params.kind == LearnerKind::OptFtrl;
    const std::vector<CostVector> hints =
        optimistic ? std::vector<CostVector>(tr.n, hint) : std::vector<CostVector>();

    double worst = -kInf;
    const auto audit = [&](const ProbVector& comparator) {
      const double lhs = regret(tr.predictions, tr.costs, comparator);
      const double rhs = regret_bound_rhs(params, tr.costs, hints, comparator);
      worst = std::max(worst, lhs - rhs);
    };
    audit(tr.posterior);
    for (std::size_t w = 0; w < env.k(); ++w) {
      audit(ProbVector::point_mass(w, env.k()));
    }
    return Row{seed, battery_learner_name(which), worst, tr.contract_violation};
  });

  CommandResult out;
  std::ostringstream csv;
  csv << "seed,learner,worst_gap,contract_violation\n";
  double max_gap = -kInf;
  bool any_violation = false;
  for (const Row& row : rows) {
    csv << row.seed << "," << row.learner << "," << csv_double(row.worst_gap) << ","
        << (row.contract_violation ? "1" : "0") << "\n";
    max_gap = std::max(max_gap, row.worst_gap);
    any_violation = any_violation || row.contract_violation;
  }
  out.csv = csv.str();
  out.summary["max_bound_gap"] = max_gap;
  out.summary["tolerance"] = 1e-9;
  out.summary["contract_violation"] = any_violation;
  out.failed = max_gap > 1e-9 || any_violation;
  return out;
}

inline CommandResult run_certify(const ExperimentConfig& cfg) {
  const Environment env = config_environment(cfg, cfg.seed);
  const StatLearnerSpec stat = config_stat(cfg.stat, env.k());
  std::vector<std::string> ids = cfg.bound_ids;
  if (ids.empty()) {
    for (GameBoundId id :
         {GameBoundId::Vanilla, GameBoundId::Tuned, GameBoundId::ParamFree,
          GameBoundId::SecondOrderMoment, GameBoundId::SecondOrderRelaxed,
          GameBoundId::FtrlChi2, GameBoundId::PNormA, GameBoundId::PNormB,
          GameBoundId::Conditional}) {
      ids.push_back(game_bound_name(id));
    }
  }
  CommandResult out;
  std::ostringstream csv;
  csv << "bound_id,realized,certificate,valid\n";
  nlohmann::json certs = nlohmann::json::array();
  for (const std::string& id_name : ids) {
    const GameBoundId id = *game_bound_from_name(id_name);
    const GameBoundEval eval = evaluate_game_bound(id, env, stat, cfg.n, cfg.delta, cfg.seed);
    certs.push_back(to_json(eval.cert));
    csv << id_name << "," << csv_double(eval.realized) << ","
        << csv_double(eval.cert.coverage_value()) << "," << (eval.cert.valid ? "1" : "0")
        << "\n";
  }
  out.summary["certificates"] = std::move(certs);
  out.csv = csv.str();
  return out;
}

inline CommandResult run_coverage(const ExperimentConfig& cfg) {
  std::vector<std::string> ids = cfg.bound_ids;
  if (ids.empty()) {
    for (GameBoundId id :
         {GameBoundId::Vanilla, GameBoundId::Tuned, GameBoundId::ParamFree,
          GameBoundId::SecondOrderMoment, GameBoundId::SecondOrderRelaxed,
          GameBoundId::FtrlChi2, GameBoundId::PNormA, GameBoundId::PNormB,
          GameBoundId::Conditional}) {
      ids.push_back(game_bound_name(id));
    }
  }
  CommandResult out;
  nlohmann::json reports = nlohmann::json::array();
  std::ostringstream csv;
  csv << "bound_id," << coverage_csv_header();
  for (const std::string& id_name : ids) {
    const GameBoundId id = *game_bound_from_name(id_name);
    auto rows = parallel_map<CoverageRow>(cfg.r_count, cfg.jobs, [&](std::size_t r) {
      const std::uint64_t seed = derive_stream(
          derive_stream(cfg.seed, id_name), static_cast<std::uint64_t>(r));
      const Environment env = config_environment(cfg, seed);
      const StatLearnerSpec stat = config_stat(cfg.stat, env.k());
      return coverage_trial(id, env, stat, cfg.n, cfg.delta, seed);
    });
    const CoverageOutcome outcome =
        make_coverage_outcome(id_name, std::move(rows), cfg.delta);
    for (const CoverageRow& row : outcome.rows) {
      csv << id_name << "," << coverage_csv_row(row);
    }
    reports.push_back(to_json(outcome.report));
    out.failed = out.failed ||
                 outcome.report.empirical_rate > outcome.report.binomial_3sigma;
  }
  out.summary["reports"] = std::move(reports);
  out.csv = csv.str();
  return out;
}

inline CommandResult run_concentration(const ExperimentConfig& cfg) {
  CommandResult out;
  nlohmann::json reports = nlohmann::json::array();
  std::ostringstream csv;
  csv << "lemma," << coverage_csv_header();
  for (ConcentrationLemma lemma :
       {ConcentrationLemma::SecondMoment, ConcentrationLemma::Bounded,
        ConcentrationLemma::HeavyTail}) {
    const double lambda =
        lemma == ConcentrationLemma::Bounded ? std::min(cfg.lambda, 0.5) : cfg.lambda;
    const CoverageOutcome outcome = coverage_concentration(
        lemma, lambda, cfg.n, cfg.r_count, cfg.delta,
        derive_stream(cfg.seed, static_cast<std::uint64_t>(lemma)), cfg.jobs);
    for (const CoverageRow& row : outcome.rows) {
      csv << outcome.report.bound_id << "," << coverage_csv_row(row);
    }
    reports.push_back(to_json(outcome.report));
    out.failed = out.failed ||
                 outcome.report.empirical_rate > outcome.report.binomial_3sigma;
  }
  out.summary["reports"] = std::move(reports);
  out.csv = csv.str();
  return out;
}

inline CommandResult run_ot_check(const ExperimentConfig& cfg) {
  struct Row {
    std::uint64_t seed;
    double w_pq;
    double symmetry_gap;
    double self_distance;
  };
  auto rows = parallel_map<Row>(cfg.r_count, cfg.jobs, [&](std::size_t r) {
    const std::uint64_t seed = derive_stream(cfg.seed, static_cast<std::uint64_t>(r));
    CounterRng rng(derive_stream(seed, "ot"));
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
      return PointCloudMeasure(pts, w);
    };
    const PointCloudMeasure p = cloud(rng.index(1, 4));
    const PointCloudMeasure q = cloud(rng.index(1, 4));
    const double w_pq = wasserstein2_sq(p, q);
    const double w_qp = wasserstein2_sq(q, p);
    return Row{seed, w_pq, std::abs(w_pq - w_qp), wasserstein2_sq(p, p)};
  });
  CommandResult out;
  std::ostringstream csv;
  csv << "seed,w2_sq,symmetry_gap,self_distance\n";
  double max_sym = 0.0, max_self = 0.0;
  bool nonneg = true;
  for (const Row& row : rows) {
    csv << row.seed << "," << csv_double(row.w_pq) << "," << csv_double(row.symmetry_gap)
        << "," << csv_double(row.self_distance) << "\n";
    max_sym = std::max(max_sym, row.symmetry_gap);
    max_self = std::max(max_self, row.self_distance);
    nonneg = nonneg && row.w_pq >= 0.0;
  }
  out.csv = csv.str();
  out.summary["max_symmetry_gap"] = max_sym;
  out.summary["max_self_distance"] = max_self;
  out.summary["nonnegative"] = nonneg;
  out.failed = max_sym > 1e-9 || max_self > 1e-10 || !nonneg;
  return out;
}

}  // namespace detail

// Runs the configured experiment and writes summary.json + replicates.csv to
// `out_dir`.  Returns 0 on success; nonzero when any invariant check fails.
inline int execute(const ExperimentConfig& cfg, const std::string& out_dir) {
  detail::CommandResult result;
  if (cfg.command == "verify-identity") {
    result = detail::run_verify_identity(cfg);
  } else if (cfg.command == "regret-audit") {
    result = detail::run_regret_audit(cfg);
  } else if (cfg.command == "certify") {
    result = detail::run_certify(cfg);
  } else if (cfg.command == "coverage") {
    result = detail::run_coverage(cfg);
  } else if (cfg.command == "concentration") {
    result = detail::run_concentration(cfg);
  } else if (cfg.command == "ot-check") {
    result = detail::run_ot_check(cfg);
  } else {
    throw ConfigError("unknown command: " + cfg.command);
  }

  nlohmann::json summary;
  summary["schema_version"] = kConfigSchemaVersion;
  summary["artifact_version"] = kArtifactVersion;
  nlohmann::json cfg_echo = serialize_config(cfg);
  cfg_echo.erase("jobs");  // execution detail; outputs are jobs-independent
  summary["config"] = std::move(cfg_echo);
  summary["seed"] = cfg.seed;
  summary["command"] = cfg.command;
  summary["result"] = std::move(result.summary);
  summary["failed"] = result.failed;
  summary["artifact_hash"] = detail::fnv1a_hex(result.csv);

  const std::filesystem::path dir(out_dir.empty() ? "." : out_dir);
  std::filesystem::create_directories(dir);
  detail::write_file(dir / "summary.json", summary.dump(2) + "\n");
  detail::write_file(dir / "replicates.csv", result.csv);
  return result.failed ? 1 : 0;
}

}  // namespace genlab
