#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "genlab/bounds.hpp"
#include "genlab/game.hpp"
#include "genlab/learners.hpp"
#include "genlab/measures.hpp"

namespace genlab {

inline constexpr int kConfigSchemaVersion = 1;

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct LearnerConfig {
  LearnerKind kind = LearnerKind::Ewa;
  double eta = 0.5;
  DivergenceKind divergence = DivergenceKind::KL;  // FTRL kinds
  double p = 2.0;
  HintProvider::Mode hint_mode = HintProvider::Mode::Zero;
};

struct StatConfig {
  StatLearnerSpec::Kind kind = StatLearnerSpec::Kind::Gibbs;
  double beta = 1.0;
  std::vector<double> fixed;  // FIXED only
};

struct BatteryConfig {
  std::size_t k_lo = 2, k_hi = 16;
  std::size_t m_lo = 2, m_hi = 16;
  bool realizable = false;
};

struct ExperimentConfig {
  std::string command;
  std::optional<Environment> environment;  // inline; otherwise random battery
  BatteryConfig battery;
  LearnerConfig learner;
  StatConfig stat;
  std::vector<std::string> bound_ids;
  std::size_t n = 50;
  std::size_t r_count = 10000;
  double delta = 0.05;
  std::uint64_t seed = 0;
  std::string out;
  std::size_t jobs = 1;
  double lambda = 0.05;       // concentration command
  std::string fixture;        // "" or "peek" (regret-audit negative control)
};

namespace detail {

inline void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known,
                           const std::string& path) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) {
      throw ConfigError("unknown field \"" + path + it.key() + "\"");
    }
  }
}

template <typename T>
T require_field(const nlohmann::json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) throw ConfigError("missing field \"" + path + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("bad type for field \"" + path + key + "\"");
  }
}

template <typename T>
T optional_field(const nlohmann::json& j, const std::string& key, const std::string& path,
                 T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("bad type for field \"" + path + key + "\"");
  }
}

inline LearnerKind parse_learner_kind(const std::string& s) {
  if (s == "EWA") return LearnerKind::Ewa;
  if (s == "OPT2EWA") return LearnerKind::Opt2Ewa;
  if (s == "FTRL") return LearnerKind::Ftrl;
  if (s == "OPTFTRL") return LearnerKind::OptFtrl;
  throw ConfigError("unknown value for field \"learner.kind\": " + s);
}

inline DivergenceKind parse_divergence_kind(const std::string& s) {
  if (s == "KL") return DivergenceKind::KL;
  if (s == "CHI2") return DivergenceKind::Chi2;
  if (s == "PNORM") return DivergenceKind::PNorm;
  throw ConfigError("unknown value for field \"learner.divergence\": " + s);
}

}  // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  detail::reject_unknown(
      j,
      {"schema_version", "command", "environment", "battery", "learner", "stat_learner",
       "bound_ids", "n", "R", "delta", "seed", "out", "jobs", "lambda", "fixture"},
      "");
  ExperimentConfig cfg;
  const int version =
      detail::optional_field<int>(j, "schema_version", "", kConfigSchemaVersion);
  if (version != kConfigSchemaVersion) {
    throw ConfigError("unsupported value for field \"schema_version\"");
  }
  cfg.command = detail::require_field<std::string>(j, "command", "");
  static const std::set<std::string> kCommands = {
      "verify-identity", "regret-audit", "certify", "coverage", "concentration",
      "ot-check"};
  if (!kCommands.count(cfg.command)) {
    throw ConfigError("unknown value for field \"command\": " + cfg.command);
  }

  if (j.contains("environment")) {
    const nlohmann::json& e = j.at("environment");
    detail::reject_unknown(e, {"z_probs", "loss_table", "loss_range"}, "environment.");
    auto probs = detail::require_field<std::vector<double>>(e, "z_probs", "environment.");
    auto table = detail::require_field<std::vector<std::vector<double>>>(
        e, "loss_table", "environment.");
    auto range = detail::optional_field<std::vector<double>>(e, "loss_range",
                                                             "environment.", {0.0, 1.0});
    if (range.size() != 2) throw ConfigError("field \"environment.loss_range\" needs 2 entries");
    try {
      cfg.environment = Environment(std::move(probs), std::move(table), range[0], range[1]);
    } catch (const std::invalid_argument& err) {
      throw ConfigError(std::string("invalid field \"environment\": ") + err.what());
    }
  }
  if (j.contains("battery")) {
    const nlohmann::json& b = j.at("battery");
    detail::reject_unknown(b, {"k_lo", "k_hi", "m_lo", "m_hi", "realizable"}, "battery.");
    cfg.battery.k_lo = detail::optional_field<std::size_t>(b, "k_lo", "battery.", 2);
    cfg.battery.k_hi = detail::optional_field<std::size_t>(b, "k_hi", "battery.", 16);
    cfg.battery.m_lo = detail::optional_field<std::size_t>(b, "m_lo", "battery.", 2);
    cfg.battery.m_hi = detail::optional_field<std::size_t>(b, "m_hi", "battery.", 16);
    cfg.battery.realizable =
        detail::optional_field<bool>(b, "realizable", "battery.", false);
    if (cfg.battery.k_lo < 1 || cfg.battery.k_lo > cfg.battery.k_hi ||
        cfg.battery.m_lo < 1 || cfg.battery.m_lo > cfg.battery.m_hi) {
      throw ConfigError("invalid field \"battery\": empty size range");
    }
  }
  if (j.contains("learner")) {
    const nlohmann::json& l = j.at("learner");
    detail::reject_unknown(l, {"kind", "eta", "divergence", "p", "hints"}, "learner.");
    cfg.learner.kind =
        detail::parse_learner_kind(detail::require_field<std::string>(l, "kind", "learner."));
    cfg.learner.eta = detail::optional_field<double>(l, "eta", "learner.", 0.5);
    if (!(cfg.learner.eta > 0.0)) throw ConfigError("field \"learner.eta\" must be > 0");
    if (l.contains("divergence")) {
      cfg.learner.divergence = detail::parse_divergence_kind(
          detail::require_field<std::string>(l, "divergence", "learner."));
    }
    cfg.learner.p = detail::optional_field<double>(l, "p", "learner.", 2.0);
    if (cfg.learner.divergence == DivergenceKind::PNorm && !(cfg.learner.p > 1.0)) {
      throw ConfigError("field \"learner.p\" must be > 1");
    }
    const std::string hints =
        detail::optional_field<std::string>(l, "hints", "learner.", "ZERO");
    if (hints == "ZERO") {
      cfg.learner.hint_mode = HintProvider::Mode::Zero;
    } else if (hints == "NEG_TEST_LOSS") {
      cfg.learner.hint_mode = HintProvider::Mode::NegTestLoss;
    } else {
      throw ConfigError("unknown value for field \"learner.hints\": " + hints);
    }
  }
  if (j.contains("stat_learner")) {
    const nlohmann::json& s = j.at("stat_learner");
    detail::reject_unknown(s, {"kind", "beta", "fixed"}, "stat_learner.");
    const std::string kind = detail::require_field<std::string>(s, "kind", "stat_learner.");
    if (kind == "GIBBS") {
      cfg.stat.kind = StatLearnerSpec::Kind::Gibbs;
      cfg.stat.beta = detail::optional_field<double>(s, "beta", "stat_learner.", 1.0);
      if (!(cfg.stat.beta >= 0.0)) {
        throw ConfigError("field \"stat_learner.beta\" must be >= 0");
      }
    } else if (kind == "ERM") {
      cfg.stat.kind = StatLearnerSpec::Kind::Erm;
    } else if (kind == "FIXED") {
      cfg.stat.kind = StatLearnerSpec::Kind::Fixed;
      cfg.stat.fixed =
          detail::require_field<std::vector<double>>(s, "fixed", "stat_learner.");
    } else {
      throw ConfigError("unknown value for field \"stat_learner.kind\": " + kind);
    }
  }
  if (j.contains("bound_ids")) {
    cfg.bound_ids = detail::require_field<std::vector<std::string>>(j, "bound_ids", "");
    for (const std::string& id : cfg.bound_ids) {
      if (!game_bound_from_name(id)) {
        throw ConfigError("unknown value in field \"bound_ids\": " + id);
      }
    }
  }
  cfg.n = detail::optional_field<std::size_t>(j, "n", "", 50);
  if (cfg.n < 1) throw ConfigError("field \"n\" must be >= 1");
  cfg.r_count = detail::optional_field<std::size_t>(j, "R", "", 10000);
  if (cfg.r_count < 1) throw ConfigError("field \"R\" must be >= 1");
  cfg.delta = detail::optional_field<double>(j, "delta", "", 0.05);
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) {
    throw ConfigError("field \"delta\" must be in (0,1)");
  }
  cfg.seed = detail::optional_field<std::uint64_t>(j, "seed", "", 0);
  cfg.out = detail::optional_field<std::string>(j, "out", "", "");
  cfg.jobs = detail::optional_field<std::size_t>(j, "jobs", "", 1);
  if (cfg.jobs < 1) throw ConfigError("field \"jobs\" must be >= 1");
  cfg.lambda = detail::optional_field<double>(j, "lambda", "", 0.05);
  if (!(cfg.lambda > 0.0)) throw ConfigError("field \"lambda\" must be > 0");
  cfg.fixture = detail::optional_field<std::string>(j, "fixture", "", "");
  if (!cfg.fixture.empty() && cfg.fixture != "peek") {
    throw ConfigError("unknown value for field \"fixture\": " + cfg.fixture);
  }
  return cfg;
}

inline nlohmann::json serialize_config(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["command"] = cfg.command;
  if (cfg.environment) {
    nlohmann::json e;
    e["z_probs"] = cfg.environment->z_probs;
    e["loss_table"] = cfg.environment->loss_table;
    e["loss_range"] = std::vector<double>{cfg.environment->loss_lo, cfg.environment->loss_hi};
    j["environment"] = std::move(e);
  } else {
    nlohmann::json b;
    b["k_lo"] = cfg.battery.k_lo;
    b["k_hi"] = cfg.battery.k_hi;
    b["m_lo"] = cfg.battery.m_lo;
    b["m_hi"] = cfg.battery.m_hi;
    b["realizable"] = cfg.battery.realizable;
    j["battery"] = std::move(b);
  }
  nlohmann::json l;
  l["kind"] = learner_kind_name(cfg.learner.kind);
  l["eta"] = cfg.learner.eta;
  l["divergence"] = divergence_kind_name(cfg.learner.divergence);
  l["p"] = cfg.learner.p;
  l["hints"] =
      cfg.learner.hint_mode == HintProvider::Mode::Zero ? "ZERO" : "NEG_TEST_LOSS";
  j["learner"] = std::move(l);
  nlohmann::json s;
  switch (cfg.stat.kind) {
    case StatLearnerSpec::Kind::Gibbs:
      s["kind"] = "GIBBS";
      s["beta"] = cfg.stat.beta;
      break;
    case StatLearnerSpec::Kind::Erm:
      s["kind"] = "ERM";
      break;
    case StatLearnerSpec::Kind::Fixed:
      s["kind"] = "FIXED";
      s["fixed"] = cfg.stat.fixed;
      break;
  }
  j["stat_learner"] = std::move(s);
  if (!cfg.bound_ids.empty()) j["bound_ids"] = cfg.bound_ids;
  j["n"] = cfg.n;
  j["R"] = cfg.r_count;
  j["delta"] = cfg.delta;
  j["seed"] = cfg.seed;
  if (!cfg.out.empty()) j["out"] = cfg.out;
  j["jobs"] = cfg.jobs;
  j["lambda"] = cfg.lambda;
  if (!cfg.fixture.empty()) j["fixture"] = cfg.fixture;
  return j;
}

}  // namespace genlab
