#pragma once

#include <cstdio>
#include <string>

#include <json.hpp>

#include "genlab/bounds.hpp"
#include "genlab/game.hpp"
#include "genlab/measures.hpp"

namespace genlab {

inline constexpr int kArtifactVersion = 1;

// Shortest round-trip decimal for CSV cells (17 significant digits).
inline std::string csv_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

inline nlohmann::json to_json(const ProbVector& p) { return nlohmann::json(p.w); }
inline nlohmann::json to_json(const CostVector& c) { return nlohmann::json(c.v); }

inline nlohmann::json to_json(const GameTranscript& tr) {
  nlohmann::json j;
  j["version"] = kArtifactVersion;
  j["n"] = tr.n;
  j["seed"] = tr.seed;
  j["sample"] = tr.sample;
  nlohmann::json preds = nlohmann::json::array();
  for (const auto& p : tr.predictions) preds.push_back(p.w);
  j["predictions"] = std::move(preds);
  nlohmann::json costs = nlohmann::json::array();
  for (const auto& c : tr.costs) costs.push_back(c.v);
  j["costs"] = std::move(costs);
  j["posterior"] = tr.posterior.w;
  j["gen"] = tr.gen;
  j["regret_vs_posterior"] = tr.regret_vs_posterior;
  j["martingale_avg"] = tr.martingale_avg;
  j["contract_violation"] = tr.contract_violation;
  return j;
}

inline nlohmann::json to_json(const ConditionalTranscript& tr) {
  nlohmann::json j = to_json(static_cast<const GameTranscript&>(tr));
  j["supersample"] = tr.supersample;
  j["flips"] = tr.flips;
  j["emp_gen"] = tr.emp_gen;
  j["delta"] = tr.delta;
  return j;
}

inline nlohmann::json to_json(const BoundCertificate& cert) {
  nlohmann::json j;
  j["version"] = kArtifactVersion;
  j["bound_id"] = cert.bound_id;
  j["value"] = cert.value();
  j["valid"] = cert.valid;
  nlohmann::json terms = nlohmann::json::object();
  for (const auto& [name, v] : cert.terms) terms[name] = v;
  j["terms"] = std::move(terms);
  nlohmann::json info = nlohmann::json::object();
  for (const auto& [name, v] : cert.info) info[name] = v;
  j["info"] = std::move(info);
  return j;
}

inline nlohmann::json to_json(const CoverageReport& rep) {
  nlohmann::json j;
  j["version"] = kArtifactVersion;
  j["bound_id"] = rep.bound_id;
  j["trials"] = rep.trials;
  j["violations"] = rep.violations;
  j["empirical_rate"] = rep.empirical_rate;
  j["delta"] = rep.delta;
  j["binomial_3sigma"] = rep.binomial_3sigma;
  return j;
}

inline std::string coverage_csv_header() {
  return "seed,realized,certificate,violated\n";
}

inline std::string coverage_csv_row(const CoverageRow& row) {
  return std::to_string(row.seed) + "," + csv_double(row.realized) + "," +
         csv_double(row.certificate) + "," + (row.violated ? "1" : "0") + "\n";
}

}  // namespace genlab
