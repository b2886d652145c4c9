#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <catch2/catch_amalgamated.hpp>
#include <json.hpp>

#include "genlab/config.hpp"
#include "genlab/runner.hpp"
#include "genlab/serialize.hpp"

using namespace genlab;
using nlohmann::json;

namespace {
std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("genlab_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};
}  // namespace

TEST_CASE("config defaults and validation") {
  const ExperimentConfig cfg = parse_config(json{{"command", "verify-identity"}});
  CHECK(cfg.n == 50);
  CHECK(cfg.r_count == 10000);
  CHECK(cfg.delta == 0.05);
  CHECK(cfg.seed == 0);
  CHECK(cfg.jobs == 1);
  CHECK_FALSE(cfg.environment.has_value());

  const auto expect_error = [](const json& j, const std::string& needle) {
    try {
      parse_config(j);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect_error(json{{"command", "verify-identity"}, {"delta", 1.5}}, "\"delta\"");
  expect_error(json{{"command", "nope"}}, "command");
  expect_error(json{{"command", "coverage"}, {"bound_ids", {"NOPE"}}}, "bound_ids");
  expect_error(json{{"command", "coverage"}, {"typo_field", 1}}, "typo_field");
  expect_error(json{{"command", "coverage"}, {"learner", {{"kind", "EWA"}, {"oops", 1}}}},
               "learner.oops");
  expect_error(json{{"command", "coverage"}, {"n", 0}}, "\"n\"");
  expect_error(json::array(), "object");
}

TEST_CASE("config serialization round trip") {
  json j = {
      {"command", "coverage"},
      {"environment",
       {{"z_probs", {0.3, 0.7}},
        {"loss_table", {{0.1, 0.9}, {0.2, 0.8}}},
        {"loss_range", {0.0, 1.0}}}},
      {"learner", {{"kind", "FTRL"}, {"eta", 0.25}, {"divergence", "PNORM"}, {"p", 3.0}}},
      {"stat_learner", {{"kind", "GIBBS"}, {"beta", 2.0}}},
      {"bound_ids", {"VANILLA", "PNORM_B"}},
      {"n", 40},
      {"R", 100},
      {"delta", 0.1},
      {"seed", 123},
      {"jobs", 4}};
  const ExperimentConfig cfg = parse_config(j);
  const ExperimentConfig back = parse_config(serialize_config(cfg));
  CHECK(back.command == cfg.command);
  CHECK(back.learner.kind == cfg.learner.kind);
  CHECK(back.learner.eta == cfg.learner.eta);
  CHECK(back.learner.p == cfg.learner.p);
  CHECK(back.stat.beta == cfg.stat.beta);
  CHECK(back.bound_ids == cfg.bound_ids);
  CHECK(back.n == cfg.n);
  CHECK(back.r_count == cfg.r_count);
  CHECK(back.delta == cfg.delta);
  CHECK(back.seed == cfg.seed);
  REQUIRE(back.environment.has_value());
  CHECK(back.environment->z_probs == cfg.environment->z_probs);
  CHECK(back.environment->loss_table == cfg.environment->loss_table);
}

TEST_CASE("execute writes identical artifacts across job counts") {
  json j = {{"command", "verify-identity"}, {"n", 20}, {"R", 40}, {"seed", 5}};
  ExperimentConfig cfg = parse_config(j);
  TempDir d1("jobs1"), d8("jobs8");
  cfg.jobs = 1;
  CHECK(execute(cfg, d1.path.string()) == 0);
  cfg.jobs = 8;
  CHECK(execute(cfg, d8.path.string()) == 0);
  CHECK(slurp(d1.path / "summary.json") == slurp(d8.path / "summary.json"));
  CHECK(slurp(d1.path / "replicates.csv") == slurp(d8.path / "replicates.csv"));
  // The summary embeds the hash of the CSV and echoes the config sans jobs.
  const json summary = json::parse(slurp(d1.path / "summary.json"));
  CHECK(summary.at("artifact_hash").get<std::string>() ==
        detail::fnv1a_hex(slurp(d1.path / "replicates.csv")));
  CHECK_FALSE(summary.at("config").contains("jobs"));
  CHECK(summary.at("failed").get<bool>() == false);
}

TEST_CASE("peek fixture fails the regret audit") {
  json j = {{"command", "regret-audit"},
            {"n", 10},
            {"R", 20},
            {"seed", 3},
            {"fixture", "peek"}};
  const ExperimentConfig cfg = parse_config(j);
  TempDir d("peek");
  CHECK(execute(cfg, d.path.string()) == 1);
  const json summary = json::parse(slurp(d.path / "summary.json"));
  CHECK(summary.at("failed").get<bool>() == true);
  CHECK(summary.at("result").at("contract_violation").get<bool>() == true);
  // The honest run passes.
  json jh = j;
  jh.erase("fixture");
  TempDir dh("honest");
  CHECK(execute(parse_config(jh), dh.path.string()) == 0);
}

TEST_CASE("certificate artifacts serialize cleanly") {
  json j = {{"command", "certify"},
            {"environment",
             {{"z_probs", {0.3, 0.7}}, {"loss_table", {{0.1, 0.9, 0.4}, {0.2, 0.8, 0.5}}}}},
            {"stat_learner", {{"kind", "GIBBS"}, {"beta", 2.0}}},
            {"n", 30},
            {"seed", 9}};
  TempDir d("certify");
  CHECK(execute(parse_config(j), d.path.string()) == 0);
  const json summary = json::parse(slurp(d.path / "summary.json"));
  const auto& certs = summary.at("result").at("certificates");
  CHECK(certs.size() == 9);  // full default battery of bound ids
  for (const auto& c : certs) {
    CHECK(c.contains("bound_id"));
    CHECK(c.contains("terms"));
    CHECK(c.contains("valid"));
  }
  const std::string csv = slurp(d.path / "replicates.csv");
  CHECK(csv.rfind("bound_id,realized,certificate,valid\n", 0) == 0);
}
