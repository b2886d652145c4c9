#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "genlab/config.hpp"
#include "genlab/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generalization-game laboratory: identity checks, regret audits, "
               "bound certification, and coverage studies"};
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed_override;
  std::optional<std::size_t> jobs_override;
  app.add_option("--config", config_path, "Path to the JSON experiment config")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--seed", seed_override, "Seed override (64-bit unsigned)");
  app.add_option("--out", out_dir, "Output directory for summary.json / replicates.csv");
  app.add_option("--jobs", jobs_override, "Worker thread count");
  CLI11_PARSE(app, argc, argv);

  try {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "cannot read config: " << config_path << "\n";
      return 2;
    }
    nlohmann::json doc = nlohmann::json::parse(in);
    genlab::ExperimentConfig cfg = genlab::parse_config(doc);
    if (seed_override) cfg.seed = *seed_override;
    if (jobs_override) cfg.jobs = *jobs_override;
    if (out_dir.empty()) {
      if (!cfg.out.empty()) {
        out_dir = cfg.out;
      } else if (const char* env_out = std::getenv("GENLAB_OUT")) {
        out_dir = env_out;
      } else {
        out_dir = ".";
      }
    }
    const int status = genlab::execute(cfg, out_dir);
    if (status != 0) {
      std::cerr << cfg.command << ": invariant check failed (see " << out_dir
                << "/summary.json)\n";
    }
    return status;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config parse error: " << e.what() << "\n";
    return 2;
  } catch (const genlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
