#pragma once

#include <cstdint>
#include <string>

#include "genlab/game.hpp"
#include "genlab/learners.hpp"
#include "genlab/rng.hpp"

namespace genlab {

// The default battery of online learners exercised by identity checks and
// audits: EWA, OPT2EWA, FTRL over KL / CHI2 / PNORM(3), and optimistic FTRL.
inline constexpr std::size_t kLearnerBatterySize = 6;

inline std::string battery_learner_name(std::size_t which) {
  switch (which) {
    case 0: return "EWA";
    case 1: return "OPT2EWA";
    case 2: return "FTRL-KL";
    case 3: return "FTRL-CHI2";
    case 4: return "FTRL-PNORM3";
    case 5: return "OPTFTRL";
  }
  return "?";
}

inline OnlineLearnerState make_battery_learner(std::size_t which, double eta,
                                               std::size_t k) {
  const ProbVector prior = ProbVector::uniform(k);
  switch (which) {
    case 0: return make_ewa(eta, prior);
    case 1: return make_opt2ewa(std::min(eta, 0.5), prior);
    case 2: return make_ftrl(LearnerKind::Ftrl, eta, DivergenceSpec::kl(prior));
    case 3: return make_ftrl(LearnerKind::Ftrl, eta, DivergenceSpec::chi2(prior));
    case 4: return make_ftrl(LearnerKind::Ftrl, eta, DivergenceSpec::pnorm(prior, 3.0));
    case 5: return make_ftrl(LearnerKind::OptFtrl, eta, DivergenceSpec::chi2(prior));
  }
  throw std::invalid_argument("make_battery_learner: index out of range");
}

inline StatLearnerSpec make_battery_stat(std::size_t which, CounterRng& rng,
                                         std::size_t k) {
  switch (which) {
    case 0: return StatLearnerSpec::gibbs(rng.uniform(0.1, 4.0), ProbVector::uniform(k));
    case 1: return StatLearnerSpec::erm();
    case 2: {
      std::vector<double> w(k);
      for (double& x : w) x = rng.uniform(0.05, 1.0);
      return StatLearnerSpec::fixed(normalized(std::move(w)));
    }
  }
  throw std::invalid_argument("make_battery_stat: index out of range");
}

}  // namespace genlab
