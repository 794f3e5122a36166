#ifndef PSA_BASELINES_HPP_
#define PSA_BASELINES_HPP_

#include <cstdint>
#include <vector>

#include "psa/data_model.hpp"

namespace psa {

// Single-objective annealing on balanced accuracy with Boltzmann acceptance
// min{1, exp((cand.ba - cur.ba) / t_ba)}. Uses chain 0's random streams, so
// its trace matches a one-chain Pareto run with lambda_us = 0.
struct SaResult {
  Solution best;
  std::vector<Solution> accepted;
  std::size_t degenerate_rejections = 0;
};

double boltzmann_acceptance(double cur_ba, double cand_ba, double t_ba);

SaResult run_sa_ba_trace(const Dataset& train, const AnnealConfig& cfg);
Solution run_sa_ba(const Dataset& train, const AnnealConfig& cfg);

struct SgdConfig {
  double learning_rate = 0.1;
  int max_epochs = 10000;
  double tol = 1e-8;
  std::uint64_t seed = 0;
  // Initial theta; zeros when empty.
  std::vector<double> init;

  void validate() const;
};

struct GdResult {
  Solution solution;
  std::vector<double> loss_history;  // loss before each epoch, then the final loss
  int epochs = 0;
};

// Full-batch gradient descent on the mean log-loss. Throws Error(kDivergence)
// after 10 consecutive loss increases.
GdResult run_gd_logloss_trace(const Dataset& train, const SgdConfig& cfg);
Solution run_gd_logloss(const Dataset& train, const SgdConfig& cfg);

}  // namespace psa

#endif  // PSA_BASELINES_HPP_
