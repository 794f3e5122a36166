#ifndef PSA_PARETO_ANNEALING_HPP_
#define PSA_PARETO_ANNEALING_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "psa/data_model.hpp"

namespace psa {

using Rng = std::mt19937_64;

// a is at least as good as b on both objectives.
bool weakly_dominates(const ObjectiveValues& a, const ObjectiveValues& b);

// a is at least as good on both objectives and strictly better on one.
bool dominates(const ObjectiveValues& a, const ObjectiveValues& b);

// Adds Normal(0, beta^2) noise to one uniformly chosen coordinate. Always
// consumes one index draw and one standard-normal draw from rng.
ModelParams perturb(const ModelParams& params, double beta, Rng& rng);

// min{1, exp(lambda_ba (cand.ba - cur.ba) / t_ba
//            + lambda_us (cur.us_dev - cand.us_dev) / t_us)}
double acceptance_probability(const ObjectiveValues& cur, const ObjectiveValues& cand,
                              double t_ba, double t_us, double lambda_ba, double lambda_us);

// Move generator stream and initial-solution stream for one chain. Both are
// pure functions of (seed, chain_id), so results never depend on scheduling.
Rng chain_rng(std::uint64_t seed, int chain_id);
Rng init_rng(std::uint64_t seed, int chain_id);

// theta ~ Normal(0, 1) i.i.d., intercept included.
ModelParams random_initial_params(std::size_t n_features, Rng& rng);

// Evaluates both objectives of a parameter vector on a fixed dataset with the
// 0.5 decision threshold. Returns nullopt for degenerate metric denominators.
class ObjectiveEvaluator {
 public:
  explicit ObjectiveEvaluator(const Dataset& data);

  std::optional<ObjectiveValues> operator()(const ModelParams& params) const;

  const Dataset& data() const noexcept { return *data_; }

 private:
  const Dataset* data_;
};

// One annealing trajectory.
struct Chain {
  Solution current;
  Rng rng;
  double t_ba = 0.0;
  double t_us = 0.0;
  std::size_t accepted_in_epoch = 0;
};

struct ChainResult {
  // Every accepted state in order, starting with the initial solution.
  std::vector<Solution> accepted;
  std::size_t degenerate_rejections = 0;
  int epochs = 0;
};

// Runs the cooling loop of one chain on train data. Throws Error(kInvalidConfig)
// on bad configs and Error(kEmptyGroup) if the initial solution is degenerate.
ChainResult run_chain(const Dataset& train, const ModelParams& init, const AnnealConfig& cfg,
                      int chain_id);

class ParetoArchive {
 public:
  ParetoArchive() = default;

  // Keeps exactly the entries not weakly dominated by another entry. Among
  // identical objective pairs the earliest (chain_id, step) survives. Output
  // is sorted by ba descending. Throws Error(kEmptyArchive) on empty input.
  static ParetoArchive finalize(std::vector<Solution> entries,
                                std::optional<std::size_t> capacity = std::nullopt);

  const std::vector<Solution>& entries() const noexcept { return entries_; }
  std::optional<std::size_t> capacity() const noexcept { return capacity_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

 private:
  std::vector<Solution> entries_;
  std::optional<std::size_t> capacity_;
};

ParetoArchive finalize_archive(std::vector<Solution> entries,
                               std::optional<std::size_t> capacity = std::nullopt);

struct PsaStats {
  std::size_t accepted = 0;
  std::size_t degenerate_rejections = 0;
};

// Runs cfg.n_chains independent chains (concurrently when threads allow) and
// filters the union of their accepted states.
ParetoArchive run_psa(const Dataset& train, const AnnealConfig& cfg, PsaStats* stats = nullptr);

}  // namespace psa

#endif  // PSA_PARETO_ANNEALING_HPP_
