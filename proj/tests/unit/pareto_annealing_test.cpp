#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "psa/error.hpp"
#include "psa/linear_model.hpp"
#include "psa/metrics.hpp"
#include "psa/pareto_annealing.hpp"

namespace {

using psa::ObjectiveValues;

ObjectiveValues ov(double ba, double us_dev) { return {ba, us_dev, 1.0 - us_dev}; }

psa::Solution sol(double ba, double us_dev, int chain = 0, std::int64_t step = 0) {
  return psa::Solution{psa::ModelParams::zeros(1), ov(ba, us_dev), chain, step};
}

psa::AnnealConfig quick_config() {
  psa::AnnealConfig cfg;
  cfg.n_chains = 4;
  cfg.iters_per_temp = 20;
  cfg.alpha = 0.8;
  cfg.t_min = 1e-3;
  cfg.seed = 99;
  return cfg;
}

TEST(Dominance, KnownValues) {
  EXPECT_TRUE(psa::dominates(ov(0.9, 0.0), ov(0.8, 0.1)));
  EXPECT_FALSE(psa::dominates(ov(0.9, 0.2), ov(0.8, 0.1)));
  EXPECT_FALSE(psa::dominates(ov(0.8, 0.1), ov(0.9, 0.2)));
  EXPECT_FALSE(psa::dominates(ov(0.9, 0.1), ov(0.9, 0.1)));
  EXPECT_TRUE(psa::weakly_dominates(ov(0.9, 0.1), ov(0.9, 0.1)));
  EXPECT_TRUE(psa::dominates(ov(0.9, 0.1), ov(0.9, 0.2)));
}

TEST(Perturb, ChangesExactlyOneCoordinate) {
  psa::Rng rng(1);
  const psa::ModelParams p({0.1, 0.2, 0.3, 0.4, 0.5});
  for (int i = 0; i < 1000; ++i) {
    const auto q = psa::perturb(p, 0.5, rng);
    int changed = 0;
    for (std::size_t k = 0; k < p.theta.size(); ++k) changed += q.theta[k] != p.theta[k];
    EXPECT_LE(changed, 1);
  }
}

TEST(Perturb, CoordinateSelectionIsUniform) {
  psa::Rng rng(2);
  const psa::ModelParams p(std::vector<double>(5, 0.0));
  std::vector<int> hits(5, 0);
  for (int i = 0; i < 10000; ++i) {
    const auto q = psa::perturb(p, 1.0, rng);
    for (std::size_t k = 0; k < 5; ++k) hits[k] += q.theta[k] != 0.0;
  }
  double chi2 = 0.0;
  for (int h : hits) {
    EXPECT_NEAR(h, 2000, 200);
    chi2 += (h - 2000.0) * (h - 2000.0) / 2000.0;
  }
  EXPECT_LT(chi2, 18.47);  // 4 degrees of freedom, p = 0.001
}

TEST(Perturb, NoiseScalesWithBeta) {
  psa::Rng rng(3);
  const psa::ModelParams p({1.0, -1.0, 2.0});
  const double beta = 1e-9;
  double sum_sq = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const auto q = psa::perturb(p, beta, rng);
    for (std::size_t k = 0; k < 3; ++k) {
      const double delta = q.theta[k] - p.theta[k];
      EXPECT_LE(std::abs(delta), 6 * beta + 1e-15);
    }
    const auto r = psa::perturb(p, 1.0, rng);
    for (std::size_t k = 0; k < 3; ++k) sum_sq += (r.theta[k] - p.theta[k]) * (r.theta[k] - p.theta[k]);
  }
  EXPECT_NEAR(sum_sq / 20000.0, 1.0, 0.05);
}

TEST(Perturb, ZeroBetaLeavesThetaButAdvancesStream) {
  psa::Rng a(4), b(4);
  const psa::ModelParams p({1.0, 2.0});
  EXPECT_EQ(psa::perturb(p, 0.0, a), p);
  psa::perturb(p, 0.5, b);
  EXPECT_EQ(a(), b());
}

TEST(Perturb, DeterministicForSeed) {
  psa::Rng a(5), b(5);
  psa::ModelParams p({0.0, 0.0, 0.0}), q = p;
  for (int i = 0; i < 100; ++i) {
    p = psa::perturb(p, 0.3, a);
    q = psa::perturb(q, 0.3, b);
    EXPECT_EQ(p, q);
  }
}

TEST(Acceptance, KnownValues) {
  EXPECT_EQ(psa::acceptance_probability(ov(0.8, 0.1), ov(0.9, 0.0), 0.1, 0.1, 1, 1), 1.0);
  EXPECT_NEAR(psa::acceptance_probability(ov(0.8, 0.0), ov(0.7, 0.0), 0.1, 1.0, 1, 1),
              std::exp(-1.0), 1e-12);
  EXPECT_GT(psa::acceptance_probability(ov(0.9, 0.0), ov(0.1, 0.9), 1e9, 1e9, 1, 1), 0.999);
}

TEST(Acceptance, ZeroTemperatureLimit) {
  EXPECT_LT(psa::acceptance_probability(ov(0.8, 0.1), ov(0.79, 0.1), 1e-9, 1e-9, 1, 1), 1e-6);
  EXPECT_LT(psa::acceptance_probability(ov(0.8, 0.1), ov(0.8, 0.11), 1e-9, 1e-9, 1, 1), 1e-6);
}

TEST(Acceptance, DominatingCandidatesAlwaysAccepted) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const auto cur = ov(u(rng), u(rng));
    const auto cand = ov(cur.ba + u(rng) * (1 - cur.ba), cur.us_dev * u(rng));
    EXPECT_EQ(psa::acceptance_probability(cur, cand, u(rng) + 1e-6, u(rng) + 1e-6, 1, 1), 1.0);
  }
}

TEST(Acceptance, MonotoneInEachObjective) {
  const auto cur = ov(0.7, 0.2);
  for (double t : {1e-3, 0.05, 1.0}) {
    for (double us = 0.0; us <= 1.0; us += 0.05) {
      double prev = 0.0;
      for (double ba = 0.0; ba <= 1.0; ba += 0.05) {
        const double p = psa::acceptance_probability(cur, ov(ba, us), t, 2 * t, 1.0, 0.5);
        EXPECT_GE(p, prev);
        EXPECT_GE(p, 0.0);
        EXPECT_LE(p, 1.0);
        prev = p;
      }
    }
    for (double ba = 0.0; ba <= 1.0; ba += 0.05) {
      double prev = 1.0;
      for (double us = 0.0; us <= 1.0; us += 0.05) {
        const double p = psa::acceptance_probability(cur, ov(ba, us), t, 2 * t, 1.0, 0.5);
        EXPECT_LE(p, prev);
        prev = p;
      }
    }
  }
}

TEST(ChainRng, StreamsDifferPerChainAndPurpose) {
  EXPECT_NE(psa::chain_rng(1, 0)(), psa::chain_rng(1, 1)());
  EXPECT_NE(psa::chain_rng(1, 0)(), psa::init_rng(1, 0)());
  EXPECT_NE(psa::chain_rng(1, 0)(), psa::chain_rng(2, 0)());
  EXPECT_EQ(psa::chain_rng(1, 3)(), psa::chain_rng(1, 3)());
}

TEST(Evaluator, MatchesPredictAndConfusion) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const auto d = fixture::random_dataset(60, 3, rng);
    psa::Rng init(trial);
    const auto params = psa::random_initial_params(3, init);
    const auto fused = psa::ObjectiveEvaluator(d)(params);
    const auto ref = psa::objectives(d.target, psa::predict(params, d.features), d.sensitive);
    ASSERT_EQ(fused.has_value(), ref.has_value());
    if (fused) {
      EXPECT_EQ(*fused, *ref);
    }
  }
}

TEST(Evaluator, DimensionMismatch) {
  std::mt19937_64 rng(8);
  const auto d = fixture::random_dataset(10, 2, rng);
  const psa::ObjectiveEvaluator evaluate(d);
  EXPECT_THROW(evaluate(psa::ModelParams::zeros(3)), psa::Error);
}

TEST(RunChain, ZeroBetaStaysAtInitialSolution) {
  std::mt19937_64 rng(9);
  const auto d = fixture::random_dataset(50, 2, rng);
  auto cfg = quick_config();
  cfg.beta = 0.0;
  cfg.alpha = 0.5;
  cfg.t_ba = 0.2;
  cfg.t_us = 0.2;
  cfg.t_min = 0.01;
  const psa::ModelParams init({0.3, -0.2, 0.1});
  const auto result = psa::run_chain(d, init, cfg, 0);
  EXPECT_EQ(result.epochs, 5);  // 0.2 -> 0.0125 in five halvings above 0.01
  for (const auto& s : result.accepted) EXPECT_EQ(s.params, init);
  const auto archive = psa::finalize_archive(result.accepted);
  ASSERT_EQ(archive.size(), 1u);
  EXPECT_EQ(archive.entries()[0].step, 0);
  EXPECT_EQ(archive.entries()[0].params, init);
}

TEST(RunChain, RecordsEveryAcceptedState) {
  std::mt19937_64 rng(10);
  const auto d = fixture::random_dataset(80, 2, rng);
  const auto cfg = quick_config();
  const psa::ModelParams init({0.5, 0.5, 0.0});
  const auto result = psa::run_chain(d, init, cfg, 3);
  ASSERT_FALSE(result.accepted.empty());
  EXPECT_EQ(result.accepted.front().params, init);
  EXPECT_EQ(result.accepted.front().step, 0);
  const psa::ObjectiveEvaluator evaluate(d);
  for (std::size_t i = 0; i < result.accepted.size(); ++i) {
    const auto& s = result.accepted[i];
    EXPECT_EQ(s.chain_id, 3);
    if (i > 0) {
      EXPECT_GT(s.step, result.accepted[i - 1].step);
    }
    EXPECT_EQ(*evaluate(s.params), s.objectives);
  }
  EXPECT_LE(result.epochs, 31);  // 0.2 * 0.8^k > 1e-3 for k <= 23
}

TEST(RunChain, SingleObjectiveNeverEndsBelowStart) {
  std::mt19937_64 rng(11);
  const auto d = fixture::random_dataset(100, 3, rng);
  auto cfg = quick_config();
  cfg.lambda_us = 0.0;
  const psa::ModelParams init({-1.0, 0.5, 0.2, 0.1});
  const auto result = psa::run_chain(d, init, cfg, 0);
  double best = 0.0;
  for (const auto& s : result.accepted) best = std::max(best, s.objectives.ba);
  EXPECT_GE(best, result.accepted.front().objectives.ba);
}

TEST(RunChain, DegenerateTrainingDataRejected) {
  std::mt19937_64 rng(12);
  auto d = fixture::random_dataset(30, 2, rng);
  for (std::size_t i = 0; i < d.n_samples(); ++i) {
    if (d.sensitive[i] == 0) d.target[i] = 0;
  }
  try {
    psa::run_chain(d, psa::ModelParams::zeros(2), quick_config(), 0);
    FAIL();
  } catch (const psa::Error& e) {
    EXPECT_EQ(e.code(), psa::ErrorCode::kEmptyGroup);
  }
}

TEST(RunChain, InvalidInputs) {
  std::mt19937_64 rng(13);
  const auto d = fixture::random_dataset(30, 2, rng);
  EXPECT_THROW(psa::run_chain(d, psa::ModelParams::zeros(3), quick_config(), 0), psa::Error);
  auto cfg = quick_config();
  cfg.alpha = 1.5;
  EXPECT_THROW(psa::run_chain(d, psa::ModelParams::zeros(2), cfg, 0), psa::Error);
}

TEST(Finalize, KnownValues) {
  auto a = psa::finalize_archive({sol(0.9, 0.3), sol(0.8, 0.1), sol(0.85, 0.05)});
  ASSERT_EQ(a.size(), 2u);
  // (0.85, 0.05) dominates (0.8, 0.1).
  EXPECT_EQ(a.entries()[0].objectives.ba, 0.9);
  EXPECT_EQ(a.entries()[1].objectives.ba, 0.85);

  a = psa::finalize_archive({sol(0.9, 0.3), sol(0.8, 0.01), sol(0.85, 0.05)});
  ASSERT_EQ(a.size(), 3u);
  EXPECT_EQ(a.entries()[2].objectives.ba, 0.8);

  a = psa::finalize_archive({sol(0.9, 0.1), sol(0.8, 0.2)});
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a.entries()[0].objectives.ba, 0.9);
}

TEST(Finalize, DuplicatesKeepEarliestProvenance) {
  const auto a = psa::finalize_archive({sol(0.7, 0.2, 2, 5), sol(0.7, 0.2, 1, 9),
                                        sol(0.7, 0.2, 1, 3), sol(0.6, 0.1, 0, 1)});
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a.entries()[0].chain_id, 1);
  EXPECT_EQ(a.entries()[0].step, 3);
}

TEST(Finalize, EmptyArchive) {
  try {
    psa::finalize_archive({});
    FAIL();
  } catch (const psa::Error& e) {
    EXPECT_EQ(e.code(), psa::ErrorCode::kEmptyArchive);
  }
}

TEST(Finalize, MatchesQuadraticOracle) {
  std::mt19937_64 rng(14);
  std::uniform_int_distribution<int> grid(0, 40);
  std::uniform_int_distribution<int> chain(0, 3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<psa::Solution> entries;
    std::vector<oracle::Point> pts;
    for (int i = 0; i < 200; ++i) {
      const double ba = grid(rng) / 40.0, us = grid(rng) / 40.0;
      const int c = chain(rng);
      entries.push_back(sol(ba, us, c, i));
      pts.push_back({ba, us, c, i});
    }
    const auto got = psa::finalize_archive(entries);
    const auto want = oracle::nondominated(pts);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < want.size(); ++i) {
      EXPECT_EQ(got.entries()[i].objectives.ba, want[i].ba);
      EXPECT_EQ(got.entries()[i].objectives.us_dev, want[i].us_dev);
      EXPECT_EQ(got.entries()[i].chain_id, want[i].chain_id);
      EXPECT_EQ(got.entries()[i].step, want[i].step);
    }
  }
}

TEST(Finalize, CapacityKeepsExtremes) {
  std::vector<psa::Solution> entries;
  for (int i = 0; i <= 20; ++i) entries.push_back(sol(1.0 - i * 0.01, 0.5 - i * 0.02, 0, i));
  const auto a = psa::finalize_archive(entries, 5);
  ASSERT_EQ(a.size(), 5u);
  EXPECT_EQ(a.entries().front().objectives.ba, 1.0);
  EXPECT_EQ(a.entries().back().step, 20);
  for (std::size_t i = 1; i < a.size(); ++i) {
    EXPECT_GT(a.entries()[i - 1].objectives.ba, a.entries()[i].objectives.ba);
    EXPECT_GT(a.entries()[i - 1].objectives.us_dev, a.entries()[i].objectives.us_dev);
  }
}

TEST(RunPsa, SingleChainEqualsFilteredRunChain) {
  std::mt19937_64 rng(15);
  const auto d = fixture::random_dataset(80, 2, rng);
  auto cfg = quick_config();
  cfg.n_chains = 1;
  psa::Rng init = psa::init_rng(cfg.seed, 0);
  const auto chain = psa::run_chain(d, psa::random_initial_params(2, init), cfg, 0);
  const auto archive = psa::run_psa(d, cfg);
  EXPECT_EQ(archive.entries(), psa::finalize_archive(chain.accepted).entries());
}

TEST(RunPsa, IdenticalAcrossThreadCounts) {
  std::mt19937_64 rng(16);
  const auto d = fixture::random_dataset(150, 3, rng);
  auto cfg = quick_config();
  cfg.n_chains = 7;
  cfg.threads = 1;
  psa::PsaStats base_stats;
  const auto base = psa::run_psa(d, cfg, &base_stats);
  for (int threads : {2, 3, 8, 0}) {
    cfg.threads = threads;
    psa::PsaStats stats;
    const auto other = psa::run_psa(d, cfg, &stats);
    EXPECT_EQ(other.entries(), base.entries()) << threads << " threads";
    EXPECT_EQ(stats.accepted, base_stats.accepted);
  }
}

TEST(RunPsa, ArchiveReevaluatesExactly) {
  std::mt19937_64 rng(17);
  const auto d = fixture::random_dataset(200, 3, rng);
  const auto archive = psa::run_psa(d, quick_config());
  const psa::ObjectiveEvaluator evaluate(d);
  for (const auto& s : archive.entries()) {
    const auto labels = psa::predict(s.params, d.features);
    EXPECT_EQ(*psa::objectives(d.target, labels, d.sensitive), s.objectives);
    EXPECT_EQ(*evaluate(s.params), s.objectives);
  }
  for (std::size_t i = 1; i < archive.size(); ++i) {
    EXPECT_FALSE(psa::weakly_dominates(archive.entries()[i - 1].objectives,
                                       archive.entries()[i].objectives));
  }
}

TEST(RunPsa, SmallInstanceNearGridFront) {
  std::mt19937_64 rng(18);
  const auto d = fixture::random_dataset(20, 2, rng);
  const auto front = oracle::grid_front(d);
  psa::AnnealConfig cfg;
  cfg.seed = 5;
  const auto archive = psa::run_psa(d, cfg);
  double best_ba = 0.0;
  for (const auto& s : archive.entries()) best_ba = std::max(best_ba, s.objectives.ba);
  EXPECT_GE(best_ba, front.front().ba - 0.05);
  for (const auto& g : front) {
    bool covered = false;
    for (const auto& s : archive.entries()) {
      covered = covered || (s.objectives.ba >= g.ba - 0.05 && s.objectives.us_dev <= g.us_dev + 0.05);
    }
    EXPECT_TRUE(covered) << "grid point (" << g.ba << ", " << g.us_dev << ")";
  }
}

}  // namespace
