#include "psa/pareto_annealing.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "psa/error.hpp"
#include "psa/linear_model.hpp"
#include "psa/metrics.hpp"

namespace psa {

bool weakly_dominates(const ObjectiveValues& a, const ObjectiveValues& b) {
  return a.ba >= b.ba && a.us_dev <= b.us_dev;
}

bool dominates(const ObjectiveValues& a, const ObjectiveValues& b) {
  return weakly_dominates(a, b) && (a.ba > b.ba || a.us_dev < b.us_dev);
}

ModelParams perturb(const ModelParams& params, double beta, Rng& rng) {
  ModelParams out = params;
  if (out.theta.empty()) return out;
  std::uniform_int_distribution<std::size_t> pick(0, out.theta.size() - 1);
  const std::size_t k = pick(rng);
  std::normal_distribution<double> noise(0.0, 1.0);
  out.theta[k] += beta * noise(rng);
  return out;
}

double acceptance_probability(const ObjectiveValues& cur, const ObjectiveValues& cand,
                              double t_ba, double t_us, double lambda_ba, double lambda_us) {
  const double exponent = lambda_ba * (cand.ba - cur.ba) / t_ba +
                          lambda_us * (cur.us_dev - cand.us_dev) / t_us;
  if (!(exponent < 0.0)) return 1.0;
  return std::exp(exponent);
}

Rng chain_rng(std::uint64_t seed, int chain_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chain_id), 0x6d6f7665u};
  return Rng(seq);
}

Rng init_rng(std::uint64_t seed, int chain_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chain_id), 0x696e6974u};
  return Rng(seq);
}

ModelParams random_initial_params(std::size_t n_features, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> theta(n_features + 1);
  for (auto& v : theta) v = normal(rng);
  return ModelParams(std::move(theta));
}

ObjectiveEvaluator::ObjectiveEvaluator(const Dataset& data) : data_(&data) {}

std::optional<ObjectiveValues> ObjectiveEvaluator::operator()(const ModelParams& params) const {
  const Dataset& d = *data_;
  if (params.theta.size() != d.n_features() + 1) {
    throw Error(ErrorCode::kDimensionMismatch, "theta does not match feature count");
  }
  // Fused predict + confusion; same scores and labels as predict(). Counts
  // go into cell (group, target, label) without branching on the data.
  const auto w = params.weights();
  const double bias = params.bias();
  std::size_t cells[2][2][2] = {};
  for (std::size_t r = 0; r < d.n_samples(); ++r) {
    const int label = label_at_half(linear_score(w, bias, d.features.row(r))) ? 1 : 0;
    ++cells[d.sensitive[r] & 1][d.target[r] & 1][label];
  }
  GroupConfusion gc;
  for (int g = 0; g < 2; ++g) {
    gc.tp[g] = cells[g][1][1];
    gc.fn[g] = cells[g][1][0];
    gc.fp[g] = cells[g][0][1];
    gc.tn[g] = cells[g][0][0];
  }
  return objectives(gc);
}

ChainResult run_chain(const Dataset& train, const ModelParams& init, const AnnealConfig& cfg,
                      int chain_id) {
  cfg.validate();
  if (init.theta.size() != train.n_features() + 1) {
    throw Error(ErrorCode::kDimensionMismatch, "initial theta does not match feature count");
  }
  const ObjectiveEvaluator evaluate(train);
  const auto init_obj = evaluate(init);
  if (!init_obj) {
    throw Error(ErrorCode::kEmptyGroup,
                "objectives undefined on training data (a class or minority positives missing)");
  }

  Chain chain{Solution{init, *init_obj, chain_id, 0}, chain_rng(cfg.seed, chain_id), cfg.t_ba,
              cfg.t_us, 0};
  ChainResult result;
  result.accepted.push_back(chain.current);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::int64_t step = 0;

  while (chain.t_ba > cfg.t_min && chain.t_us > cfg.t_min) {
    chain.accepted_in_epoch = 0;
    for (int it = 0; it < cfg.iters_per_temp; ++it) {
      ++step;
      ModelParams cand = perturb(chain.current.params, cfg.beta, chain.rng);
      const auto cand_obj = evaluate(cand);
      if (!cand_obj || !cand.all_finite()) {
        ++result.degenerate_rejections;
        continue;
      }
      bool accept = weakly_dominates(*cand_obj, chain.current.objectives);
      if (!accept) {
        const double p = acceptance_probability(chain.current.objectives, *cand_obj, chain.t_ba,
                                                chain.t_us, cfg.lambda_ba, cfg.lambda_us);
        accept = p >= 1.0 || p > uniform(chain.rng);
      }
      if (accept) {
        chain.current = Solution{std::move(cand), *cand_obj, chain_id, step};
        result.accepted.push_back(chain.current);
        ++chain.accepted_in_epoch;
      }
    }
    ++result.epochs;
    if (chain.accepted_in_epoch == 0) break;
    chain.t_ba *= cfg.alpha;
    chain.t_us *= cfg.alpha;
  }
  return result;
}

namespace {

bool provenance_less(const Solution& a, const Solution& b) {
  if (a.chain_id != b.chain_id) return a.chain_id < b.chain_id;
  return a.step < b.step;
}

// Drops the most crowded interior point until the front fits; the two
// extremes always stay. Input is sorted by ba descending.
void prune_by_crowding(std::vector<Solution>& front, std::size_t capacity) {
  while (front.size() > capacity && front.size() > 2) {
    const double ba_range = front.front().objectives.ba - front.back().objectives.ba;
    const double us_range = front.front().objectives.us_dev - front.back().objectives.us_dev;
    std::size_t worst = 1;
    double worst_distance = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < front.size(); ++i) {
      double distance = 0.0;
      if (ba_range > 0.0) {
        distance += (front[i - 1].objectives.ba - front[i + 1].objectives.ba) / ba_range;
      }
      if (us_range > 0.0) {
        distance += (front[i - 1].objectives.us_dev - front[i + 1].objectives.us_dev) / us_range;
      }
      if (distance < worst_distance) {
        worst_distance = distance;
        worst = i;
      }
    }
    front.erase(front.begin() + static_cast<std::ptrdiff_t>(worst));
  }
}

}  // namespace

ParetoArchive ParetoArchive::finalize(std::vector<Solution> entries,
                                      std::optional<std::size_t> capacity) {
  if (entries.empty()) throw Error(ErrorCode::kEmptyArchive, "no solutions to filter");
  std::sort(entries.begin(), entries.end(), [](const Solution& a, const Solution& b) {
    if (a.objectives.ba != b.objectives.ba) return a.objectives.ba > b.objectives.ba;
    if (a.objectives.us_dev != b.objectives.us_dev) return a.objectives.us_dev < b.objectives.us_dev;
    return provenance_less(a, b);
  });
  // Sweep in ba-descending order; a survivor must strictly beat every
  // earlier us_dev, otherwise an earlier entry weakly dominates it.
  ParetoArchive archive;
  archive.capacity_ = capacity;
  double best_us = std::numeric_limits<double>::infinity();
  for (auto& s : entries) {
    if (s.objectives.us_dev < best_us) {
      best_us = s.objectives.us_dev;
      archive.entries_.push_back(std::move(s));
    }
  }
  if (capacity) prune_by_crowding(archive.entries_, *capacity);
  return archive;
}

ParetoArchive finalize_archive(std::vector<Solution> entries, std::optional<std::size_t> capacity) {
  return ParetoArchive::finalize(std::move(entries), capacity);
}

ParetoArchive run_psa(const Dataset& train, const AnnealConfig& cfg, PsaStats* stats) {
  cfg.validate();
  const auto n_chains = static_cast<std::size_t>(cfg.n_chains);
  std::vector<ChainResult> results(n_chains);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t c = next++; c < n_chains; c = next++) {
      try {
        Rng rng = init_rng(cfg.seed, static_cast<int>(c));
        const ModelParams init = random_initial_params(train.n_features(), rng);
        results[c] = run_chain(train, init, cfg, static_cast<int>(c));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  std::size_t n_threads = cfg.threads > 0 ? static_cast<std::size_t>(cfg.threads)
                                          : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min(n_threads, n_chains);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<Solution> all;
  PsaStats local;
  for (auto& r : results) {
    local.accepted += r.accepted.size();
    local.degenerate_rejections += r.degenerate_rejections;
    all.insert(all.end(), std::make_move_iterator(r.accepted.begin()),
               std::make_move_iterator(r.accepted.end()));
  }
  if (stats) *stats = local;
  return ParetoArchive::finalize(std::move(all), cfg.archive_capacity);
}

}  // namespace psa
