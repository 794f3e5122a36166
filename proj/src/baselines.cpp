#include "psa/baselines.hpp"

#include <cmath>
#include <string>

#include "psa/error.hpp"
#include "psa/linear_model.hpp"
#include "psa/metrics.hpp"
#include "psa/pareto_annealing.hpp"

namespace psa {

double boltzmann_acceptance(double cur_ba, double cand_ba, double t_ba) {
  const double exponent = (cand_ba - cur_ba) / t_ba;
  if (!(exponent < 0.0)) return 1.0;
  return std::exp(exponent);
}

SaResult run_sa_ba_trace(const Dataset& train, const AnnealConfig& cfg) {
  cfg.validate();
  const ObjectiveEvaluator evaluate(train);
  Rng init_stream = init_rng(cfg.seed, 0);
  const ModelParams init = random_initial_params(train.n_features(), init_stream);
  const auto init_obj = evaluate(init);
  if (!init_obj) {
    throw Error(ErrorCode::kEmptyGroup, "objectives undefined on training data");
  }

  Rng rng = chain_rng(cfg.seed, 0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  SaResult result;
  Solution current{init, *init_obj, 0, 0};
  result.accepted.push_back(current);
  result.best = current;

  double t = cfg.t_ba;
  double t_us = cfg.t_us;  // cooled alongside only to share the stopping rule
  std::int64_t step = 0;
  while (t > cfg.t_min && t_us > cfg.t_min) {
    std::size_t accepted = 0;
    for (int it = 0; it < cfg.iters_per_temp; ++it) {
      ++step;
      ModelParams cand = perturb(current.params, cfg.beta, rng);
      const auto cand_obj = evaluate(cand);
      if (!cand_obj || !cand.all_finite()) {
        ++result.degenerate_rejections;
        continue;
      }
      const double p = boltzmann_acceptance(current.objectives.ba, cand_obj->ba, t);
      if (p >= 1.0 || p > uniform(rng)) {
        current = Solution{std::move(cand), *cand_obj, 0, step};
        result.accepted.push_back(current);
        if (current.objectives.ba > result.best.objectives.ba) result.best = current;
        ++accepted;
      }
    }
    if (accepted == 0) break;
    t *= cfg.alpha;
    t_us *= cfg.alpha;
  }
  return result;
}

Solution run_sa_ba(const Dataset& train, const AnnealConfig& cfg) {
  return run_sa_ba_trace(train, cfg).best;
}

void SgdConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidConfig, what); };
  // A zero learning rate is allowed and leaves theta untouched.
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) fail("learning_rate must be >= 0");
  if (max_epochs < 1) fail("max_epochs must be >= 1");
  if (!(tol > 0.0)) fail("tol must be > 0");
}

namespace {

constexpr int kDivergencePatience = 10;

// Loss and gradient from a single pass over the rows.
double loss_and_gradient(const ModelParams& params, const Matrix& x,
                         std::span<const std::uint8_t> y, std::vector<double>& grad) {
  const auto probs = predict_proba(params, x);
  const std::size_t d = x.cols();
  std::fill(grad.begin(), grad.end(), 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const double residual = probs[r] - static_cast<double>(y[r]);
    const auto row = x.row(r);
    for (std::size_t c = 0; c < d; ++c) grad[c] += residual * row[c];
    grad[d] += residual;
  }
  const double inv_n = 1.0 / static_cast<double>(x.rows());
  for (auto& g : grad) g *= inv_n;
  return log_loss(y, probs);
}

}  // namespace

GdResult run_gd_logloss_trace(const Dataset& train, const SgdConfig& cfg) {
  cfg.validate();
  const std::size_t d = train.n_features();
  if (train.n_samples() == 0) throw Error(ErrorCode::kEmptyGroup, "empty training data");
  ModelParams params = cfg.init.empty() ? ModelParams::zeros(d) : ModelParams(cfg.init);
  if (params.theta.size() != d + 1) {
    throw Error(ErrorCode::kDimensionMismatch, "initial theta does not match feature count");
  }

  GdResult result;
  std::vector<double> grad(d + 1);
  double loss = loss_and_gradient(params, train.features, train.target, grad);
  result.loss_history.push_back(loss);
  int increases = 0;
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    for (std::size_t k = 0; k <= d; ++k) params.theta[k] -= cfg.learning_rate * grad[k];
    const double next = loss_and_gradient(params, train.features, train.target, grad);
    result.loss_history.push_back(next);
    ++result.epochs;
    if (!std::isfinite(next)) {
      throw Error(ErrorCode::kDivergence, "log-loss became non-finite at epoch " +
                                              std::to_string(epoch + 1));
    }
    const double improvement = loss - next;
    loss = next;
    if (improvement < 0.0) {
      if (++increases >= kDivergencePatience) {
        throw Error(ErrorCode::kDivergence,
                    "log-loss increased for " + std::to_string(kDivergencePatience) +
                        " consecutive epochs (last " + std::to_string(next) +
                        "); lower the learning rate");
      }
      continue;
    }
    increases = 0;
    if (improvement < cfg.tol) break;
  }

  const auto labels = predict(params, train.features);
  const auto obj = objectives(train.target, labels, train.sensitive);
  if (!obj) throw Error(ErrorCode::kEmptyGroup, "objectives undefined on training data");
  result.solution = Solution{std::move(params), *obj, 0, result.epochs};
  return result;
}

Solution run_gd_logloss(const Dataset& train, const SgdConfig& cfg) {
  return run_gd_logloss_trace(train, cfg).solution;
}

}  // namespace psa
