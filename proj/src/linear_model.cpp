#include "psa/linear_model.hpp"

#include <cmath>
#include <string>

#include "psa/error.hpp"
#include "psa/metrics.hpp"

namespace psa {

namespace {

void check_dims(const ModelParams& params, const Matrix& features) {
  if (params.theta.size() != features.cols() + 1) {
    throw Error(ErrorCode::kDimensionMismatch,
                "theta has " + std::to_string(params.theta.size()) + " entries for " +
                    std::to_string(features.cols()) + " features (expected features + 1)");
  }
}

}  // namespace

double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::vector<double> decision_scores(const ModelParams& params, const Matrix& features) {
  check_dims(params, features);
  const auto w = params.weights();
  const double bias = params.bias();
  std::vector<double> z(features.rows());
  for (std::size_t r = 0; r < features.rows(); ++r) z[r] = linear_score(w, bias, features.row(r));
  return z;
}

std::vector<double> predict_proba(const ModelParams& params, const Matrix& features) {
  auto z = decision_scores(params, features);
  for (auto& v : z) v = sigmoid(v);
  return z;
}

BinaryVector predict(const ModelParams& params, const Matrix& features, double threshold) {
  if (threshold != kDefaultThreshold) return predict_batch(params, features, threshold).labels;
  const auto z = decision_scores(params, features);
  BinaryVector labels(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) labels[i] = label_at_half(z[i]) ? 1 : 0;
  return labels;
}

PredictionBatch predict_batch(const ModelParams& params, const Matrix& features, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "threshold must lie in (0,1)");
  }
  PredictionBatch batch;
  batch.threshold = threshold;
  batch.probs = predict_proba(params, features);
  batch.labels.resize(batch.probs.size());
  for (std::size_t i = 0; i < batch.probs.size(); ++i) {
    batch.labels[i] = batch.probs[i] >= threshold ? 1 : 0;
  }
  return batch;
}

std::vector<double> log_loss_gradient(const ModelParams& params, const Matrix& features,
                                      std::span<const std::uint8_t> y_true) {
  check_dims(params, features);
  if (y_true.size() != features.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "target length differs from feature rows");
  }
  const std::size_t d = features.cols();
  std::vector<double> grad(d + 1, 0.0);
  if (features.rows() == 0) return grad;
  const auto probs = predict_proba(params, features);
  for (std::size_t r = 0; r < features.rows(); ++r) {
    const double residual = probs[r] - static_cast<double>(y_true[r]);
    const auto x = features.row(r);
    for (std::size_t c = 0; c < d; ++c) grad[c] += residual * x[c];
    grad[d] += residual;
  }
  const double inv_n = 1.0 / static_cast<double>(features.rows());
  for (auto& g : grad) g *= inv_n;
  return grad;
}

double model_log_loss(const ModelParams& params, const Matrix& features,
                      std::span<const std::uint8_t> y_true) {
  if (y_true.size() != features.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "target length differs from feature rows");
  }
  return log_loss(y_true, predict_proba(params, features));
}

}  // namespace psa
