#ifndef PSA_LINEAR_MODEL_HPP_
#define PSA_LINEAR_MODEL_HPP_

#include <span>
#include <vector>

#include "psa/data_model.hpp"

namespace psa {

inline constexpr double kDefaultThreshold = 0.5;

struct PredictionBatch {
  std::vector<double> probs;
  BinaryVector labels;
  double threshold = kDefaultThreshold;
};

// Logistic function evaluated through exp(-|z|) so it never overflows.
double sigmoid(double z);

// theta_w . x + theta_bias, accumulated left to right. Every prediction path
// goes through this so scores agree bit for bit.
inline double linear_score(std::span<const double> weights, double bias,
                           std::span<const double> x) {
  double acc = 0.0;
  for (std::size_t c = 0; c < weights.size(); ++c) acc += weights[c] * x[c];
  return acc + bias;
}

// sigmoid(z) >= 0.5 holds for every z >= 0 and fails for z < -1e-8, so the
// sigmoid is only evaluated in the band where rounding could matter.
inline bool label_at_half(double z) {
  return z >= 0.0 || (z > -1e-8 && sigmoid(z) >= 0.5);
}

// theta_w . x + theta_bias for every row. Throws Error(kDimensionMismatch).
std::vector<double> decision_scores(const ModelParams& params, const Matrix& features);

std::vector<double> predict_proba(const ModelParams& params, const Matrix& features);

// labels[i] = 1 iff probs[i] >= threshold.
BinaryVector predict(const ModelParams& params, const Matrix& features,
                     double threshold = kDefaultThreshold);

PredictionBatch predict_batch(const ModelParams& params, const Matrix& features,
                              double threshold = kDefaultThreshold);

// Gradient of the mean log-loss, (1/n) X_aug^T (p - y); the last component
// belongs to the intercept.
std::vector<double> log_loss_gradient(const ModelParams& params, const Matrix& features,
                                      std::span<const std::uint8_t> y_true);

// Mean log-loss of the model on (features, y_true).
double model_log_loss(const ModelParams& params, const Matrix& features,
                      std::span<const std::uint8_t> y_true);

}  // namespace psa

#endif  // PSA_LINEAR_MODEL_HPP_
