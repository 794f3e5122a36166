#include "psa/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "psa/error.hpp"

namespace psa {

GroupConfusion confusion(std::span<const std::uint8_t> y_true, std::span<const std::uint8_t> y_pred,
                         std::span<const std::uint8_t> sensitive) {
  if (y_true.size() != y_pred.size() || y_true.size() != sensitive.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "confusion inputs have lengths " + std::to_string(y_true.size()) + ", " +
                    std::to_string(y_pred.size()) + ", " + std::to_string(sensitive.size()));
  }
  GroupConfusion gc;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const int g = sensitive[i] ? 1 : 0;
    if (y_true[i]) {
      ++(y_pred[i] ? gc.tp : gc.fn)[g];
    } else {
      ++(y_pred[i] ? gc.fp : gc.tn)[g];
    }
  }
  return gc;
}

std::optional<double> disparate_impact(const GroupConfusion& gc) {
  const auto n0 = gc.group_size(0);
  const auto n1 = gc.group_size(1);
  const auto pos1 = gc.predicted_positive(1);
  if (n0 == 0 || n1 == 0 || pos1 == 0) return std::nullopt;
  const double rate0 = static_cast<double>(gc.predicted_positive(0)) / static_cast<double>(n0);
  const double rate1 = static_cast<double>(pos1) / static_cast<double>(n1);
  return rate0 / rate1;
}

std::optional<double> underestimation_score(const GroupConfusion& gc) {
  // Both rates share the minority group size, which cancels.
  const auto actual = gc.actual_positive(0);
  if (actual == 0) return std::nullopt;
  return static_cast<double>(gc.predicted_positive(0)) / static_cast<double>(actual);
}

std::optional<double> balanced_accuracy(const GroupConfusion& gc) {
  const double tp = static_cast<double>(gc.tp[0] + gc.tp[1]);
  const double fn = static_cast<double>(gc.fn[0] + gc.fn[1]);
  const double tn = static_cast<double>(gc.tn[0] + gc.tn[1]);
  const double fp = static_cast<double>(gc.fp[0] + gc.fp[1]);
  if (tp + fn == 0.0 || tn + fp == 0.0) return std::nullopt;
  return 0.5 * (tp / (tp + fn) + tn / (tn + fp));
}

double log_loss(std::span<const std::uint8_t> y_true, std::span<const double> probs) {
  if (y_true.size() != probs.size()) {
    throw Error(ErrorCode::kShapeMismatch, "log_loss inputs differ in length");
  }
  if (y_true.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const double p = std::clamp(probs[i], kLogLossEpsilon, 1.0 - kLogLossEpsilon);
    total -= y_true[i] ? std::log(p) : std::log1p(-p);
  }
  return total / static_cast<double>(y_true.size());
}

std::optional<ObjectiveValues> objectives(const GroupConfusion& gc) {
  const auto ba = balanced_accuracy(gc);
  const auto us = underestimation_score(gc);
  if (!ba || !us) return std::nullopt;
  return ObjectiveValues{*ba, std::abs(1.0 - *us), *us};
}

std::optional<ObjectiveValues> objectives(std::span<const std::uint8_t> y_true,
                                          std::span<const std::uint8_t> y_pred,
                                          std::span<const std::uint8_t> sensitive) {
  return objectives(confusion(y_true, y_pred, sensitive));
}

}  // namespace psa
