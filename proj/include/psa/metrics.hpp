#ifndef PSA_METRICS_HPP_
#define PSA_METRICS_HPP_

#include <array>
#include <cstddef>
#include <optional>
#include <span>

#include "psa/data_model.hpp"

namespace psa {

// Confusion counts split by sensitive group (index 0 = minority, 1 = majority).
struct GroupConfusion {
  std::array<std::size_t, 2> tp{};
  std::array<std::size_t, 2> fp{};
  std::array<std::size_t, 2> tn{};
  std::array<std::size_t, 2> fn{};

  std::size_t group_size(int g) const { return tp[g] + fp[g] + tn[g] + fn[g]; }
  std::size_t total() const { return group_size(0) + group_size(1); }
  std::size_t predicted_positive(int g) const { return tp[g] + fp[g]; }
  std::size_t actual_positive(int g) const { return tp[g] + fn[g]; }

  friend bool operator==(const GroupConfusion&, const GroupConfusion&) = default;
};

// Throws Error(kShapeMismatch) on unequal lengths.
GroupConfusion confusion(std::span<const std::uint8_t> y_true, std::span<const std::uint8_t> y_pred,
                         std::span<const std::uint8_t> sensitive);

// The ratio-valued metrics below return std::nullopt when their denominator is
// zero; callers must treat that as "undefined", never as infinity.

// P[Yhat=1 | S!=1] / P[Yhat=1 | S=1]. Compare against the 80% rule threshold.
std::optional<double> disparate_impact(const GroupConfusion& gc);

inline constexpr double kDisparateImpactThreshold = 0.8;

// P[Yhat=1 | S!=1] / P[Y=1 | S!=1]. Values below 1 mean the minority's
// desirable outcomes are under-predicted.
std::optional<double> underestimation_score(const GroupConfusion& gc);

// (TPR + TNR) / 2 over both groups pooled.
std::optional<double> balanced_accuracy(const GroupConfusion& gc);

inline constexpr double kLogLossEpsilon = 1e-12;

// Mean binary cross-entropy with probabilities clipped to [eps, 1 - eps].
double log_loss(std::span<const std::uint8_t> y_true, std::span<const double> probs);

// Both optimization objectives at once; nullopt if either is undefined.
std::optional<ObjectiveValues> objectives(const GroupConfusion& gc);
std::optional<ObjectiveValues> objectives(std::span<const std::uint8_t> y_true,
                                          std::span<const std::uint8_t> y_pred,
                                          std::span<const std::uint8_t> sensitive);

}  // namespace psa

#endif  // PSA_METRICS_HPP_
