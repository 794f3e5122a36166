#ifndef PSA_TESTS_ORACLES_HPP_
#define PSA_TESTS_ORACLES_HPP_

// Reference implementations used only by the tests. They work from raw rows
// with plain loops and long double arithmetic and share no code with the
// library beyond its data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "psa/data_model.hpp"
#include "psa/metrics.hpp"

namespace oracle {

using Bits = std::vector<std::uint8_t>;

inline psa::GroupConfusion confusion(const Bits& y, const Bits& pred, const Bits& s) {
  psa::GroupConfusion gc;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const int g = s[i] == 1 ? 1 : 0;
    if (y[i] == 1 && pred[i] == 1) gc.tp[g] += 1;
    if (y[i] == 1 && pred[i] == 0) gc.fn[g] += 1;
    if (y[i] == 0 && pred[i] == 1) gc.fp[g] += 1;
    if (y[i] == 0 && pred[i] == 0) gc.tn[g] += 1;
  }
  return gc;
}

// Share of rows in group g with flag set; nullopt for an empty group.
inline std::optional<long double> rate(const Bits& flag, const Bits& s, int g) {
  long double hits = 0, rows = 0;
  for (std::size_t i = 0; i < flag.size(); ++i) {
    if ((s[i] == 1) != (g == 1)) continue;
    rows += 1;
    if (flag[i] == 1) hits += 1;
  }
  if (rows == 0) return std::nullopt;
  return hits / rows;
}

inline std::optional<double> disparate_impact(const Bits& pred, const Bits& s) {
  const auto minority = rate(pred, s, 0);
  const auto majority = rate(pred, s, 1);
  if (!minority || !majority || *majority == 0) return std::nullopt;
  return static_cast<double>(*minority / *majority);
}

inline std::optional<double> underestimation(const Bits& y, const Bits& pred, const Bits& s) {
  const auto predicted = rate(pred, s, 0);
  const auto actual = rate(y, s, 0);
  if (!predicted || !actual || *actual == 0) return std::nullopt;
  return static_cast<double>(*predicted / *actual);
}

inline std::optional<double> balanced_accuracy(const Bits& y, const Bits& pred) {
  long double pos = 0, neg = 0, tp = 0, tn = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == 1) {
      pos += 1;
      if (pred[i] == 1) tp += 1;
    } else {
      neg += 1;
      if (pred[i] == 0) tn += 1;
    }
  }
  if (pos == 0 || neg == 0) return std::nullopt;
  return static_cast<double>((tp / pos + tn / neg) / 2);
}

inline long double log_loss(const Bits& y, const std::vector<double>& p) {
  const long double eps = 1e-12L;
  long double total = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    long double q = p[i];
    if (q < eps) q = eps;
    if (q > 1 - eps) q = 1 - eps;
    total -= y[i] == 1 ? std::log(q) : std::log(1 - q);
  }
  return y.empty() ? 0 : total / y.size();
}

inline long double sigmoid(long double z) { return 1 / (1 + std::exp(-z)); }

inline long double score(const std::vector<double>& theta, const psa::Matrix& x, std::size_t r) {
  long double z = theta.back();
  for (std::size_t c = 0; c < x.cols(); ++c) z += static_cast<long double>(theta[c]) * x(r, c);
  return z;
}

// Mean log-loss of a logistic model written out directly from its definition.
inline long double model_loss(const std::vector<double>& theta, const psa::Matrix& x,
                              const Bits& y) {
  long double total = 0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const long double p = sigmoid(score(theta, x, r));
    total -= y[r] == 1 ? std::log(p) : std::log(1 - p);
  }
  return total / x.rows();
}

inline std::vector<double> finite_difference_gradient(const std::vector<double>& theta,
                                                      const psa::Matrix& x, const Bits& y,
                                                      double h = 1e-6) {
  std::vector<double> grad(theta.size());
  for (std::size_t k = 0; k < theta.size(); ++k) {
    auto up = theta;
    auto down = theta;
    up[k] += h;
    down[k] -= h;
    grad[k] = static_cast<double>((model_loss(up, x, y) - model_loss(down, x, y)) /
                                  (static_cast<long double>(up[k]) - down[k]));
  }
  return grad;
}

inline Bits labels(const std::vector<double>& theta, const psa::Matrix& x) {
  Bits out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = sigmoid(score(theta, x, r)) >= 0.5L ? 1 : 0;
  return out;
}

struct Point {
  double ba = 0.0;
  double us_dev = 0.0;
  int chain_id = 0;
  std::int64_t step = 0;
};

// Quadratic non-dominated filter: i survives unless some j is at least as
// good on both objectives and either strictly better on one or an earlier
// duplicate. Survivors come back ba descending.
inline std::vector<Point> nondominated(const std::vector<Point>& pts) {
  std::vector<Point> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool beaten = false;
    for (std::size_t j = 0; j < pts.size() && !beaten; ++j) {
      if (i == j) continue;
      const Point& a = pts[j];
      const Point& b = pts[i];
      if (a.ba < b.ba || a.us_dev > b.us_dev) continue;
      if (a.ba > b.ba || a.us_dev < b.us_dev) {
        beaten = true;
      } else if (a.chain_id < b.chain_id || (a.chain_id == b.chain_id && a.step < b.step)) {
        beaten = true;
      }
    }
    if (!beaten) out.push_back(pts[i]);
  }
  std::sort(out.begin(), out.end(), [](const Point& a, const Point& b) { return a.ba > b.ba; });
  return out;
}

// Exhaustive Pareto front of (ba, |1 - US|) over theta on a regular grid
// [-2, 2]^(d+1) with the given step.
inline std::vector<Point> grid_front(const psa::Dataset& d, double step = 0.25) {
  const std::size_t dims = d.n_features() + 1;
  const int per_axis = static_cast<int>(std::lround(4.0 / step)) + 1;
  std::vector<int> idx(dims, 0);
  std::vector<Point> pts;
  std::vector<double> theta(dims);
  while (true) {
    for (std::size_t k = 0; k < dims; ++k) theta[k] = -2.0 + step * idx[k];
    const Bits pred = labels(theta, d.features);
    const auto ba = balanced_accuracy(d.target, pred);
    const auto us = underestimation(d.target, pred, d.sensitive);
    if (ba && us) pts.push_back({*ba, std::abs(1.0 - *us), 0, static_cast<std::int64_t>(pts.size())});
    std::size_t k = 0;
    while (k < dims && ++idx[k] == per_axis) idx[k++] = 0;
    if (k == dims) break;
  }
  return nondominated(pts);
}

}  // namespace oracle

#endif  // PSA_TESTS_ORACLES_HPP_
