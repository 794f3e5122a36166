#ifndef PSA_DATA_MODEL_HPP_
#define PSA_DATA_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace psa {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

  // Appends one row; the first row fixes the column count.
  void push_row(std::span<const double> values);

  const std::vector<double>& values() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Binary labels are stored as bytes holding 0 or 1.
using BinaryVector = std::vector<std::uint8_t>;

// Features plus binary target (1 = desirable outcome) and binary sensitive
// attribute (1 = majority/privileged group, 0 = protected minority).
struct Dataset {
  Matrix features;
  BinaryVector target;
  BinaryVector sensitive;
  std::vector<std::string> feature_names;
  std::string name;

  std::size_t n_samples() const noexcept { return target.size(); }
  std::size_t n_features() const noexcept { return features.cols(); }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Linear classifier parameters. The last entry of theta is the intercept.
struct ModelParams {
  std::vector<double> theta;

  ModelParams() = default;
  explicit ModelParams(std::vector<double> values) : theta(std::move(values)) {}

  static ModelParams zeros(std::size_t n_features) {
    return ModelParams(std::vector<double>(n_features + 1, 0.0));
  }

  std::size_t n_features() const noexcept { return theta.empty() ? 0 : theta.size() - 1; }
  std::span<const double> weights() const {
    return {theta.data(), n_features()};
  }
  double bias() const { return theta.back(); }
  bool all_finite() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// Objective pair attached to a candidate: balanced accuracy (maximized) and
// underestimation deviation |1 - US| (minimized). us_raw keeps US itself.
struct ObjectiveValues {
  double ba = 0.0;
  double us_dev = 0.0;
  double us_raw = 0.0;

  friend bool operator==(const ObjectiveValues&, const ObjectiveValues&) = default;
};

struct Solution {
  ModelParams params;
  ObjectiveValues objectives;
  int chain_id = 0;
  std::int64_t step = 0;

  friend bool operator==(const Solution&, const Solution&) = default;
};

// Preference preorder on objectives: higher ba first, then lower us_dev.
// Returns true when a is strictly preferred to b.
bool objective_order_less(const ObjectiveValues& a, const ObjectiveValues& b);

struct AnnealConfig {
  double t_ba = 0.2;
  double t_us = 1.0;
  double alpha = 0.95;
  double beta = 0.5;
  double lambda_ba = 1.0;
  double lambda_us = 1.0;
  int n_chains = 10;
  int iters_per_temp = 100;
  double t_min = 1e-4;
  std::uint64_t seed = 42;
  // Archive size bound applied after non-dominated filtering; unset keeps all.
  std::optional<std::size_t> archive_capacity;
  // Worker threads for independent chains; 0 picks the hardware concurrency.
  int threads = 0;

  // Throws Error(kInvalidConfig) listing the first violated constraint.
  void validate() const;
};

enum class DatasetIssueKind { kShapeMismatch, kNonBinaryColumn, kEmptyGroup };

struct DatasetIssue {
  DatasetIssueKind kind;
  std::string detail;
};

struct DatasetReport {
  std::vector<DatasetIssue> issues;
  bool ok() const noexcept { return issues.empty(); }
  std::string summary() const;
};

// Collects every violated Dataset invariant.
DatasetReport check_dataset(const Dataset& d);

// Returns d unchanged when valid; otherwise throws Error carrying the code of
// the first issue and a message listing all of them.
const Dataset& validate_dataset(const Dataset& d);

// Stratified (target x sensitive) 70:30 partition. |train| = round(0.7 n).
SplitIndices split_70_30(const Dataset& d, std::uint64_t seed);

// Copies the selected rows into a new dataset.
Dataset subset(const Dataset& d, std::span<const std::size_t> rows);

}  // namespace psa

#endif  // PSA_DATA_MODEL_HPP_
