#include "psa/data_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "psa/error.hpp"

namespace psa {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEmptyGroup: return "EmptyGroup";
    case ErrorCode::kNonBinaryColumn: return "NonBinaryColumn";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kEmptyArchive: return "EmptyArchive";
    case ErrorCode::kDivergence: return "Divergence";
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kUnmappableValue: return "UnmappableValue";
    case ErrorCode::kEmptyAfterFiltering: return "EmptyAfterFiltering";
    case ErrorCode::kNotAPsaReport: return "NotAPsaReport";
    case ErrorCode::kSplitMismatch: return "SplitMismatch";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kParseError: return "ParseError";
  }
  return "Unknown";
}

void Matrix::push_row(std::span<const double> values) {
  if (rows_ == 0 && data_.empty()) {
    cols_ = values.size();
  } else if (values.size() != cols_) {
    throw Error(ErrorCode::kShapeMismatch, "row has " + std::to_string(values.size()) +
                                               " values, expected " + std::to_string(cols_));
  }
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

bool ModelParams::all_finite() const {
  return std::all_of(theta.begin(), theta.end(), [](double v) { return std::isfinite(v); });
}

bool objective_order_less(const ObjectiveValues& a, const ObjectiveValues& b) {
  if (a.ba != b.ba) return a.ba > b.ba;
  return a.us_dev < b.us_dev;
}

void AnnealConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidConfig, what); };
  if (!(t_ba > 0.0)) fail("t_ba must be > 0");
  if (!(t_us > 0.0)) fail("t_us must be > 0");
  if (!(alpha > 0.0 && alpha < 1.0)) fail("alpha must lie in (0,1)");
  // beta = 0 is accepted as the degenerate no-movement case.
  if (!(beta >= 0.0) || !std::isfinite(beta)) fail("beta must be >= 0");
  if (!(lambda_ba >= 0.0)) fail("lambda_ba must be >= 0");
  if (!(lambda_us >= 0.0)) fail("lambda_us must be >= 0");
  if (n_chains < 1) fail("n_chains must be >= 1");
  if (iters_per_temp < 1) fail("iters_per_temp must be >= 1");
  if (!(t_min > 0.0)) fail("t_min must be > 0");
  if (!(t_min < std::min(t_ba, t_us))) fail("t_min must be below both initial temperatures");
  if (archive_capacity && *archive_capacity < 2) fail("archive_capacity must be >= 2");
  if (threads < 0) fail("threads must be >= 0");
}

std::string DatasetReport::summary() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < issues.size(); ++i) {
    if (i) out << "; ";
    out << issues[i].detail;
  }
  return out.str();
}

DatasetReport check_dataset(const Dataset& d) {
  DatasetReport report;
  auto add = [&](DatasetIssueKind kind, std::string detail) {
    report.issues.push_back({kind, std::move(detail)});
  };
  const std::size_t n = d.target.size();
  if (d.features.rows() != n) {
    add(DatasetIssueKind::kShapeMismatch, "features have " + std::to_string(d.features.rows()) +
                                              " rows but target has " + std::to_string(n));
  }
  if (d.sensitive.size() != n) {
    add(DatasetIssueKind::kShapeMismatch, "sensitive has " + std::to_string(d.sensitive.size()) +
                                              " rows but target has " + std::to_string(n));
  }
  if (!d.feature_names.empty() && d.feature_names.size() != d.features.cols()) {
    add(DatasetIssueKind::kShapeMismatch, "feature_names length differs from feature count");
  }
  auto binary = [](const BinaryVector& v) {
    return std::all_of(v.begin(), v.end(), [](std::uint8_t x) { return x <= 1; });
  };
  if (!binary(d.target)) add(DatasetIssueKind::kNonBinaryColumn, "target is not binary");
  if (!binary(d.sensitive)) add(DatasetIssueKind::kNonBinaryColumn, "sensitive is not binary");

  std::array<std::size_t, 2> group{0, 0};
  std::array<std::size_t, 2> cls{0, 0};
  for (auto s : d.sensitive) if (s <= 1) ++group[s];
  for (auto y : d.target) if (y <= 1) ++cls[y];
  if (group[0] == 0) add(DatasetIssueKind::kEmptyGroup, "minority group (sensitive=0) is empty");
  if (group[1] == 0) add(DatasetIssueKind::kEmptyGroup, "majority group (sensitive=1) is empty");
  if (cls[0] == 0) add(DatasetIssueKind::kEmptyGroup, "negative class (target=0) is empty");
  if (cls[1] == 0) add(DatasetIssueKind::kEmptyGroup, "positive class (target=1) is empty");
  return report;
}

const Dataset& validate_dataset(const Dataset& d) {
  const DatasetReport report = check_dataset(d);
  if (report.ok()) return d;
  ErrorCode code = ErrorCode::kEmptyGroup;
  switch (report.issues.front().kind) {
    case DatasetIssueKind::kShapeMismatch: code = ErrorCode::kShapeMismatch; break;
    case DatasetIssueKind::kNonBinaryColumn: code = ErrorCode::kNonBinaryColumn; break;
    case DatasetIssueKind::kEmptyGroup: code = ErrorCode::kEmptyGroup; break;
  }
  throw Error(code, report.summary());
}

SplitIndices split_70_30(const Dataset& d, std::uint64_t seed) {
  const std::size_t n = d.n_samples();
  if (n < 10) {
    throw Error(ErrorCode::kTooFewSamples, "split needs at least 10 rows, got " + std::to_string(n));
  }
  if (d.sensitive.size() != n) throw Error(ErrorCode::kShapeMismatch, "sensitive length differs");

  std::array<std::vector<std::size_t>, 4> cells;
  for (std::size_t i = 0; i < n; ++i) {
    cells[2 * (d.target[i] & 1u) + (d.sensitive[i] & 1u)].push_back(i);
  }

  std::mt19937_64 rng(seed);
  for (auto& cell : cells) std::shuffle(cell.begin(), cell.end(), rng);

  // Largest-remainder apportionment toward round(0.7 n). A cell with two or
  // more rows keeps a row on each side unless that makes the total
  // unreachable, in which case the bounds widen to the whole cell.
  const std::size_t total_train = static_cast<std::size_t>(std::llround(0.7 * static_cast<double>(n)));
  std::array<double, 4> exact{};
  std::array<std::size_t, 4> take{}, lo{}, hi{};
  for (std::size_t c = 0; c < 4; ++c) exact[c] = 0.7 * static_cast<double>(cells[c].size());
  auto apportion = [&](bool keep_both_sides) {
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < 4; ++c) {
      const std::size_t size = cells[c].size();
      const bool both = keep_both_sides && size >= 2;
      lo[c] = both ? 1 : 0;
      hi[c] = both ? size - 1 : size;
      take[c] = std::clamp(static_cast<std::size_t>(std::floor(exact[c])), lo[c], hi[c]);
      assigned += take[c];
    }
    while (assigned < total_train) {
      std::size_t best = 4;
      for (std::size_t c = 0; c < 4; ++c) {
        if (take[c] < hi[c] && (best == 4 || exact[c] - take[c] > exact[best] - take[best])) best = c;
      }
      if (best == 4) return false;
      ++take[best];
      ++assigned;
    }
    while (assigned > total_train) {
      std::size_t best = 4;
      for (std::size_t c = 0; c < 4; ++c) {
        if (take[c] > lo[c] && (best == 4 || exact[c] - take[c] < exact[best] - take[best])) best = c;
      }
      if (best == 4) return false;
      --take[best];
      --assigned;
    }
    return true;
  };
  if (!apportion(true)) apportion(false);

  SplitIndices split;
  for (std::size_t c = 0; c < 4; ++c) {
    split.train.insert(split.train.end(), cells[c].begin(), cells[c].begin() + take[c]);
    split.test.insert(split.test.end(), cells[c].begin() + take[c], cells[c].end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

Dataset subset(const Dataset& d, std::span<const std::size_t> rows) {
  Dataset out;
  out.name = d.name;
  out.feature_names = d.feature_names;
  out.features = Matrix(rows.size(), d.n_features());
  out.target.reserve(rows.size());
  out.sensitive.reserve(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const std::size_t r = rows[k];
    if (r >= d.n_samples()) throw Error(ErrorCode::kShapeMismatch, "row index out of range");
    std::copy(d.features.row(r).begin(), d.features.row(r).end(), out.features.row(k).begin());
    out.target.push_back(d.target[r]);
    out.sensitive.push_back(d.sensitive[r]);
  }
  return out;
}

}  // namespace psa
