#ifndef PSA_DATASETS_HPP_
#define PSA_DATASETS_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "psa/data_model.hpp"

namespace psa {

// Synthetic stand-in for the benchmark generator: a group bit s, a merit
// score m and a group-shifted proxy g = m + b (s - 1/2) + noise. The label
// carries the same group shift, y = [m + b (s - 1/2) + noise > 0], so
// bias_strength controls the gap in positive base rates between groups.
struct SyntheticConfig {
  std::size_t n_samples = 5000;
  double minority_fraction = 0.5;
  double bias_strength = 2.0;
  double noise_sd = 1.0;
  std::uint64_t seed = 42;

  void validate() const;
};

Dataset generate_synthetic(const SyntheticConfig& cfg);

enum class ColumnRole { kFeature, kTarget, kSensitive, kDrop };

// How one CSV column enters the dataset. Target and sensitive columns (and
// categorical features) are binarized: values listed in `one_values` map to
// 1 (the desirable outcome, or the majority group). When `zero_values` is
// non-empty every other value is an error; otherwise everything else maps
// to 0. Features with empty `one_values` are parsed as reals.
struct ColumnSpec {
  std::string csv_column;
  ColumnRole role = ColumnRole::kFeature;
  std::vector<std::string> one_values;
  std::vector<std::string> zero_values;
};

struct CsvOptions {
  std::string name;
  // Column names for files without a header row; empty means the first
  // non-comment row is the header.
  std::vector<std::string> header;
  // Lines starting with this prefix are skipped.
  std::string comment_prefix = "#";
  std::vector<std::string> missing_tokens{"?", ""};
};

struct CsvLoad {
  Dataset dataset;
  std::size_t rows_read = 0;
  std::size_t rows_dropped = 0;
};

// Throws Error with kMissingColumn, kUnmappableValue, kEmptyAfterFiltering,
// kIoError or any validate_dataset code.
CsvLoad load_csv(std::span<const std::filesystem::path> paths, const std::vector<ColumnSpec>& spec,
                 const CsvOptions& options = {});
CsvLoad load_csv(const std::filesystem::path& path, const std::vector<ColumnSpec>& spec,
                 const CsvOptions& options = {});

// RFC 4180 style record splitting with surrounding whitespace trimmed.
std::vector<std::vector<std::string>> parse_csv_records(std::string_view text);

// Native dataset format: optional '#' comment lines ("# dataset: <name>"
// names the dataset), a header of feature names followed by `target` and
// `sensitive`, then one row per sample. Reals use 17 significant digits.
void write_dataset_csv(std::ostream& out, const Dataset& d,
                       const std::vector<std::string>& comments = {});
void write_dataset_csv(const std::filesystem::path& path, const Dataset& d,
                       const std::vector<std::string>& comments = {});
Dataset read_dataset_csv(const std::filesystem::path& path);

// Per-feature affine map x -> (x - mean) / sd. Unscaled columns carry
// mean 0 and sd 1.
struct Scaling {
  std::vector<double> mean;
  std::vector<double> sd;
  std::vector<bool> scaled;
  std::vector<std::string> warnings;
};

struct Standardized {
  Dataset dataset;
  Scaling scaling;
};

// Fits population mean/sd on the train rows and applies them to every row.
// Binary {0,1} columns (the sensitive indicator among them) are left as is;
// zero-variance columns pass through with a warning.
Standardized standardize(const Dataset& d, std::span<const std::size_t> train_idx);

Dataset apply_scaling(const Dataset& d, const Scaling& scaling);

// Scaling equivalent to applying `first` and then `second`.
Scaling compose(const Scaling& first, const Scaling& second);

struct DatasetSummary {
  std::size_t n_samples = 0;
  std::size_t n_features = 0;
  double minority_share = 0.0;           // rows with sensitive = 0
  double minority_positive_rate = 0.0;   // P[Y=1 | S=0]
  double majority_positive_rate = 0.0;   // P[Y=1 | S=1]
  double positive_share = 0.0;
};

DatasetSummary summarize(const Dataset& d);

// A named dataset recipe: either the synthetic generator or a CSV layout.
struct DatasetPreset {
  std::string name;
  enum class Source { kSynthetic, kCsv } source = Source::kCsv;
  std::vector<ColumnSpec> columns;
  CsvOptions csv;
  // Default file names, resolved against a data directory.
  std::vector<std::string> files;
  SyntheticConfig synthetic;
};

// Reads a preset file. Keys: name, source (csv|synthetic), files, header,
// comment_prefix, missing, column (repeatable:
// "<csv name>, <feature|target|sensitive|drop>[, <one values>[, <zero values>]]"
// with '|' separating values), and the synthetic.* generator keys.
DatasetPreset load_preset(const std::filesystem::path& path);

// Resolves a preset by name in the preset directory (PSA_PRESET_DIR env var,
// else the compiled-in default).
std::filesystem::path preset_directory();
DatasetPreset find_preset(const std::string& name);

// Native-format column specs for synthetic data written by write_dataset_csv.
std::vector<ColumnSpec> native_column_spec(const std::vector<std::string>& feature_names);

}  // namespace psa

#endif  // PSA_DATASETS_HPP_
