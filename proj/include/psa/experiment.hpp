#ifndef PSA_EXPERIMENT_HPP_
#define PSA_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "psa/baselines.hpp"
#include "psa/data_model.hpp"
#include "psa/datasets.hpp"
#include "psa/kv_config.hpp"

namespace psa {

enum class OptimizerKind { kPsa, kSaBa, kGdLogloss };

std::string optimizer_name(OptimizerKind kind);
OptimizerKind parse_optimizer(const std::string& name);

struct DatasetSource {
  // Preset name (looked up in the preset directory) or a preset file path.
  std::string preset = "synthetic";
  std::filesystem::path preset_file;
  // Explicit data files; when empty the preset's files are resolved against
  // data_dir, and a synthetic preset falls back to the generator.
  std::vector<std::filesystem::path> paths;
  std::filesystem::path data_dir;
  std::optional<SyntheticConfig> synthetic;
};

struct ExperimentConfig {
  DatasetSource dataset;
  OptimizerKind optimizer = OptimizerKind::kPsa;
  std::optional<AnnealConfig> anneal;
  std::optional<SgdConfig> sgd;
  std::uint64_t split_seed = 7;
  std::filesystem::path output_dir = "out";

  // Fills the sub-config of the selected optimizer with defaults when absent
  // and enforces that only that sub-config is present.
  void normalize();
  void validate() const;
};

// Parses the key-value config schema. Unknown keys, and optimizer-specific
// keys that do not belong to the selected optimizer, are errors.
ExperimentConfig parse_experiment_config(const KvFile& kv);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

// Canonical `key = value` rendering of every field that influences results
// (output_dir and thread count excluded). Parsing it back yields an
// equivalent config.
std::string canonical_config(const ExperimentConfig& cfg);
std::string config_hash(const ExperimentConfig& cfg);

// 64-bit FNV-1a rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);
std::string dataset_fingerprint(const Dataset& d);

// Dataset resolved from a config: loaded, split, and standardized on train.
struct PreparedData {
  Dataset full;           // standardized, all rows
  SplitIndices split;
  Dataset train;
  Dataset test;
  Scaling scaling;
  std::string fingerprint;  // of the raw (unstandardized) dataset
  std::size_t rows_dropped = 0;
};

Dataset load_dataset(const DatasetSource& source);
PreparedData prepare_data(const DatasetSource& source, std::uint64_t split_seed);

struct SplitMetrics {
  ObjectiveValues objectives;
  std::optional<double> di;
};

struct SolutionRecord {
  std::size_t index = 0;
  int chain_id = 0;
  std::int64_t step = 0;
  std::vector<double> theta;
  SplitMetrics train;
  SplitMetrics test;
};

struct RunReport {
  std::string optimizer;
  std::string config_hash;
  std::string canonical_config;
  std::string dataset_name;
  std::string dataset_fingerprint;
  std::uint64_t split_seed = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::vector<std::string> feature_names;
  double wall_clock_seconds = 0.0;
  std::vector<SolutionRecord> solutions;
};

// Evaluates params on a split with the 0.5 threshold.
SplitMetrics evaluate_split(const ModelParams& params, const Dataset& data);

// JSON Lines: one header record, then one record per solution.
std::string serialize_report(const RunReport& report);
RunReport parse_report(std::string_view text);
RunReport read_report(const std::filesystem::path& path);
std::filesystem::path report_path(const ExperimentConfig& cfg, const std::string& dataset_name);

// load -> split -> standardize -> optimize on train -> evaluate on both
// splits -> write the report atomically under cfg.output_dir.
struct RunOutcome {
  RunReport report;
  std::filesystem::path path;
  std::vector<std::string> warnings;
};
RunOutcome cmd_run(const ExperimentConfig& cfg);

struct FrontRow {
  double ba_train = 0.0;
  double us_train = 0.0;
  double us_dev_train = 0.0;
  double ba_test = 0.0;
  double us_test = 0.0;
  std::optional<double> di_test;
};

// Non-dominated train-objective front of a psa report, ba descending.
// Throws Error(kNotAPsaReport) for other optimizers.
std::vector<FrontRow> front_rows(const RunReport& report);
std::string format_front_csv(const std::vector<FrontRow>& rows);
std::vector<FrontRow> parse_front_csv(std::string_view text);
std::string cmd_front(const std::filesystem::path& report_path);

struct CompareRow {
  std::string optimizer;
  std::size_t solution_index = 0;
  double ba_train = 0.0;
  double us_dev_train = 0.0;
  double ba_test = 0.0;
  double us_test = 0.0;
  double us_dev_test = 0.0;
  std::optional<double> di_test;
};

// Model chosen from a report: for psa the minimum train us_dev (ties to the
// higher train ba, then the earlier record); otherwise the single record.
const SolutionRecord& select_solution(const RunReport& report);

// Throws Error(kSplitMismatch) when reports differ in split seed or dataset.
std::vector<CompareRow> compare_reports(const std::vector<RunReport>& reports);
std::string format_compare_csv(const std::vector<CompareRow>& rows);
std::string cmd_compare(const std::vector<std::filesystem::path>& report_paths);

// Writes the generated dataset in the native CSV format with a parameter
// comment line.
void cmd_gen_synthetic(const SyntheticConfig& cfg, const std::filesystem::path& out_path);

}  // namespace psa

#endif  // PSA_EXPERIMENT_HPP_
