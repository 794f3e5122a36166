// psa: train fairness-aware linear classifiers with Pareto simulated
// annealing and compare them against the SA(BA) and log-loss baselines.
//
//   psa run --config exp.cfg [--seed N] [--out DIR]
//   psa front REPORT.jsonl [--out FILE]
//   psa compare A.jsonl B.jsonl ... [--out FILE]
//   psa gen-synthetic [--config FILE] [--seed N] [--out FILE] [--n-samples N] ...
//   psa validate --config exp.cfg
//
// Exit codes: 0 success, 1 validation error, 2 runtime error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "psa/datasets.hpp"
#include "psa/error.hpp"
#include "psa/experiment.hpp"
#include "psa/kv_config.hpp"
#include "psa/text_io.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

std::string module_of(psa::ErrorCode code) {
  using psa::ErrorCode;
  switch (code) {
    case ErrorCode::kShapeMismatch:
    case ErrorCode::kEmptyGroup:
    case ErrorCode::kNonBinaryColumn:
    case ErrorCode::kTooFewSamples: return "data-model";
    case ErrorCode::kDimensionMismatch: return "linear-model";
    case ErrorCode::kEmptyArchive: return "psa-optimizer";
    case ErrorCode::kDivergence: return "baselines";
    case ErrorCode::kMissingColumn:
    case ErrorCode::kUnmappableValue:
    case ErrorCode::kEmptyAfterFiltering: return "datasets";
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kParseError:
    case ErrorCode::kNotAPsaReport:
    case ErrorCode::kSplitMismatch:
    case ErrorCode::kIoError: return "cli";
  }
  return "cli";
}

int exit_code_of(psa::ErrorCode code) {
  using psa::ErrorCode;
  switch (code) {
    case ErrorCode::kIoError:
    case ErrorCode::kDivergence:
    case ErrorCode::kEmptyArchive: return kExitRuntime;
    default: return kExitValidation;
  }
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    psa::write_file_atomic(out_path, text);
  }
}

psa::SyntheticConfig synthetic_from_file(const std::string& path) {
  psa::SyntheticConfig cfg;
  const auto kv = psa::KvFile::load(path);
  for (const auto& e : kv.entries()) {
    if (e.key == "synthetic.n_samples") cfg.n_samples = psa::parse_uint(e.value, e.key);
    else if (e.key == "synthetic.minority_fraction") cfg.minority_fraction = psa::parse_double(e.value, e.key);
    else if (e.key == "synthetic.bias_strength") cfg.bias_strength = psa::parse_double(e.value, e.key);
    else if (e.key == "synthetic.noise_sd") cfg.noise_sd = psa::parse_double(e.value, e.key);
    else if (e.key == "synthetic.seed") cfg.seed = psa::parse_uint(e.value, e.key);
    else {
      throw psa::Error(psa::ErrorCode::kInvalidConfig,
                       kv.origin() + ":" + std::to_string(e.line) + ": unknown key '" + e.key + "'");
    }
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pareto simulated annealing for balanced accuracy and underestimation"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;

  auto* run = app.add_subcommand("run", "Run one optimizer and write a report");
  run->add_option("--config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override the optimizer seed");
  run->add_option("--out", out, "Override the output directory");

  std::string report;
  auto* front = app.add_subcommand("front", "Print the train Pareto front of a psa report as CSV");
  front->add_option("report", report, "Report file")->required()->check(CLI::ExistingFile);
  front->add_option("--out", out, "Write the table to this file instead of stdout");

  std::vector<std::string> reports;
  auto* compare = app.add_subcommand("compare", "Compare selected models of several reports");
  compare->add_option("reports", reports, "Report files")->required()->expected(2, -1);
  compare->add_option("--out", out, "Write the table to this file instead of stdout");

  psa::SyntheticConfig synth;
  std::string synth_config;
  auto* gen = app.add_subcommand("gen-synthetic", "Write the synthetic dataset as CSV");
  gen->add_option("--config", synth_config, "File with synthetic.* keys")->check(CLI::ExistingFile);
  gen->add_option("--seed", seed, "Generator seed");
  gen->add_option("--out", out, "Output CSV path")->required();
  std::optional<std::size_t> n_samples;
  std::optional<double> minority_fraction, bias_strength, noise_sd;
  gen->add_option("--n-samples", n_samples, "Number of rows");
  gen->add_option("--minority-fraction", minority_fraction, "Share of sensitive = 0 rows");
  gen->add_option("--bias-strength", bias_strength, "Group shift of label and proxy");
  gen->add_option("--noise-sd", noise_sd, "Noise standard deviation");

  auto* validate = app.add_subcommand("validate", "Check a config and its dataset");
  validate->add_option("--config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
  validate->add_option("--seed", seed, "Override the optimizer seed");
  validate->add_option("--out", out, "Override the output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  try {
    auto load_config = [&] {
      psa::ExperimentConfig cfg = psa::load_experiment_config(config_path);
      if (seed) {
        if (cfg.anneal) cfg.anneal->seed = *seed;
        if (cfg.sgd) cfg.sgd->seed = *seed;
      }
      if (!out.empty()) cfg.output_dir = out;
      return cfg;
    };

    if (*run) {
      const auto outcome = psa::cmd_run(load_config());
      for (const auto& w : outcome.warnings) std::cerr << "warning: " << w << '\n';
      std::cout << outcome.path.string() << '\n';
    } else if (*front) {
      emit(psa::cmd_front(report), out);
    } else if (*compare) {
      std::vector<std::filesystem::path> paths(reports.begin(), reports.end());
      emit(psa::cmd_compare(paths), out);
    } else if (*gen) {
      if (!synth_config.empty()) synth = synthetic_from_file(synth_config);
      if (seed) synth.seed = *seed;
      if (n_samples) synth.n_samples = *n_samples;
      if (minority_fraction) synth.minority_fraction = *minority_fraction;
      if (bias_strength) synth.bias_strength = *bias_strength;
      if (noise_sd) synth.noise_sd = *noise_sd;
      psa::cmd_gen_synthetic(synth, out);
    } else if (*validate) {
      const auto cfg = load_config();
      const auto data = psa::prepare_data(cfg.dataset, cfg.split_seed);
      const auto raw = psa::load_dataset(cfg.dataset);
      const auto s = psa::summarize(raw);
      std::cout << "dataset: " << raw.name << '\n'
                << "samples: " << s.n_samples << '\n'
                << "features: " << s.n_features << '\n'
                << "minority_share: " << psa::format_real(s.minority_share, 6) << '\n'
                << "minority_positive_rate: " << psa::format_real(s.minority_positive_rate, 6) << '\n'
                << "majority_positive_rate: " << psa::format_real(s.majority_positive_rate, 6) << '\n'
                << "train/test: " << data.train.n_samples() << '/' << data.test.n_samples() << '\n'
                << "config_hash: " << psa::config_hash(cfg) << '\n';
      for (const auto& w : data.scaling.warnings) std::cerr << "warning: " << w << '\n';
    }
  } catch (const psa::Error& e) {
    std::cerr << "error [" << module_of(e.code()) << "] " << e.what() << '\n';
    return exit_code_of(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error [cli] " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
