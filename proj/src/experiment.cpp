#include "psa/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <sstream>

#include <json.hpp>

#include "psa/error.hpp"
#include "psa/linear_model.hpp"
#include "psa/metrics.hpp"
#include "psa/pareto_annealing.hpp"
#include "psa/text_io.hpp"

namespace psa {

using nlohmann::json;

namespace {

constexpr std::string_view kReportSchema = "psa-run-report/1";
constexpr int kTableDigits = 12;

std::string real(double v) { return format_real(v, 17); }

std::string join_paths(const std::vector<std::filesystem::path>& paths) {
  std::string out;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (i) out += ", ";
    out += paths[i].string();
  }
  return out;
}

}  // namespace

std::string optimizer_name(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::kPsa: return "psa";
    case OptimizerKind::kSaBa: return "sa_ba";
    case OptimizerKind::kGdLogloss: return "gd_logloss";
  }
  return "unknown";
}

OptimizerKind parse_optimizer(const std::string& name) {
  if (name == "psa") return OptimizerKind::kPsa;
  if (name == "sa_ba") return OptimizerKind::kSaBa;
  if (name == "gd_logloss") return OptimizerKind::kGdLogloss;
  throw Error(ErrorCode::kInvalidConfig,
              "unknown optimizer '" + name + "' (expected psa, sa_ba or gd_logloss)");
}

void ExperimentConfig::normalize() {
  const bool annealing = optimizer != OptimizerKind::kGdLogloss;
  if (annealing && !anneal) anneal = AnnealConfig{};
  if (!annealing && !sgd) sgd = SgdConfig{};
}

void ExperimentConfig::validate() const {
  const bool annealing = optimizer != OptimizerKind::kGdLogloss;
  if (annealing) {
    if (!anneal) throw Error(ErrorCode::kInvalidConfig, "anneal settings missing");
    if (sgd) throw Error(ErrorCode::kInvalidConfig, "sgd.* settings given for an annealing optimizer");
    anneal->validate();
  } else {
    if (!sgd) throw Error(ErrorCode::kInvalidConfig, "sgd settings missing");
    if (anneal) throw Error(ErrorCode::kInvalidConfig, "anneal.* settings given for gd_logloss");
    sgd->validate();
  }
  if (dataset.preset.empty() && dataset.preset_file.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "dataset preset missing");
  }
  if (dataset.synthetic) dataset.synthetic->validate();
}

ExperimentConfig parse_experiment_config(const KvFile& kv) {
  ExperimentConfig cfg;
  std::optional<AnnealConfig> anneal;
  std::optional<SgdConfig> sgd;
  std::optional<SyntheticConfig> synthetic;
  for (const auto& e : kv.entries()) {
    const std::string where = kv.origin() + ":" + std::to_string(e.line);
    const std::string& k = e.key;
    const std::string& v = e.value;
    auto a = [&]() -> AnnealConfig& { return anneal ? *anneal : anneal.emplace(); };
    auto s = [&]() -> SgdConfig& { return sgd ? *sgd : sgd.emplace(); };
    auto g = [&]() -> SyntheticConfig& { return synthetic ? *synthetic : synthetic.emplace(); };
    if (k == "dataset") cfg.dataset.preset = v;
    else if (k == "dataset.preset_file") cfg.dataset.preset_file = v;
    else if (k == "dataset.path") {
      cfg.dataset.paths.clear();
      for (const auto& p : split(v, ',')) cfg.dataset.paths.emplace_back(p);
    }
    else if (k == "dataset.data_dir") cfg.dataset.data_dir = v;
    else if (k == "optimizer") cfg.optimizer = parse_optimizer(v);
    else if (k == "split_seed") cfg.split_seed = parse_uint(v, k);
    else if (k == "output_dir") cfg.output_dir = v;
    else if (k == "anneal.t_ba") a().t_ba = parse_double(v, k);
    else if (k == "anneal.t_us") a().t_us = parse_double(v, k);
    else if (k == "anneal.alpha") a().alpha = parse_double(v, k);
    else if (k == "anneal.beta") a().beta = parse_double(v, k);
    else if (k == "anneal.lambda_ba") a().lambda_ba = parse_double(v, k);
    else if (k == "anneal.lambda_us") a().lambda_us = parse_double(v, k);
    else if (k == "anneal.n_chains") a().n_chains = static_cast<int>(parse_int(v, k));
    else if (k == "anneal.iters_per_temp") a().iters_per_temp = static_cast<int>(parse_int(v, k));
    else if (k == "anneal.t_min") a().t_min = parse_double(v, k);
    else if (k == "anneal.seed") a().seed = parse_uint(v, k);
    else if (k == "anneal.archive_capacity") a().archive_capacity = parse_uint(v, k);
    else if (k == "anneal.threads") a().threads = static_cast<int>(parse_int(v, k));
    else if (k == "sgd.learning_rate") s().learning_rate = parse_double(v, k);
    else if (k == "sgd.max_epochs") s().max_epochs = static_cast<int>(parse_int(v, k));
    else if (k == "sgd.tol") s().tol = parse_double(v, k);
    else if (k == "sgd.seed") s().seed = parse_uint(v, k);
    else if (k == "synthetic.n_samples") g().n_samples = parse_uint(v, k);
    else if (k == "synthetic.minority_fraction") g().minority_fraction = parse_double(v, k);
    else if (k == "synthetic.bias_strength") g().bias_strength = parse_double(v, k);
    else if (k == "synthetic.noise_sd") g().noise_sd = parse_double(v, k);
    else if (k == "synthetic.seed") g().seed = parse_uint(v, k);
    else throw Error(ErrorCode::kInvalidConfig, where + ": unknown key '" + k + "'");
  }
  cfg.anneal = anneal;
  cfg.sgd = sgd;
  cfg.dataset.synthetic = synthetic;
  cfg.normalize();
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  return parse_experiment_config(KvFile::load(path));
}

std::string canonical_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "dataset = " << cfg.dataset.preset << '\n';
  if (!cfg.dataset.preset_file.empty()) {
    out << "dataset.preset_file = " << cfg.dataset.preset_file.string() << '\n';
  }
  if (!cfg.dataset.paths.empty()) out << "dataset.path = " << join_paths(cfg.dataset.paths) << '\n';
  if (!cfg.dataset.data_dir.empty()) {
    out << "dataset.data_dir = " << cfg.dataset.data_dir.string() << '\n';
  }
  if (cfg.dataset.synthetic) {
    const auto& g = *cfg.dataset.synthetic;
    out << "synthetic.n_samples = " << g.n_samples << '\n'
        << "synthetic.minority_fraction = " << real(g.minority_fraction) << '\n'
        << "synthetic.bias_strength = " << real(g.bias_strength) << '\n'
        << "synthetic.noise_sd = " << real(g.noise_sd) << '\n'
        << "synthetic.seed = " << g.seed << '\n';
  }
  out << "optimizer = " << optimizer_name(cfg.optimizer) << '\n';
  out << "split_seed = " << cfg.split_seed << '\n';
  if (cfg.anneal) {
    const auto& a = *cfg.anneal;
    out << "anneal.t_ba = " << real(a.t_ba) << '\n'
        << "anneal.t_us = " << real(a.t_us) << '\n'
        << "anneal.alpha = " << real(a.alpha) << '\n'
        << "anneal.beta = " << real(a.beta) << '\n'
        << "anneal.lambda_ba = " << real(a.lambda_ba) << '\n'
        << "anneal.lambda_us = " << real(a.lambda_us) << '\n'
        << "anneal.n_chains = " << a.n_chains << '\n'
        << "anneal.iters_per_temp = " << a.iters_per_temp << '\n'
        << "anneal.t_min = " << real(a.t_min) << '\n'
        << "anneal.seed = " << a.seed << '\n';
    if (a.archive_capacity) out << "anneal.archive_capacity = " << *a.archive_capacity << '\n';
  }
  if (cfg.sgd) {
    const auto& s = *cfg.sgd;
    out << "sgd.learning_rate = " << real(s.learning_rate) << '\n'
        << "sgd.max_epochs = " << s.max_epochs << '\n'
        << "sgd.tol = " << real(s.tol) << '\n'
        << "sgd.seed = " << s.seed << '\n';
  }
  return out.str();
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const ExperimentConfig& cfg) { return fnv1a_hex(canonical_config(cfg)); }

std::string dataset_fingerprint(const Dataset& d) {
  std::ostringstream buf;
  write_dataset_csv(buf, d);
  return fnv1a_hex(buf.str());
}

Dataset load_dataset(const DatasetSource& source) {
  const DatasetPreset preset =
      source.preset_file.empty() ? find_preset(source.preset) : load_preset(source.preset_file);
  std::vector<std::filesystem::path> paths = source.paths;
  if (paths.empty() && !source.data_dir.empty() &&
      preset.source == DatasetPreset::Source::kCsv) {
    for (const auto& f : preset.files) paths.push_back(source.data_dir / f);
  }
  if (paths.empty()) {
    if (preset.source != DatasetPreset::Source::kSynthetic) {
      throw Error(ErrorCode::kInvalidConfig, "dataset '" + preset.name +
                                                 "' needs dataset.path or dataset.data_dir");
    }
    Dataset d = generate_synthetic(source.synthetic.value_or(preset.synthetic));
    d.name = preset.name;
    return d;
  }
  return load_csv(paths, preset.columns, preset.csv).dataset;
}

PreparedData prepare_data(const DatasetSource& source, std::uint64_t split_seed) {
  PreparedData p;
  const Dataset raw = load_dataset(source);
  p.fingerprint = dataset_fingerprint(raw);
  p.split = split_70_30(raw, split_seed);
  Standardized st = standardize(raw, p.split.train);
  p.full = std::move(st.dataset);
  p.scaling = std::move(st.scaling);
  p.train = subset(p.full, p.split.train);
  p.test = subset(p.full, p.split.test);
  validate_dataset(p.train);
  return p;
}

SplitMetrics evaluate_split(const ModelParams& params, const Dataset& data) {
  const auto labels = predict(params, data.features, kDefaultThreshold);
  const auto gc = confusion(data.target, labels, data.sensitive);
  const auto obj = objectives(gc);
  if (!obj) {
    throw Error(ErrorCode::kEmptyGroup,
                "objectives undefined on '" + data.name + "' (class or minority positives missing)");
  }
  return {*obj, disparate_impact(gc)};
}

namespace {

json metrics_json(const SplitMetrics& m) {
  json j;
  j["ba"] = m.objectives.ba;
  j["us"] = m.objectives.us_raw;
  j["us_dev"] = m.objectives.us_dev;
  j["di"] = m.di ? json(*m.di) : json(nullptr);
  return j;
}

SplitMetrics metrics_from_json(const json& j) {
  SplitMetrics m;
  m.objectives.ba = j.at("ba").get<double>();
  m.objectives.us_raw = j.at("us").get<double>();
  m.objectives.us_dev = j.at("us_dev").get<double>();
  if (!j.at("di").is_null()) m.di = j.at("di").get<double>();
  return m;
}

}  // namespace

std::string serialize_report(const RunReport& r) {
  std::string out;
  json header;
  header["record"] = "header";
  header["schema"] = kReportSchema;
  header["optimizer"] = r.optimizer;
  header["config_hash"] = r.config_hash;
  header["config"] = r.canonical_config;
  header["dataset"] = r.dataset_name;
  header["dataset_fingerprint"] = r.dataset_fingerprint;
  header["split_seed"] = r.split_seed;
  header["n_train"] = r.n_train;
  header["n_test"] = r.n_test;
  header["feature_names"] = r.feature_names;
  header["n_solutions"] = r.solutions.size();
  header["wall_clock_seconds"] = r.wall_clock_seconds;
  out += header.dump() + '\n';
  for (const auto& s : r.solutions) {
    json rec;
    rec["record"] = "solution";
    rec["index"] = s.index;
    rec["optimizer"] = r.optimizer;
    rec["config_hash"] = r.config_hash;
    rec["chain_id"] = s.chain_id;
    rec["step"] = s.step;
    rec["theta"] = s.theta;
    rec["train"] = metrics_json(s.train);
    rec["test"] = metrics_json(s.test);
    rec["wall_clock_seconds"] = r.wall_clock_seconds;
    out += rec.dump() + '\n';
  }
  return out;
}

RunReport parse_report(std::string_view text) {
  RunReport r;
  bool have_header = false;
  std::istringstream lines{std::string(text)};
  std::string line;
  int line_no = 0;
  try {
    while (std::getline(lines, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      const json j = json::parse(line);
      const std::string kind = j.at("record").get<std::string>();
      if (kind == "header") {
        if (j.at("schema").get<std::string>() != kReportSchema) {
          throw Error(ErrorCode::kParseError, "unsupported report schema");
        }
        r.optimizer = j.at("optimizer").get<std::string>();
        r.config_hash = j.at("config_hash").get<std::string>();
        r.canonical_config = j.at("config").get<std::string>();
        r.dataset_name = j.at("dataset").get<std::string>();
        r.dataset_fingerprint = j.at("dataset_fingerprint").get<std::string>();
        r.split_seed = j.at("split_seed").get<std::uint64_t>();
        r.n_train = j.at("n_train").get<std::size_t>();
        r.n_test = j.at("n_test").get<std::size_t>();
        r.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        r.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
        have_header = true;
      } else if (kind == "solution") {
        SolutionRecord s;
        s.index = j.at("index").get<std::size_t>();
        s.chain_id = j.at("chain_id").get<int>();
        s.step = j.at("step").get<std::int64_t>();
        s.theta = j.at("theta").get<std::vector<double>>();
        s.train = metrics_from_json(j.at("train"));
        s.test = metrics_from_json(j.at("test"));
        r.solutions.push_back(std::move(s));
      } else {
        throw Error(ErrorCode::kParseError, "unknown record kind '" + kind + "'");
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError,
                "report line " + std::to_string(line_no) + ": " + e.what());
  }
  if (!have_header) throw Error(ErrorCode::kParseError, "report has no header record");
  return r;
}

RunReport read_report(const std::filesystem::path& path) { return parse_report(read_file(path)); }

std::filesystem::path report_path(const ExperimentConfig& cfg, const std::string& dataset_name) {
  return cfg.output_dir / (dataset_name + "_" + optimizer_name(cfg.optimizer) + ".jsonl");
}

RunOutcome cmd_run(const ExperimentConfig& input) {
  ExperimentConfig cfg = input;
  cfg.normalize();
  cfg.validate();
  PreparedData data = prepare_data(cfg.dataset, cfg.split_seed);

  RunOutcome outcome;
  outcome.warnings = data.scaling.warnings;
  std::vector<Solution> solutions;
  const auto start = std::chrono::steady_clock::now();
  switch (cfg.optimizer) {
    case OptimizerKind::kPsa: {
      PsaStats stats;
      const ParetoArchive archive = run_psa(data.train, *cfg.anneal, &stats);
      solutions = archive.entries();
      if (stats.degenerate_rejections) {
        outcome.warnings.push_back(std::to_string(stats.degenerate_rejections) +
                                   " candidates rejected for degenerate metrics");
      }
      break;
    }
    case OptimizerKind::kSaBa:
      solutions.push_back(run_sa_ba(data.train, *cfg.anneal));
      break;
    case OptimizerKind::kGdLogloss:
      solutions.push_back(run_gd_logloss(data.train, *cfg.sgd));
      break;
  }
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

  RunReport& report = outcome.report;
  report.optimizer = optimizer_name(cfg.optimizer);
  report.canonical_config = canonical_config(cfg);
  report.config_hash = fnv1a_hex(report.canonical_config);
  report.dataset_name = data.full.name;
  report.dataset_fingerprint = data.fingerprint;
  report.split_seed = cfg.split_seed;
  report.n_train = data.train.n_samples();
  report.n_test = data.test.n_samples();
  report.feature_names = data.full.feature_names;
  report.wall_clock_seconds = elapsed.count();
  for (std::size_t i = 0; i < solutions.size(); ++i) {
    SolutionRecord rec;
    rec.index = i;
    rec.chain_id = solutions[i].chain_id;
    rec.step = solutions[i].step;
    rec.theta = solutions[i].params.theta;
    rec.train = evaluate_split(solutions[i].params, data.train);
    rec.test = evaluate_split(solutions[i].params, data.test);
    report.solutions.push_back(std::move(rec));
  }

  std::filesystem::create_directories(cfg.output_dir);
  outcome.path = report_path(cfg, report.dataset_name);
  write_file_atomic(outcome.path, serialize_report(report));
  return outcome;
}

std::vector<FrontRow> front_rows(const RunReport& report) {
  if (report.optimizer != "psa") {
    throw Error(ErrorCode::kNotAPsaReport,
                "front needs a psa report, got optimizer '" + report.optimizer + "'");
  }
  if (report.solutions.empty()) throw Error(ErrorCode::kEmptyArchive, "report has no solutions");
  std::vector<Solution> entries;
  for (std::size_t i = 0; i < report.solutions.size(); ++i) {
    entries.push_back(Solution{{}, report.solutions[i].train.objectives, 0,
                               static_cast<std::int64_t>(i)});
  }
  const ParetoArchive front = finalize_archive(std::move(entries));
  std::vector<FrontRow> rows;
  for (const auto& e : front.entries()) {
    const auto& rec = report.solutions[static_cast<std::size_t>(e.step)];
    rows.push_back({rec.train.objectives.ba, rec.train.objectives.us_raw,
                    rec.train.objectives.us_dev, rec.test.objectives.ba,
                    rec.test.objectives.us_raw, rec.test.di});
  }
  return rows;
}

namespace {

std::string cell(double v) { return format_real(v, kTableDigits); }
std::string cell(const std::optional<double>& v) { return v ? cell(*v) : "NA"; }

}  // namespace

std::string format_front_csv(const std::vector<FrontRow>& rows) {
  std::string out = "ba_train,us_train,us_dev_train,ba_test,us_test,di_test\n";
  for (const auto& r : rows) {
    out += cell(r.ba_train) + ',' + cell(r.us_train) + ',' + cell(r.us_dev_train) + ',' +
           cell(r.ba_test) + ',' + cell(r.us_test) + ',' + cell(r.di_test) + '\n';
  }
  return out;
}

std::vector<FrontRow> parse_front_csv(std::string_view text) {
  const auto records = parse_csv_records(text);
  if (records.empty() || records.front().size() != 6 || records.front()[0] != "ba_train") {
    throw Error(ErrorCode::kParseError, "not a front table");
  }
  std::vector<FrontRow> rows;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.size() != 6) throw Error(ErrorCode::kParseError, "front row with wrong width");
    FrontRow row;
    row.ba_train = parse_double(r[0], "ba_train");
    row.us_train = parse_double(r[1], "us_train");
    row.us_dev_train = parse_double(r[2], "us_dev_train");
    row.ba_test = parse_double(r[3], "ba_test");
    row.us_test = parse_double(r[4], "us_test");
    if (r[5] != "NA") row.di_test = parse_double(r[5], "di_test");
    rows.push_back(row);
  }
  return rows;
}

std::string cmd_front(const std::filesystem::path& path) {
  return format_front_csv(front_rows(read_report(path)));
}

const SolutionRecord& select_solution(const RunReport& report) {
  if (report.solutions.empty()) throw Error(ErrorCode::kEmptyArchive, "report has no solutions");
  if (report.optimizer != "psa") return report.solutions.front();
  const SolutionRecord* best = &report.solutions.front();
  for (const auto& s : report.solutions) {
    const auto& a = s.train.objectives;
    const auto& b = best->train.objectives;
    if (a.us_dev < b.us_dev || (a.us_dev == b.us_dev && a.ba > b.ba)) best = &s;
  }
  return *best;
}

std::vector<CompareRow> compare_reports(const std::vector<RunReport>& reports) {
  if (reports.size() < 2) throw Error(ErrorCode::kInvalidConfig, "compare needs at least two reports");
  const auto& ref = reports.front();
  for (const auto& r : reports) {
    if (r.split_seed != ref.split_seed) {
      throw Error(ErrorCode::kSplitMismatch,
                  "split seeds differ (" + std::to_string(ref.split_seed) + " vs " +
                      std::to_string(r.split_seed) + "); test sets are not comparable");
    }
    if (r.dataset_fingerprint != ref.dataset_fingerprint) {
      throw Error(ErrorCode::kSplitMismatch, "reports were produced on different datasets");
    }
  }
  std::vector<CompareRow> rows;
  for (const auto& r : reports) {
    const auto& s = select_solution(r);
    rows.push_back({r.optimizer, s.index, s.train.objectives.ba, s.train.objectives.us_dev,
                    s.test.objectives.ba, s.test.objectives.us_raw, s.test.objectives.us_dev,
                    s.test.di});
  }
  return rows;
}

std::string format_compare_csv(const std::vector<CompareRow>& rows) {
  std::string out =
      "optimizer,solution_index,ba_train,us_dev_train,ba_test,us_test,us_dev_test,di_test\n";
  for (const auto& r : rows) {
    out += r.optimizer + ',' + std::to_string(r.solution_index) + ',' + cell(r.ba_train) + ',' +
           cell(r.us_dev_train) + ',' + cell(r.ba_test) + ',' + cell(r.us_test) + ',' +
           cell(r.us_dev_test) + ',' + cell(r.di_test) + '\n';
  }
  return out;
}

std::string cmd_compare(const std::vector<std::filesystem::path>& paths) {
  std::vector<RunReport> reports;
  for (const auto& p : paths) reports.push_back(read_report(p));
  return format_compare_csv(compare_reports(reports));
}

void cmd_gen_synthetic(const SyntheticConfig& cfg, const std::filesystem::path& out_path) {
  const Dataset d = generate_synthetic(cfg);
  std::ostringstream params;
  params << "generator: n_samples=" << cfg.n_samples
         << " minority_fraction=" << real(cfg.minority_fraction)
         << " bias_strength=" << real(cfg.bias_strength) << " noise_sd=" << real(cfg.noise_sd)
         << " seed=" << cfg.seed;
  write_dataset_csv(out_path, d, {params.str()});
}

}  // namespace psa
