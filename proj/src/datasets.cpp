#include "psa/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include "psa/error.hpp"
#include "psa/kv_config.hpp"
#include "psa/text_io.hpp"

namespace psa {

void SyntheticConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidConfig, what); };
  if (n_samples < 1) fail("synthetic n_samples must be >= 1");
  if (!(minority_fraction > 0.0 && minority_fraction < 1.0)) {
    fail("synthetic minority_fraction must lie in (0,1)");
  }
  if (!(bias_strength >= 0.0)) fail("synthetic bias_strength must be >= 0");
  if (!(noise_sd > 0.0)) fail("synthetic noise_sd must be > 0");
}

Dataset generate_synthetic(const SyntheticConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::bernoulli_distribution majority(1.0 - cfg.minority_fraction);
  std::normal_distribution<double> normal(0.0, 1.0);

  Dataset d;
  d.name = "synthetic";
  d.feature_names = {"group", "merit", "proxy"};
  d.features = Matrix(cfg.n_samples, 3);
  d.target.resize(cfg.n_samples);
  d.sensitive.resize(cfg.n_samples);
  for (std::size_t i = 0; i < cfg.n_samples; ++i) {
    const int s = majority(rng) ? 1 : 0;
    const double shift = cfg.bias_strength * (static_cast<double>(s) - 0.5);
    const double merit = normal(rng);
    const double proxy = merit + shift + cfg.noise_sd * normal(rng);
    const double latent = merit + shift + cfg.noise_sd * normal(rng);
    d.features(i, 0) = s;
    d.features(i, 1) = merit;
    d.features(i, 2) = proxy;
    d.sensitive[i] = static_cast<std::uint8_t>(s);
    d.target[i] = latent > 0.0 ? 1 : 0;
  }
  return d;
}

std::vector<std::vector<std::string>> parse_csv_records(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;       // inside quotes
  bool was_quoted = false;   // current field started with a quote
  std::size_t quoted_len = 0;  // field length at the closing quote
  bool row_has_content = false;

  auto end_field = [&] {
    fields.push_back(was_quoted ? field.substr(0, quoted_len) + trim(field.substr(quoted_len))
                                : trim(field));
    field.clear();
    was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    if (row_has_content) records.push_back(std::move(fields));
    fields.clear();
    row_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
          quoted_len = field.size();
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (trim(field).empty()) {
          field.clear();
          quoted = true;
          was_quoted = true;
          row_has_content = true;
        } else {
          field += c;
        }
        break;
      case ',':
        row_has_content = true;
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        break;
      default:
        if (c != ' ' && c != '\t') row_has_content = true;
        field += c;
    }
  }
  if (quoted) throw Error(ErrorCode::kParseError, "unterminated quoted field");
  end_record();
  return records;
}

namespace {

bool contains(const std::vector<std::string>& values, const std::string& v) {
  return std::find(values.begin(), values.end(), v) != values.end();
}

std::optional<double> to_real(const std::string& s) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (begin != end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string strip_comment_lines(const std::string& text, const std::string& prefix) {
  if (prefix.empty()) return text;
  std::string out;
  out.reserve(text.size());
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    const std::size_t stop = nl == std::string::npos ? text.size() : nl + 1;
    const std::string_view line(text.data() + start, stop - start);
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos || line.substr(first, prefix.size()) != prefix) {
      out.append(line);
    }
    start = stop;
  }
  return out;
}

}  // namespace

CsvLoad load_csv(std::span<const std::filesystem::path> paths, const std::vector<ColumnSpec>& spec,
                 const CsvOptions& options) {
  const auto n_targets = std::count_if(spec.begin(), spec.end(),
                                       [](const auto& c) { return c.role == ColumnRole::kTarget; });
  const auto n_sensitive = std::count_if(
      spec.begin(), spec.end(), [](const auto& c) { return c.role == ColumnRole::kSensitive; });
  if (n_targets != 1 || n_sensitive != 1) {
    throw Error(ErrorCode::kInvalidConfig,
                "column spec needs exactly one target and one sensitive column");
  }

  std::vector<const ColumnSpec*> used;
  for (const auto& c : spec) {
    if (c.role != ColumnRole::kDrop) used.push_back(&c);
  }

  CsvLoad load;
  Dataset& d = load.dataset;
  d.name = options.name;
  for (const auto* c : used) {
    if (c->role == ColumnRole::kFeature) d.feature_names.push_back(c->csv_column);
  }
  const std::size_t n_features = d.feature_names.size();
  std::vector<double> row_values(n_features);

  for (const auto& path : paths) {
    auto records = parse_csv_records(strip_comment_lines(read_file(path), options.comment_prefix));
    std::size_t first_data = 0;
    std::vector<std::string> header = options.header;
    if (header.empty()) {
      if (records.empty()) throw Error(ErrorCode::kMissingColumn, path.string() + " has no header");
      header = records.front();
      first_data = 1;
    }
    // First occurrence wins for duplicated header names.
    std::vector<std::size_t> column_index;
    for (const auto* c : used) {
      const auto it = std::find(header.begin(), header.end(), c->csv_column);
      if (it == header.end()) {
        throw Error(ErrorCode::kMissingColumn,
                    "column '" + c->csv_column + "' not found in " + path.string());
      }
      column_index.push_back(static_cast<std::size_t>(it - header.begin()));
    }

    for (std::size_t r = first_data; r < records.size(); ++r) {
      const auto& rec = records[r];
      ++load.rows_read;
      bool keep = true;
      std::size_t f = 0;
      std::uint8_t target = 0;
      std::uint8_t sensitive = 0;
      for (std::size_t k = 0; k < used.size() && keep; ++k) {
        const ColumnSpec& c = *used[k];
        if (column_index[k] >= rec.size()) {
          keep = false;
          break;
        }
        const std::string& raw = rec[column_index[k]];
        if (contains(options.missing_tokens, raw)) {
          keep = false;
          break;
        }
        if (c.role == ColumnRole::kFeature && c.one_values.empty()) {
          const auto v = to_real(raw);
          if (!v) {
            keep = false;
            break;
          }
          row_values[f++] = *v;
          continue;
        }
        std::uint8_t bit = 0;
        if (contains(c.one_values, raw)) {
          bit = 1;
        } else if (!c.zero_values.empty() && !contains(c.zero_values, raw)) {
          throw Error(ErrorCode::kUnmappableValue, "value '" + raw + "' in column '" +
                                                       c.csv_column + "' of " + path.string() +
                                                       " is not covered by the column spec");
        }
        if (c.role == ColumnRole::kTarget) {
          target = bit;
        } else if (c.role == ColumnRole::kSensitive) {
          sensitive = bit;
        } else {
          row_values[f++] = bit;
        }
      }
      if (!keep) {
        ++load.rows_dropped;
        continue;
      }
      d.features.push_row(row_values);
      d.target.push_back(target);
      d.sensitive.push_back(sensitive);
    }
  }
  if (d.target.empty()) {
    throw Error(ErrorCode::kEmptyAfterFiltering,
                "no usable rows (" + std::to_string(load.rows_dropped) + " dropped)");
  }
  if (d.features.rows() == 0) d.features = Matrix(d.target.size(), 0);
  validate_dataset(d);
  return load;
}

CsvLoad load_csv(const std::filesystem::path& path, const std::vector<ColumnSpec>& spec,
                 const CsvOptions& options) {
  return load_csv(std::span<const std::filesystem::path>(&path, 1), spec, options);
}

void write_dataset_csv(std::ostream& out, const Dataset& d, const std::vector<std::string>& comments) {
  out << "# dataset: " << d.name << '\n';
  for (const auto& c : comments) out << "# " << c << '\n';
  for (std::size_t c = 0; c < d.n_features(); ++c) {
    out << (c < d.feature_names.size() ? d.feature_names[c] : "x" + std::to_string(c)) << ',';
  }
  out << "target,sensitive\n";
  for (std::size_t r = 0; r < d.n_samples(); ++r) {
    for (std::size_t c = 0; c < d.n_features(); ++c) {
      out << format_real(d.features(r, c), 17) << ',';
    }
    out << static_cast<int>(d.target[r]) << ',' << static_cast<int>(d.sensitive[r]) << '\n';
  }
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& d,
                       const std::vector<std::string>& comments) {
  std::ostringstream buf;
  write_dataset_csv(buf, d, comments);
  write_file_atomic(path, buf.str());
}

std::vector<ColumnSpec> native_column_spec(const std::vector<std::string>& feature_names) {
  std::vector<ColumnSpec> spec;
  for (const auto& name : feature_names) spec.push_back({name, ColumnRole::kFeature, {}, {}});
  spec.push_back({"target", ColumnRole::kTarget, {"1"}, {"0"}});
  spec.push_back({"sensitive", ColumnRole::kSensitive, {"1"}, {"0"}});
  return spec;
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::string name;
  std::istringstream lines(text);
  std::string line;
  std::vector<std::string> header;
  while (std::getline(lines, line)) {
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      constexpr std::string_view kTag = "# dataset:";
      if (t.rfind(kTag, 0) == 0 && name.empty()) name = trim(t.substr(kTag.size()));
      continue;
    }
    header = parse_csv_records(t).front();
    break;
  }
  if (header.size() < 2 || header[header.size() - 2] != "target" || header.back() != "sensitive") {
    throw Error(ErrorCode::kMissingColumn,
                path.string() + " is not in the native format (needs trailing target,sensitive)");
  }
  header.resize(header.size() - 2);
  CsvOptions options;
  options.name = name;
  return load_csv(path, native_column_spec(header), options).dataset;
}

Standardized standardize(const Dataset& d, std::span<const std::size_t> train_idx) {
  if (train_idx.empty()) throw Error(ErrorCode::kTooFewSamples, "standardize needs train rows");
  const std::size_t p = d.n_features();
  Scaling s;
  s.mean.assign(p, 0.0);
  s.sd.assign(p, 1.0);
  s.scaled.assign(p, false);
  const double n = static_cast<double>(train_idx.size());
  for (std::size_t c = 0; c < p; ++c) {
    bool binary = true;
    for (std::size_t r = 0; r < d.n_samples() && binary; ++r) {
      const double v = d.features(r, c);
      binary = v == 0.0 || v == 1.0;
    }
    const std::string& name = c < d.feature_names.size() ? d.feature_names[c] : std::to_string(c);
    if (binary) continue;
    double mean = 0.0;
    for (auto r : train_idx) mean += d.features(r, c);
    mean /= n;
    double var = 0.0;
    for (auto r : train_idx) {
      const double diff = d.features(r, c) - mean;
      var += diff * diff;
    }
    const double sd = std::sqrt(var / n);
    if (!(sd > 0.0)) {
      s.warnings.push_back("feature '" + name + "' has zero variance on train rows; left unscaled");
      continue;
    }
    s.mean[c] = mean;
    s.sd[c] = sd;
    s.scaled[c] = true;
  }
  return {apply_scaling(d, s), std::move(s)};
}

Dataset apply_scaling(const Dataset& d, const Scaling& scaling) {
  if (scaling.mean.size() != d.n_features() || scaling.sd.size() != d.n_features()) {
    throw Error(ErrorCode::kDimensionMismatch, "scaling table does not match feature count");
  }
  Dataset out = d;
  for (std::size_t r = 0; r < out.n_samples(); ++r) {
    auto row = out.features.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      row[c] = (row[c] - scaling.mean[c]) / scaling.sd[c];
    }
  }
  return out;
}

Scaling compose(const Scaling& first, const Scaling& second) {
  if (first.mean.size() != second.mean.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "cannot compose scalings of different widths");
  }
  Scaling out;
  const std::size_t p = first.mean.size();
  out.mean.resize(p);
  out.sd.resize(p);
  out.scaled.resize(p);
  for (std::size_t c = 0; c < p; ++c) {
    // ((x - m1)/s1 - m2)/s2 = (x - (m1 + s1 m2)) / (s1 s2)
    out.mean[c] = first.mean[c] + first.sd[c] * second.mean[c];
    out.sd[c] = first.sd[c] * second.sd[c];
    out.scaled[c] = first.scaled[c] || second.scaled[c];
  }
  return out;
}

DatasetSummary summarize(const Dataset& d) {
  DatasetSummary s;
  s.n_samples = d.n_samples();
  s.n_features = d.n_features();
  std::size_t minority = 0, minority_pos = 0, majority_pos = 0, pos = 0;
  for (std::size_t i = 0; i < d.n_samples(); ++i) {
    pos += d.target[i];
    if (d.sensitive[i]) {
      majority_pos += d.target[i];
    } else {
      ++minority;
      minority_pos += d.target[i];
    }
  }
  const std::size_t majority = s.n_samples - minority;
  if (s.n_samples) {
    s.minority_share = static_cast<double>(minority) / static_cast<double>(s.n_samples);
    s.positive_share = static_cast<double>(pos) / static_cast<double>(s.n_samples);
  }
  if (minority) s.minority_positive_rate = static_cast<double>(minority_pos) / static_cast<double>(minority);
  if (majority) s.majority_positive_rate = static_cast<double>(majority_pos) / static_cast<double>(majority);
  return s;
}

namespace {

ColumnRole parse_role(const std::string& text, const std::string& origin) {
  if (text == "feature") return ColumnRole::kFeature;
  if (text == "target") return ColumnRole::kTarget;
  if (text == "sensitive") return ColumnRole::kSensitive;
  if (text == "drop") return ColumnRole::kDrop;
  throw Error(ErrorCode::kParseError, origin + ": unknown column role '" + text + "'");
}

std::vector<std::string> split_values(const std::string& text) {
  if (text.empty()) return {};
  return split(text, '|');
}

}  // namespace

DatasetPreset load_preset(const std::filesystem::path& path) {
  const KvFile kv = KvFile::load(path);
  DatasetPreset preset;
  preset.name = path.stem().string();
  for (const auto& e : kv.entries()) {
    const std::string where = kv.origin() + ":" + std::to_string(e.line);
    if (e.key == "name") {
      preset.name = e.value;
    } else if (e.key == "source") {
      if (e.value == "csv") {
        preset.source = DatasetPreset::Source::kCsv;
      } else if (e.value == "synthetic") {
        preset.source = DatasetPreset::Source::kSynthetic;
      } else {
        throw Error(ErrorCode::kParseError, where + ": source must be csv or synthetic");
      }
    } else if (e.key == "files") {
      preset.files = split(e.value, ',');
    } else if (e.key == "header") {
      preset.csv.header = split(e.value, ',');
    } else if (e.key == "comment_prefix") {
      preset.csv.comment_prefix = e.value;
    } else if (e.key == "missing") {
      preset.csv.missing_tokens = split(e.value, '|');
    } else if (e.key == "column") {
      const auto parts = split(e.value, ',');
      if (parts.size() < 2 || parts.size() > 4) {
        throw Error(ErrorCode::kParseError,
                    where + ": column needs '<name>, <role>[, <one values>[, <zero values>]]'");
      }
      ColumnSpec c;
      c.csv_column = parts[0];
      c.role = parse_role(parts[1], where);
      if (parts.size() > 2) c.one_values = split_values(parts[2]);
      if (parts.size() > 3) c.zero_values = split_values(parts[3]);
      if ((c.role == ColumnRole::kTarget || c.role == ColumnRole::kSensitive) &&
          c.one_values.empty()) {
        throw Error(ErrorCode::kParseError, where + ": target/sensitive columns need a value list");
      }
      preset.columns.push_back(std::move(c));
    } else if (e.key == "synthetic.n_samples") {
      preset.synthetic.n_samples = static_cast<std::size_t>(parse_uint(e.value, e.key));
    } else if (e.key == "synthetic.minority_fraction") {
      preset.synthetic.minority_fraction = parse_double(e.value, e.key);
    } else if (e.key == "synthetic.bias_strength") {
      preset.synthetic.bias_strength = parse_double(e.value, e.key);
    } else if (e.key == "synthetic.noise_sd") {
      preset.synthetic.noise_sd = parse_double(e.value, e.key);
    } else if (e.key == "synthetic.seed") {
      preset.synthetic.seed = parse_uint(e.value, e.key);
    } else {
      throw Error(ErrorCode::kParseError, where + ": unknown preset key '" + e.key + "'");
    }
  }
  preset.csv.name = preset.name;
  return preset;
}

std::filesystem::path preset_directory() {
  if (const char* env = std::getenv("PSA_PRESET_DIR"); env && *env) return env;
  return PSA_DEFAULT_PRESET_DIR;
}

DatasetPreset find_preset(const std::string& name) {
  const auto path = preset_directory() / (name + ".preset");
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kIoError, "no preset named '" + name + "' in " +
                                         preset_directory().string());
  }
  return load_preset(path);
}

}  // namespace psa
