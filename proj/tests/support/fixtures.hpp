#ifndef PSA_TESTS_FIXTURES_HPP_
#define PSA_TESTS_FIXTURES_HPP_

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "psa/data_model.hpp"

namespace fixture {

namespace fs = std::filesystem;

inline std::vector<std::uint8_t> random_bits(std::size_t n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<std::uint8_t> out(n);
  for (auto& b : out) b = coin(rng) ? 1 : 0;
  return out;
}

// Random Gaussian features with both groups and both classes present, and at
// least one minority positive, so every metric is defined.
inline psa::Dataset random_dataset(std::size_t n, std::size_t p, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  psa::Dataset d;
  d.name = "random";
  d.features = psa::Matrix(n, p);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < p; ++c) d.features(r, c) = normal(rng);
  }
  for (std::size_t c = 0; c < p; ++c) d.feature_names.push_back("x" + std::to_string(c));
  d.target = random_bits(n, 0.5, rng);
  d.sensitive = random_bits(n, 0.6, rng);
  // Pin the first rows so no group or class is ever empty.
  const std::uint8_t pinned[4][2] = {{1, 0}, {0, 0}, {1, 1}, {0, 1}};
  for (std::size_t i = 0; i < 4 && i < n; ++i) {
    d.target[i] = pinned[i][0];
    d.sensitive[i] = pinned[i][1];
  }
  return d;
}

inline fs::path fixture_path(const std::string& name) { return fs::path(PSA_FIXTURE_DIR) / name; }

// Raw benchmark files: $PSA_DATA_DIR, else <source>/data/raw.
inline fs::path data_dir() {
  if (const char* env = std::getenv("PSA_DATA_DIR"); env && *env) return env;
  return fs::path(PSA_SOURCE_DIR) / "data" / "raw";
}

inline bool have_files(const std::vector<std::string>& names) {
  for (const auto& n : names) {
    if (!fs::exists(data_dir() / n)) return false;
  }
  return true;
}

inline bool have_adult() { return have_files({"adult.data", "adult.test"}); }
inline bool have_recidivism() { return have_files({"compas-scores-two-years.csv"}); }

// Fresh empty directory under the system temp dir.
inline fs::path scratch_dir(const std::string& tag) {
  static std::mt19937_64 rng(std::random_device{}());
  fs::path dir = fs::temp_directory_path() / ("psa-test-" + tag + "-" + std::to_string(rng() % 1000000007));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct CommandResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

inline CommandResult run_cli(const std::string& args) {
  const std::string command = std::string("\"") + PSA_CLI_PATH + "\" " + args + " 2>&1";
  CommandResult result;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return result;
  char buf[4096];
  std::size_t got = 0;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) result.output.append(buf, got);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

inline void write_text(const fs::path& path, const std::string& text) {
  FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) return;
  std::fwrite(text.data(), 1, text.size(), f);
  std::fclose(f);
}

}  // namespace fixture

#endif  // PSA_TESTS_FIXTURES_HPP_
