#include "psa/kv_config.hpp"

#include <fstream>
#include <sstream>

#include "psa/error.hpp"

namespace psa {

KvFile KvFile::parse(std::string_view text, const std::string& origin) {
  KvFile file;
  file.origin_ = origin;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kParseError,
                  origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    KvEntry entry{trim(std::string_view(line).substr(0, eq)),
                  trim(std::string_view(line).substr(eq + 1)), line_no};
    if (entry.key.empty()) {
      throw Error(ErrorCode::kParseError, origin + ":" + std::to_string(line_no) + ": empty key");
    }
    file.entries_.push_back(std::move(entry));
  }
  return file;
}

KvFile KvFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

std::optional<std::string> KvFile::get(std::string_view key) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->key == key) return it->value;
  }
  return std::nullopt;
}

std::vector<std::string> KvFile::get_all(std::string_view key) const {
  std::vector<std::string> out;
  for (const auto& e : entries_) {
    if (e.key == key) out.push_back(e.value);
  }
  return out;
}

}  // namespace psa
