#ifndef PSA_KV_CONFIG_HPP_
#define PSA_KV_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "psa/text_io.hpp"

namespace psa {

// Line-oriented `key = value` files. Blank lines and lines whose first
// non-blank character is '#' are ignored. Keys may repeat; order is kept.
struct KvEntry {
  std::string key;
  std::string value;
  int line = 0;
};

class KvFile {
 public:
  static KvFile parse(std::string_view text, const std::string& origin = "<string>");
  static KvFile load(const std::filesystem::path& path);

  const std::vector<KvEntry>& entries() const noexcept { return entries_; }
  const std::string& origin() const noexcept { return origin_; }

  // Last value for key, if any.
  std::optional<std::string> get(std::string_view key) const;
  std::vector<std::string> get_all(std::string_view key) const;

 private:
  std::vector<KvEntry> entries_;
  std::string origin_;
};

}  // namespace psa

#endif  // PSA_KV_CONFIG_HPP_
