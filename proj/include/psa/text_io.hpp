#ifndef PSA_TEXT_IO_HPP_
#define PSA_TEXT_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace psa {

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

// Strict conversions; throw Error(kParseError) naming `what` on failure.
double parse_double(std::string_view text, std::string_view what);
std::int64_t parse_int(std::string_view text, std::string_view what);
std::uint64_t parse_uint(std::string_view text, std::string_view what);
bool parse_bool(std::string_view text, std::string_view what);

// printf-style %.<digits>g with '.' as decimal separator regardless of locale.
std::string format_real(double value, int significant_digits);

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace psa

#endif  // PSA_TEXT_IO_HPP_
