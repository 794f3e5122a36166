#ifndef PSA_ERROR_HPP_
#define PSA_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace psa {

enum class ErrorCode {
  kShapeMismatch,
  kDimensionMismatch,
  kEmptyGroup,
  kNonBinaryColumn,
  kTooFewSamples,
  kInvalidConfig,
  kEmptyArchive,
  kDivergence,
  kMissingColumn,
  kUnmappableValue,
  kEmptyAfterFiltering,
  kNotAPsaReport,
  kSplitMismatch,
  kIoError,
  kParseError,
};

std::string_view error_code_name(ErrorCode code);

// Every failure raised by the library carries a code so the CLI can map it
// to an exit status and tag the message with its origin.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace psa

#endif  // PSA_ERROR_HPP_
