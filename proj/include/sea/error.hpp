#pragma once

#include <stdexcept>
#include <string>

namespace sea {

// Every rejected input or failed hard validation surfaces as an Error. The
// three fields map one-to-one onto the CLI error JSON
// {"error": code, "field": path, "detail": text}.
class Error : public std::runtime_error {
 public:
  Error(std::string code, std::string field, std::string detail);

  const std::string& code() const noexcept { return code_; }
  const std::string& field() const noexcept { return field_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string code_;
  std::string field_;
  std::string detail_;
};

namespace errc {
inline constexpr const char* kInvalidArgument = "invalid_argument";
inline constexpr const char* kDimensionMismatch = "dimension_mismatch";
inline constexpr const char* kNotHermitian = "not_hermitian";
inline constexpr const char* kNotPsd = "not_psd";
inline constexpr const char* kTrace = "trace";
inline constexpr const char* kParse = "parse_error";
inline constexpr const char* kNotCommuting = "not_commuting";
inline constexpr const char* kUnsupportedState = "unsupported_state";
inline constexpr const char* kBracket = "bracket_failure";
inline constexpr const char* kVerification = "verification_failure";
inline constexpr const char* kIo = "io_error";
}  // namespace errc

}  // namespace sea
