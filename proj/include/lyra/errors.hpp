#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace lyra {

// Categories map to CLI exit codes: usage/config = 2, data/format = 3,
// infeasible alignment = 4.
enum class ErrorCategory : int { usage = 2, data = 3, infeasible = 4 };

class Error : public std::runtime_error {
public:
  Error(std::string code, ErrorCategory cat, const std::string& msg)
      : std::runtime_error(msg), code_(std::move(code)), cat_(cat) {}
  const std::string& code() const { return code_; }
  ErrorCategory category() const { return cat_; }

private:
  std::string code_;
  ErrorCategory cat_;
};

#define LYRA_DEFINE_ERROR(Name, cat)                                        \
  class Name : public Error {                                               \
  public:                                                                   \
    explicit Name(const std::string& msg)                                   \
        : Error(#Name, ErrorCategory::cat, msg) {}                          \
  }

LYRA_DEFINE_ERROR(EmptyLyrics, data);
LYRA_DEFINE_ERROR(UnmappablePhoneme, data);
LYRA_DEFINE_ERROR(BadMagic, data);
LYRA_DEFINE_ERROR(UnsupportedVersion, data);
LYRA_DEFINE_ERROR(ShapeMismatch, data);
LYRA_DEFINE_ERROR(FormatError, data);
LYRA_DEFINE_ERROR(AllMasked, data);
LYRA_DEFINE_ERROR(LengthMismatch, data);
LYRA_DEFINE_ERROR(DegenerateLabels, data);
LYRA_DEFINE_ERROR(TooLarge, data);
LYRA_DEFINE_ERROR(EmptyInput, data);
LYRA_DEFINE_ERROR(InfeasibleLength, infeasible);
LYRA_DEFINE_ERROR(InfeasibleSpec, infeasible);
LYRA_DEFINE_ERROR(ConfigError, usage);

#undef LYRA_DEFINE_ERROR

}  // namespace lyra
