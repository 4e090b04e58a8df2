#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace aspectlab {

enum class ErrorCode {
  kSyntax,
  kResolution,
  kCycle,
  kUnknownType,
  kNoSuchMethod,
  kUnresolvedNamedPointcut,
  kDuplicatePointcutName,
  kIntroductionCollision,
  kUnsupportedNesting,
  kRuntimeBinding,
  kStackLimit,
  kStaleLog,
  kStaleBaseline,
  kIo,
};

std::string_view to_string(ErrorCode code);

/// Every load, validation and runtime failure is reported through this type.
/// `line` is 1-based when known (0 otherwise); `position` is a 0-based
/// character offset used by the pointcut parser.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, int line = 0, int position = -1);

  ErrorCode code() const noexcept { return code_; }
  int line() const noexcept { return line_; }
  int position() const noexcept { return position_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  int line_;
  int position_;
  std::string detail_;
};

enum class Severity { kWarning, kError };

struct Diagnostic {
  Severity severity = Severity::kWarning;
  std::string code;
  std::string message;
  int line = 0;

  bool operator==(const Diagnostic&) const = default;
};

using Diagnostics = std::vector<Diagnostic>;

}  // namespace aspectlab
