#include "aspectlab/error.hpp"

namespace aspectlab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSyntax: return "SyntaxError";
    case ErrorCode::kResolution: return "ResolutionError";
    case ErrorCode::kCycle: return "CycleError";
    case ErrorCode::kUnknownType: return "UnknownType";
    case ErrorCode::kNoSuchMethod: return "NoSuchMethod";
    case ErrorCode::kUnresolvedNamedPointcut: return "UnresolvedNamedPointcut";
    case ErrorCode::kDuplicatePointcutName: return "DuplicatePointcutName";
    case ErrorCode::kIntroductionCollision: return "IntroductionCollision";
    case ErrorCode::kUnsupportedNesting: return "UnsupportedNesting";
    case ErrorCode::kRuntimeBinding: return "RuntimeBindingError";
    case ErrorCode::kStackLimit: return "StackLimit";
    case ErrorCode::kStaleLog: return "StaleLog";
    case ErrorCode::kStaleBaseline: return "StaleBaseline";
    case ErrorCode::kIo: return "IoError";
  }
  return "Error";
}

namespace {

std::string compose(ErrorCode code, const std::string& message, int line, int position) {
  std::string out(to_string(code));
  if (line > 0) out += " at line " + std::to_string(line);
  if (position >= 0) out += " at position " + std::to_string(position);
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, std::string message, int line, int position)
    : std::runtime_error(compose(code, message, line, position)),
      code_(code),
      line_(line),
      position_(position),
      detail_(std::move(message)) {}

}  // namespace aspectlab
