#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "aspectlab/interpreter.hpp"

namespace aspectlab {

/// One JSON object per line, one line per scenario run.
std::string run_logs_to_jsonl(const std::vector<RunLog>& logs);

/// Throws Error(kSyntax) on malformed input.
std::vector<RunLog> run_logs_from_jsonl(std::string_view text);

}  // namespace aspectlab
