#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aspectlab/aspect.hpp"

namespace aspectlab {

struct TraceEvent {
  enum class Kind { kEnter, kExit, kEmit, kAdviceFired, kPointcutFired };

  Kind kind = Kind::kEmit;
  int shadow = -1;
  std::string this_object;  // kEnter; empty when absent
  std::string label;        // kEmit
  std::string aspect;       // kAdviceFired, kPointcutFired
  int advice_index = -1;
  AdviceKind advice_kind = AdviceKind::kBefore;
  std::string pointcut;  // kPointcutFired

  // Not serialized: the join point instance the event belongs to (for
  // Emit, the innermost join point in progress; -1 at top level).
  int join_point = -1;

  static TraceEvent enter(int shadow, std::string this_object);
  static TraceEvent exit(int shadow);
  static TraceEvent emit(std::string label);
  static TraceEvent advice_fired(std::string aspect, int index, AdviceKind kind, int shadow);
  static TraceEvent pointcut_fired(std::string aspect, std::string pointcut, int shadow);

  /// Tab-separated dump line.
  std::string to_line() const;

  bool operator==(const TraceEvent& o) const { return to_line() == o.to_line(); }
};

using Trace = std::vector<TraceEvent>;

std::string dump_trace(const Trace& trace);

/// Parses dump lines back into events. Throws Error(kSyntax).
Trace parse_trace(std::string_view text);

/// One expected-trace line: `...` or an event line (fields split on tabs or spaces).
struct TracePattern {
  bool skip = false;
  std::vector<std::string> fields;

  static TracePattern parse(std::string_view line);
  std::string to_string() const;
  bool matches(const TraceEvent& e) const;
};

struct TraceComparison {
  bool pass = true;
  // Furthest actual-trace index any alignment reached before failing.
  int divergence = -1;
  std::string expected;  // pattern at the divergence, if any
  std::string actual;    // event at the divergence, if any
};

TraceComparison compare_traces(const Trace& actual, const std::vector<TracePattern>& expected);

/// Exact equality with the first differing index; the fast path for baselines.
TraceComparison compare_exact(const Trace& actual, const Trace& expected);

struct ScenarioStep {
  enum class Kind { kNew, kInvoke };
  Kind kind = Kind::kNew;
  std::string variable;
  std::string name;  // class for kNew, method for kInvoke
  std::optional<int> arity;
  int line = 0;

  bool operator==(const ScenarioStep&) const = default;
};

struct Scenario {
  std::string name;
  std::vector<ScenarioStep> steps;
  std::optional<std::vector<TracePattern>> expected;
  int line = 0;
};

/// Parses `.scn` text. Throws Error(kSyntax). Class names are resolved at run time.
std::vector<Scenario> load_scenarios(std::string_view text);

std::string dump_scenarios(const std::vector<Scenario>& scenarios);

}  // namespace aspectlab
