#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "aspectlab/error.hpp"
#include "aspectlab/matcher.hpp"
#include "aspectlab/model.hpp"
#include "aspectlab/pointcut.hpp"

namespace aspectlab {

enum class AdviceKind { kBefore, kAfter, kAfterReturning, kAround };

std::string_view to_string(AdviceKind kind);

struct AdviceDef {
  AdviceKind kind = AdviceKind::kBefore;
  std::vector<PointcutParam> params;
  PointcutExpr pointcut;
  Body body;
  int line = 0;

  bool operator==(const AdviceDef&) const = default;
};

struct DeclareParents {
  TypePattern pattern;
  std::string interface_name;  // as written
  int line = 0;

  bool operator==(const DeclareParents&) const = default;
};

struct Introduction {
  std::string target_type;  // as written
  MethodDecl method;
  int line = 0;

  bool operator==(const Introduction&) const = default;
};

struct AspectDef {
  std::string name;
  bool privileged = false;
  bool is_abstract = false;
  std::vector<DeclareParents> declare_parents;
  std::vector<Introduction> introductions;
  std::vector<NamedPointcut> named;
  std::vector<AdviceDef> advice;
  std::vector<std::string> precedence;  // aspect-name patterns, empty if undeclared
  bool declares_precedence = false;
  int line = 0;

  /// `<Aspect>.advice#<k>`
  std::string advice_label(std::size_t index) const;
  /// `<Aspect>.<pointcut>`
  std::string pointcut_label(const NamedPointcut& pc) const;
  PointcutContext advice_context(std::size_t index) const;
  PointcutContext pointcut_context(const NamedPointcut& pc) const;

  bool operator==(const AspectDef&) const = default;
};

struct AspectLoad {
  std::vector<AspectDef> aspects;
  Diagnostics diagnostics;
};

/// Parses and validates `.apa` text. Throws Error (kSyntax,
/// kDuplicatePointcutName, kUnresolvedNamedPointcut, kUnsupportedNesting).
AspectLoad load_aspects(std::string_view text);

/// Checks that don't need a model: named references, parameter binding,
/// cflow nesting, proceed counts. Used by the loader and on mutants.
void validate_aspect(const AspectDef& aspect);

/// Applies declare-parents and introductions to a copy of `model`.
/// Throws Error (kResolution, kCycle, kIntroductionCollision).
ProgramModel weave_static(const ProgramModel& model, const std::vector<AspectDef>& aspects);

/// Serializes aspects back to `.apa` text; load_aspects of the result is equal.
std::string dump_aspects(const std::vector<AspectDef>& aspects);

}  // namespace aspectlab
