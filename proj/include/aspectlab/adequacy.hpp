#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "aspectlab/aspect.hpp"
#include "aspectlab/interpreter.hpp"
#include "aspectlab/matcher.hpp"

namespace aspectlab {

enum class ObligationKind {
  kConditionCombo,
  kWildcardBoundary,
  kHierarchyBoundary,
  kJoinPointCoverage,
  kAllReceiverClasses,
  kAllTargetMethods,
  kAdviceBranch,
};

constexpr std::array<ObligationKind, 7> kAllObligationKinds = {
    ObligationKind::kConditionCombo,     ObligationKind::kWildcardBoundary,   ObligationKind::kHierarchyBoundary,
    ObligationKind::kJoinPointCoverage,  ObligationKind::kAllReceiverClasses, ObligationKind::kAllTargetMethods,
    ObligationKind::kAdviceBranch};

std::string_view to_string(ObligationKind kind);
std::string_view id_prefix(ObligationKind kind);

enum class ConditionMode { kEachCondition, kExhaustive };

struct Obligation {
  std::string id;
  ObligationKind kind = ObligationKind::kConditionCombo;
  // Pointcut label (CC, WB, HB, JP), branch owner (AB); empty for RC/TM.
  std::string label;
  std::vector<bool> vector;                 // CC
  std::vector<std::string> conditions;      // CC: primitive kind per position, for hints
  int occurrence = -1;                      // WB
  Witness required = Witness::kEmpty;       // WB
  int pattern = -1;                         // HB: index among the label's `+` patterns
  std::string type;                         // HB subject, RC receiver class, TM target method
  bool expect_match = true;                 // HB
  int shadow = -1;                          // JP, RC, TM
  int ordinal = -1;                         // AB
  bool then_branch = true;                  // AB
  std::string detail;

  bool met = false;
  std::string met_by;  // scenario name
  int met_event = -1;
  std::string hint;

  std::string status() const;
};

/// Truth vectors required for a pointcut with `n` conditions.
std::vector<std::vector<bool>> condition_vectors(std::size_t n, ConditionMode mode);

/// Pointcut labels that own their own text: every named pointcut, and every
/// advice whose pointcut is not a bare named reference.
struct LabelledPointcut {
  std::size_t aspect = 0;
  std::string label;
  const PointcutExpr* expr = nullptr;
  PointcutContext context;
};
std::vector<LabelledPointcut> labelled_pointcuts(const std::vector<AspectDef>& aspects);

std::vector<Obligation> gen_condition_obligations(const PointcutExpr& expr, const AspectDef& aspect,
                                                  const std::string& label, ConditionMode mode);
std::vector<Obligation> gen_wildcard_obligations(const std::vector<AspectDef>& aspects);
std::vector<Obligation> gen_hierarchy_obligations(const std::vector<AspectDef>& aspects, const ProgramModel& model,
                                                  Diagnostics* diagnostics = nullptr);
std::vector<Obligation> gen_joinpoint_obligations(const Runtime& runtime, Diagnostics* diagnostics = nullptr);
/// Call sites with at least two concrete receiver classes, one of which
/// dispatches to an introduced method.
std::vector<Obligation> gen_polymorphic_obligations(const Runtime& runtime);
std::vector<Obligation> gen_advice_branch_obligations(const Runtime& runtime);

struct ObligationConfig {
  ConditionMode mode = ConditionMode::kEachCondition;
};

struct ObligationSet {
  std::vector<Obligation> obligations;
  Diagnostics diagnostics;
};

/// Every kind, ids assigned per kind in generation order (`CC.1`, `WB.1`, ...).
ObligationSet generate_obligations(const Runtime& runtime, const ObligationConfig& config);

/// Exact type names in pointcuts that the model cannot resolve.
std::vector<std::string> unresolved_pattern_names(const std::vector<AspectDef>& aspects, const ProgramModel& model);

struct KindTally {
  ObligationKind kind;
  int met = 0;
  int total = 0;
  double fraction() const { return total == 0 ? 1.0 : static_cast<double>(met) / total; }
};

struct CoverageReport {
  std::vector<KindTally> per_kind;
  int met = 0;
  int total = 0;
  std::vector<std::string> warnings;
  double overall() const { return total == 0 ? 1.0 : static_cast<double>(met) / total; }
  const KindTally& tally(ObligationKind kind) const;
};

/// Marks obligations met from run logs. Throws Error(kStaleLog) when a log
/// was produced over a different woven program.
CoverageReport check_coverage(std::vector<Obligation>& obligations, const std::vector<RunLog>& logs,
                              const std::string& expected_hash);

std::string format_obligation(const Obligation& o);
std::string format_report(const CoverageReport& report, const std::vector<Obligation>& obligations);

}  // namespace aspectlab
