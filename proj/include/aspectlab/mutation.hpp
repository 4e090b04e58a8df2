#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "aspectlab/aspect.hpp"
#include "aspectlab/interpreter.hpp"
#include "aspectlab/trace.hpp"

namespace aspectlab {

struct OperatorInfo {
  std::string id;
  std::string fault;        // fault-model bullet realized
  std::string realization;  // what the operator does, or why it is a surrogate
};

/// The traceability table: every operator in generation order.
const std::vector<OperatorInfo>& mutation_operators();

bool is_operator_id(const std::string& id);

enum class MutantStatus { kPending, kStillborn, kSurvived, kKilled, kFlaggedEquivalent };

std::string_view to_string(MutantStatus status);

struct Mutant {
  std::string id;
  std::string op;
  std::string location;
  std::string delta;
  std::vector<AspectDef> aspects;
  MutantStatus status = MutantStatus::kPending;
  std::string killer;  // killing scenario
  int divergence = -1;
  std::string reason;  // why stillborn
};

struct MutationConfig {
  std::set<std::string> operators;  // empty: all
  int sibling_cap = 3;
};

/// Deterministic enumeration; ids M001, M002, ... in operator-table order.
std::vector<Mutant> generate_mutants(const std::vector<AspectDef>& aspects, const ProgramModel& model,
                                     const MutationConfig& config = {});

struct MutationScore {
  int killed = 0;
  int survived = 0;
  int stillborn = 0;
  int equivalent = 0;

  /// killed / (killed + survived); nullopt when the denominator is zero.
  std::optional<double> score() const;
};

enum class OracleMode { kBaseline, kExpected };

struct AnalysisOptions {
  OracleMode oracle = OracleMode::kBaseline;
  int jobs = 1;
};

struct AnalysisResult {
  std::vector<Mutant> mutants;
  MutationScore score;
  std::vector<RunLog> baseline;
};

/// Runs every scenario against every mutant. Throws Error when the
/// unmutated aspects fail an expected trace (oracle kExpected) or do not weave.
AnalysisResult run_mutation_analysis(const ProgramModel& model, const std::vector<AspectDef>& aspects,
                                     const std::vector<Scenario>& scenarios, std::vector<Mutant> mutants,
                                     const AnalysisOptions& options = {},
                                     const std::vector<RunLog>* recorded_baseline = nullptr);

MutationScore tally(const std::vector<Mutant>& mutants);

/// `id\toperator\tlocation\tdelta\tstatus\tkiller` lines with a header.
std::string format_mutants_tsv(const std::vector<Mutant>& mutants);

}  // namespace aspectlab
