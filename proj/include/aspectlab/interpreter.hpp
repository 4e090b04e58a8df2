#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "aspectlab/aspect.hpp"
#include "aspectlab/matcher.hpp"
#include "aspectlab/model.hpp"
#include "aspectlab/trace.hpp"

namespace aspectlab {

/// One pointcut evaluation at a join point (advice or named pointcut).
struct EvaluationRecord {
  std::string label;
  int shadow = 0;
  int event_index = 0;  // trace length when the evaluation happened
  MatchOutcome outcome;
};

/// A call join point's dispatch: receiver class and the method that ran.
struct DispatchRecord {
  int shadow = 0;
  std::string receiver_class;
  std::string target;  // `<declaring type>.<method>/<arity>`
  int event_index = 0;
};

/// A branch taken inside advice or an introduced method body.
struct BranchRecord {
  std::string owner;  // advice label or `<Type>.<method>/<arity>`
  int ordinal = 0;
  bool then_branch = true;
  int event_index = 0;
};

struct RunLog {
  std::string scenario;
  std::string model_hash;
  Trace trace;
  std::vector<EvaluationRecord> evaluations;
  std::vector<DispatchRecord> dispatches;
  std::vector<BranchRecord> branches;
  // Set when the run stopped on a runtime error; the trace is kept up to that point.
  std::optional<std::string> error;
  std::optional<ErrorCode> error_code;
};

struct ExecOptions {
  bool keep_logs = true;
  int max_frames = 10000;
};

/// Woven model plus everything needed to run scenarios over it. Immutable
/// after construction and shared read-only between threads.
class Runtime {
 public:
  /// Weaves `aspects` into `base`. Throws what weave_static throws.
  static std::unique_ptr<Runtime> build(const ProgramModel& base, std::vector<AspectDef> aspects);

  Runtime(const Runtime&) = delete;
  Runtime& operator=(const Runtime&) = delete;

  const ProgramModel& model() const { return model_; }
  const std::vector<AspectDef>& aspects() const { return aspects_; }
  const ShadowTable& shadows() const { return shadows_; }
  const Matcher& matcher() const { return matcher_; }
  const std::string& hash() const { return hash_; }

  struct AdviceRef {
    std::size_t aspect = 0;
    std::size_t index = 0;
  };
  /// All advice of non-abstract aspects, highest precedence first.
  const std::vector<AdviceRef>& advice_order() const { return order_; }

  /// Runs one scenario on a thread with a large stack. Runtime errors end
  /// the run and are reported in the log, never thrown.
  RunLog execute(const Scenario& scenario, const ExecOptions& options = {}) const;

 private:
  Runtime(ProgramModel model, std::vector<AspectDef> aspects);

  ProgramModel model_;
  std::vector<AspectDef> aspects_;
  ShadowTable shadows_;
  Matcher matcher_;
  std::string hash_;
  std::vector<AdviceRef> order_;
};

/// Rank of an aspect under concatenated `declare precedence` lists; lower runs first.
int precedence_rank(const std::vector<AspectDef>& aspects, const std::string& aspect_name);

}  // namespace aspectlab
