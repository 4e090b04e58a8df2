#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "aspectlab/model.hpp"
#include "aspectlab/pointcut.hpp"

namespace aspectlab {

enum class ShadowKind { kCall, kExecution };

std::string_view to_string(ShadowKind kind);

/// Static location of a possible join point.
struct Shadow {
  int id = 0;
  ShadowKind kind = ShadowKind::kExecution;
  // Signature: for calls the static receiver type, for executions the declaring type.
  std::string declaring_type;
  std::string method;
  int arity = 0;
  std::string return_type;
  // Enclosing method (call shadows), or the method itself (execution shadows).
  std::string site_type;
  std::string site_method;
  int site_arity = 0;
  int site_index = -1;  // pre-order statement index within the site body
  bool is_super = false;

  /// Type whose code contains the join point.
  const std::string& enclosing_type() const { return site_type; }
  /// `<type>.<method>/<arity>`
  std::string signature() const;
  /// `<type>.<method>#<index>` for call shadows, empty for executions.
  std::string site() const;
};

/// Shadows of one model instance, in deterministic model order. Keyed by
/// the addresses of the model's MethodDecl/Stmt objects, so the table is only
/// valid for the model it was built from.
class ShadowTable {
 public:
  const std::vector<Shadow>& all() const { return shadows_; }
  const Shadow& at(int id) const { return shadows_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return shadows_.size(); }

  std::optional<int> execution_of(const MethodDecl* method) const;
  std::optional<int> call_at(const Stmt* stmt) const;

 private:
  friend ShadowTable compute_shadows(const ProgramModel& model);
  std::vector<Shadow> shadows_;
  std::unordered_map<const MethodDecl*, int> exec_;
  std::unordered_map<const Stmt*, int> call_;
};

ShadowTable compute_shadows(const ProgramModel& model);

/// Static receiver type of a call statement inside `site_type`'s `body`.
std::string static_receiver_type(const ProgramModel& model, const std::string& site_type, const Body& body,
                                 const Stmt& call);

enum class Witness { kNoMatch, kEmpty, kNonEmpty };

std::string_view to_string(Witness w);

struct TypeMatch {
  bool matched = false;
  std::vector<Witness> witnesses;  // one per `*`, in pattern order
};

/// Matches a qualified name; `$k` suffixes of anonymous classes count as
/// their own segment; a lone `*` matches every type. Exact patterns are
/// resolved against the model first.
TypeMatch match_type_pattern(const TypePattern& pattern, std::string_view type_name, const ProgramModel& model);

/// Chunk match of a name against a `*`-pattern, leftmost-longest.
TypeMatch match_name_pattern(const NamePattern& pattern, std::string_view name);

struct RuntimeObject {
  std::string class_name;
  int serial = 0;

  std::string to_string() const { return class_name + "#" + std::to_string(serial); }
  bool operator==(const RuntimeObject&) const = default;
};

struct JoinPoint {
  int shadow = 0;
  std::optional<RuntimeObject> this_object;
  std::optional<RuntimeObject> target_object;
  std::vector<int> call_stack;  // outermost first; includes `shadow` as last entry
};

struct WildcardWitness {
  std::string owner;  // pointcut label owning the pattern text
  int occurrence = 0;
  Witness state = Witness::kNoMatch;

  bool operator==(const WildcardWitness&) const = default;
};

struct HierarchyProbe {
  std::string owner;
  int pattern = 0;  // index among the owner's `+` patterns
  std::string subject_type;
  bool matched = false;

  bool operator==(const HierarchyProbe&) const = default;
};

struct MatchOutcome {
  bool matched = false;
  std::vector<bool> condition_vector;  // literal values, aligned with flatten_conditions
  std::vector<WildcardWitness> witnesses;
  std::vector<HierarchyProbe> probes;
  std::map<std::string, RuntimeObject> bindings;

  bool operator==(const MatchOutcome&) const = default;
};

/// What a pointcut is evaluated against: its named siblings, the variables
/// its root declares, and the label used for pattern bookkeeping.
struct PointcutContext {
  const std::vector<NamedPointcut>* named = nullptr;
  std::vector<PointcutParam> params;
  std::string label;
  // Prefix for the labels of named pointcuts, normally the aspect name.
  std::string scope;
};

struct SignatureMatch {
  bool matched = false;
  TypeMatch return_type;
  TypeMatch declaring_type;
  TypeMatch name;
  bool params = false;
};

class Matcher {
 public:
  Matcher(const ProgramModel& model, const ShadowTable& shadows);

  const ProgramModel& model() const { return model_; }
  const ShadowTable& shadows() const { return shadows_; }

  /// Every shadow at which `expr` could match: static conditions exact,
  /// this/target/cflow optimistic.
  std::set<int> static_shadows(const PointcutExpr& expr, const PointcutContext& ctx) const;

  /// Three-valued static evaluation at one shadow: 1 true, 0 false, -1 unknown.
  int static_eval(const PointcutExpr& expr, const PointcutContext& ctx, int shadow) const;

  /// Full dynamic evaluation without short-circuiting.
  MatchOutcome eval(const PointcutExpr& expr, const PointcutContext& ctx, const JoinPoint& jp) const;

  /// Static truth of a call/execution/within/withincode primitive at a shadow.
  bool static_primitive(const PrimitivePointcut& prim, int shadow) const;

  /// Signature match with the declaring type tried against the given type
  /// and then every supertype that also declares the method.
  SignatureMatch match_signature(const MethodPattern& pattern, const std::string& type, const std::string& method,
                                 int arity, const std::string& return_type) const;

  TypeMatch match_type(const TypePattern& pattern, const std::string& type) const;

  /// Proper supertypes, cached for model types.
  const std::vector<std::string>& supertypes(const std::string& type) const;

 private:
  class Evaluation;

  const ProgramModel& model_;
  const ShadowTable& shadows_;
  std::unordered_map<std::string, std::vector<std::string>> closure_;
  std::vector<std::string> builtin_closure_;
};

struct PatternSite {
  const TypePattern* type = nullptr;  // either type or name is set
  const NamePattern* name = nullptr;
  int wildcard_base = 0;  // index of the pattern's first `*` among the owner's occurrences
  int plus_index = -1;    // index among the owner's `+` patterns, -1 if none
  std::string role;       // "return", "declaring", "name", "within", "this", "target"
  PrimKind prim = PrimKind::kExecution;
};

/// Patterns of a pointcut's own text (named references are not entered),
/// in the order evaluation records witnesses. `params` identifies
/// this/target variables, which are not patterns.
std::vector<PatternSite> pattern_sites(const PointcutExpr& expr, const std::vector<PointcutParam>& params);

}  // namespace aspectlab
