#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace aspectlab {

/// Dotted type pattern. A segment is a name chunk that may contain `*`
/// wildcards, or the literal ".." which spans any run of package segments.
struct TypePattern {
  static constexpr std::string_view kAnyPackages = "..";

  std::vector<std::string> segments;
  bool subtypes = false;  // trailing `+`

  static TypePattern any() { return TypePattern{{"*"}, false}; }

  bool has_wildcard() const;
  /// No `*`, no `..`: names one type and is resolved against the model.
  bool is_exact() const { return !has_wildcard(); }
  /// A bare identifier, which `this(...)`/`target(...)` may treat as a variable.
  bool is_identifier() const;
  int star_count() const;

  bool operator==(const TypePattern&) const = default;
};

struct NamePattern {
  std::string text;

  int star_count() const;
  bool operator==(const NamePattern&) const = default;
};

struct ParamPattern {
  enum class Kind { kAny, kEmpty, kArity };
  Kind kind = Kind::kAny;
  int arity = 0;

  bool accepts(int count) const;
  bool operator==(const ParamPattern&) const = default;
};

struct MethodPattern {
  TypePattern return_type = TypePattern::any();
  TypePattern declaring_type = TypePattern::any();
  NamePattern name;
  ParamPattern params;

  bool operator==(const MethodPattern&) const = default;
};

enum class PrimKind { kCall, kExecution, kWithin, kWithincode, kThis, kTarget, kCflow };

std::string_view to_string(PrimKind kind);

struct PointcutExpr;

struct PrimitivePointcut {
  PrimKind kind = PrimKind::kExecution;
  MethodPattern method;            // call, execution, withincode
  TypePattern type;                // within, this, target
  std::vector<PointcutExpr> inner; // cflow: exactly one element

  bool uses_method_pattern() const;
  bool is_dynamic() const { return kind == PrimKind::kThis || kind == PrimKind::kTarget || kind == PrimKind::kCflow; }
  bool operator==(const PrimitivePointcut&) const;
};

struct PointcutExpr {
  enum class Op { kAnd, kOr, kNot, kNamed, kPrim };

  Op op = Op::kPrim;
  std::vector<PointcutExpr> children;  // kAnd/kOr: 2, kNot: 1
  std::string name;                    // kNamed
  std::vector<std::string> args;       // kNamed
  PrimitivePointcut prim;              // kPrim

  static PointcutExpr make_and(PointcutExpr l, PointcutExpr r);
  static PointcutExpr make_or(PointcutExpr l, PointcutExpr r);
  static PointcutExpr make_not(PointcutExpr inner);
  static PointcutExpr make_named(std::string name, std::vector<std::string> args = {});
  static PointcutExpr make_prim(PrimitivePointcut prim);

  bool operator==(const PointcutExpr&) const = default;
};

/// Parses pointcut text. Precedence `!` > `&&` > `||`, both binary
/// operators left-associative. Throws Error(kSyntax) carrying the offending
/// 0-based character offset and the expected tokens.
PointcutExpr parse_pointcut(std::string_view text);

/// Canonical form with minimal parentheses; parse_pointcut(pretty_print(e)) == e.
std::string pretty_print(const PointcutExpr& expr);
std::string pretty_print(const PrimitivePointcut& prim);
std::string pretty_print(const TypePattern& pattern);
std::string pretty_print(const MethodPattern& pattern);

struct PointcutParam {
  std::string type;
  std::string name;

  bool operator==(const PointcutParam&) const = default;
};

struct NamedPointcut {
  std::string name;
  std::vector<PointcutParam> params;
  PointcutExpr expr;
  int line = 0;

  bool has_param(std::string_view var) const;
  bool operator==(const NamedPointcut&) const = default;
};

/// One leaf of a pointcut after named references are inlined.
struct Condition {
  PrimitivePointcut prim;
  // Odd number of negations between the root and this leaf.
  bool negated = false;
  // Named pointcut that textually owns the leaf, empty for the root expression.
  std::string owner;

  std::string describe() const;
};

const NamedPointcut* find_named(const std::vector<NamedPointcut>& named, std::string_view name);

/// In-order leaves after inlining named references; cflow is one leaf.
/// Throws Error(kUnresolvedNamedPointcut).
std::vector<Condition> flatten_conditions(const PointcutExpr& expr, const std::vector<NamedPointcut>& named);

/// Evaluates the and/or/not structure of `expr` over per-leaf values
/// (aligned with flatten_conditions, polarity already applied).
bool combine_conditions(const PointcutExpr& expr, const std::vector<NamedPointcut>& named,
                        const std::vector<bool>& literal_values);

}  // namespace aspectlab
