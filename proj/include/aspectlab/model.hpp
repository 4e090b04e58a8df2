#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "aspectlab/error.hpp"

namespace aspectlab {

enum class TypeKind { kClass, kInterface };

struct Receiver {
  enum class Kind { kThis, kVariable, kNew };
  Kind kind = Kind::kThis;
  std::string name;  // variable name, or class name for kNew

  bool operator==(const Receiver&) const = default;
};

/// One statement of a method, advice or introduction body.
struct Stmt {
  enum class Kind { kEmit, kCall, kSuperCall, kNew, kIfType, kProceed };

  Kind kind = Kind::kEmit;
  std::string label;      // kEmit
  std::string method;     // kCall, kSuperCall
  Receiver receiver;      // kCall
  int arg_count = 0;      // kCall
  std::string variable;   // kNew, kIfType
  std::string type_name;  // kNew, kIfType
  std::vector<Stmt> then_body;
  std::vector<Stmt> else_body;
  // Pre-order index of an kIfType among the if-statements of its body.
  int ordinal = -1;

  static Stmt emit(std::string label);
  static Stmt call(Receiver receiver, std::string method, int arg_count);
  static Stmt super_call(std::string method);
  static Stmt make_new(std::string variable, std::string type_name);
  static Stmt if_type(std::string variable, std::string type_name, std::vector<Stmt> then_body,
                      std::vector<Stmt> else_body);
  static Stmt proceed();

  bool operator==(const Stmt&) const = default;
};

using Body = std::vector<Stmt>;

/// Assigns pre-order ordinals to every if-statement in `body`. Returns the count.
int number_branches(Body& body);

struct MethodDecl {
  std::string name;
  std::string return_type = "void";
  std::vector<std::string> param_types;
  bool is_abstract = false;
  Body body;
  // Set by weaving only.
  std::optional<std::string> introduced_by;
  int introduction_index = -1;

  int arity() const { return static_cast<int>(param_types.size()); }
  bool operator==(const MethodDecl&) const = default;
};

struct FieldDecl {
  std::string name;
  std::string type;

  bool operator==(const FieldDecl&) const = default;
};

struct TypeDecl {
  std::string name;  // qualified
  TypeKind kind = TypeKind::kClass;
  // For interfaces the first super-interface lives here, the rest in `implements`.
  std::optional<std::string> extends;
  std::vector<std::string> implements;
  bool anonymous = false;
  std::optional<std::string> enclosing;
  // Name written in the model file for anonymous classes; resolvable like a type name.
  std::optional<std::string> alias;
  std::vector<MethodDecl> methods;
  std::vector<FieldDecl> fields;
  int line = 0;

  bool is_interface() const { return kind == TypeKind::kInterface; }
  const MethodDecl* find_method(std::string_view method, std::optional<int> arity = {}) const;
  const FieldDecl* find_field(std::string_view field) const;
  bool operator==(const TypeDecl& other) const;
};

/// The modelled object-oriented program. Immutable once loaded; weaving
/// produces a new model.
class ProgramModel {
 public:
  static constexpr std::string_view kObject = "Object";

  const std::vector<TypeDecl>& types() const { return types_; }
  bool empty() const { return types_.empty(); }

  const TypeDecl* find(std::string_view qualified) const;
  /// Throws ErrorCode::kUnknownType.
  const TypeDecl& get(std::string_view qualified) const;
  TypeDecl* find_mutable(std::string_view qualified);

  static bool is_builtin(std::string_view name);
  bool is_known(std::string_view name) const { return is_builtin(name) || find(name) != nullptr; }

  /// Resolves a written type reference to its qualified name: built-ins,
  /// exact qualified names, `package.name`, aliases of anonymous classes,
  /// then a unique simple-name match. Returns nullopt if unresolvable or
  /// ambiguous.
  std::optional<std::string> resolve(std::string_view written, std::string_view package = {}) const;

  void add_type(TypeDecl type);

  bool operator==(const ProgramModel& other) const { return types_ == other.types_; }

 private:
  std::vector<TypeDecl> types_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Parses and validates `.apm` text. Throws Error (kSyntax, kResolution, kCycle).
ProgramModel load_model(std::string_view text);

/// Checks every structural invariant; used after loading and after weaving.
void validate_model(const ProgramModel& model);

/// `extends` (or implicit Object for classes) followed by `implements`, in declaration order.
std::vector<std::string> immediate_supertypes(const ProgramModel& model, std::string_view type);

/// Every proper supertype, breadth-first from the immediate ones, without duplicates.
std::vector<std::string> supertypes_closure(const ProgramModel& model, std::string_view type);

/// Every type reaching `type` through extends/implements edges, including itself.
std::set<std::string> subtypes_transitive(const ProgramModel& model, std::string_view type);

bool is_subtype(const ProgramModel& model, std::string_view sub, std::string_view super);

/// A class declaring an abstract method, or any interface.
bool is_abstract_type(const ProgramModel& model, std::string_view type);

struct DispatchTarget {
  std::string declaring_type;
  const MethodDecl* method = nullptr;
};

/// Walks the extends chain upward from `runtime_class`; first non-abstract
/// method named `method` (and with `arity`, when given). Throws kNoSuchMethod.
DispatchTarget resolve_dispatch(const ProgramModel& model, std::string_view runtime_class,
                                std::string_view method, std::optional<int> arity = {});

/// Enclosing chain of an anonymous class, innermost first (excluding itself).
std::vector<std::string> enclosing_chain(const ProgramModel& model, std::string_view type);

/// Statements in source syntax, `;`-separated.
std::string format_body(const Body& body);

/// Canonical text of a model; stable across runs, used for hashing and diffing.
std::string dump_model(const ProgramModel& model);

/// 16-hex-digit FNV-1a hash of dump_model.
std::string model_hash(const ProgramModel& model);

std::string fnv1a_hex(std::string_view data);

}  // namespace aspectlab
