#include <algorithm>
#include <functional>

#include "aspectlab/error.hpp"
#include "aspectlab/pointcut.hpp"

namespace aspectlab {

bool TypePattern::has_wildcard() const {
  return std::any_of(segments.begin(), segments.end(), [](const std::string& s) {
    return s == kAnyPackages || s.find('*') != std::string::npos;
  });
}

bool TypePattern::is_identifier() const {
  return segments.size() == 1 && !subtypes && segments[0].find('*') == std::string::npos &&
         segments[0].find('$') == std::string::npos;
}

int TypePattern::star_count() const {
  int n = 0;
  for (const auto& s : segments) n += static_cast<int>(std::count(s.begin(), s.end(), '*'));
  return n;
}

int NamePattern::star_count() const { return static_cast<int>(std::count(text.begin(), text.end(), '*')); }

bool ParamPattern::accepts(int count) const {
  switch (kind) {
    case Kind::kAny: return true;
    case Kind::kEmpty: return count == 0;
    case Kind::kArity: return count == arity;
  }
  return false;
}

std::string_view to_string(PrimKind kind) {
  switch (kind) {
    case PrimKind::kCall: return "call";
    case PrimKind::kExecution: return "execution";
    case PrimKind::kWithin: return "within";
    case PrimKind::kWithincode: return "withincode";
    case PrimKind::kThis: return "this";
    case PrimKind::kTarget: return "target";
    case PrimKind::kCflow: return "cflow";
  }
  return "?";
}

bool PrimitivePointcut::uses_method_pattern() const {
  return kind == PrimKind::kCall || kind == PrimKind::kExecution || kind == PrimKind::kWithincode;
}

bool PrimitivePointcut::operator==(const PrimitivePointcut& o) const {
  if (kind != o.kind) return false;
  if (uses_method_pattern()) return method == o.method;
  if (kind == PrimKind::kCflow) return inner == o.inner;
  return type == o.type;
}

PointcutExpr PointcutExpr::make_and(PointcutExpr l, PointcutExpr r) {
  PointcutExpr e;
  e.op = Op::kAnd;
  e.children.push_back(std::move(l));
  e.children.push_back(std::move(r));
  return e;
}

PointcutExpr PointcutExpr::make_or(PointcutExpr l, PointcutExpr r) {
  PointcutExpr e = make_and(std::move(l), std::move(r));
  e.op = Op::kOr;
  return e;
}

PointcutExpr PointcutExpr::make_not(PointcutExpr inner) {
  PointcutExpr e;
  e.op = Op::kNot;
  e.children.push_back(std::move(inner));
  return e;
}

PointcutExpr PointcutExpr::make_named(std::string name, std::vector<std::string> args) {
  PointcutExpr e;
  e.op = Op::kNamed;
  e.name = std::move(name);
  e.args = std::move(args);
  return e;
}

PointcutExpr PointcutExpr::make_prim(PrimitivePointcut prim) {
  PointcutExpr e;
  e.op = Op::kPrim;
  e.prim = std::move(prim);
  return e;
}

std::string pretty_print(const TypePattern& pattern) {
  std::string out;
  bool prev_dots = true;
  for (const auto& seg : pattern.segments) {
    if (seg == TypePattern::kAnyPackages) {
      out += "..";
      prev_dots = true;
      continue;
    }
    if (!prev_dots) out += '.';
    out += seg;
    prev_dots = false;
  }
  if (pattern.subtypes) out += '+';
  return out;
}

std::string pretty_print(const MethodPattern& m) {
  std::string out = pretty_print(m.return_type) + ' ' + pretty_print(m.declaring_type) + '.' + m.name.text;
  switch (m.params.kind) {
    case ParamPattern::Kind::kAny: out += "(..)"; break;
    case ParamPattern::Kind::kEmpty: out += "()"; break;
    case ParamPattern::Kind::kArity:
      out += '(';
      for (int i = 0; i < m.params.arity; ++i) out += i ? ", *" : "*";
      out += ')';
      break;
  }
  return out;
}

std::string pretty_print(const PrimitivePointcut& prim) {
  std::string out(to_string(prim.kind));
  out += '(';
  if (prim.uses_method_pattern()) {
    out += pretty_print(prim.method);
  } else if (prim.kind == PrimKind::kCflow) {
    out += prim.inner.empty() ? std::string() : pretty_print(prim.inner.front());
  } else {
    out += pretty_print(prim.type);
  }
  out += ')';
  return out;
}

namespace {

int precedence(const PointcutExpr& e) {
  switch (e.op) {
    case PointcutExpr::Op::kOr: return 1;
    case PointcutExpr::Op::kAnd: return 2;
    case PointcutExpr::Op::kNot: return 3;
    default: return 4;
  }
}

std::string print_child(const PointcutExpr& child, int min_prec) {
  std::string s = pretty_print(child);
  return precedence(child) < min_prec ? "(" + s + ")" : s;
}

}  // namespace

std::string pretty_print(const PointcutExpr& expr) {
  switch (expr.op) {
    case PointcutExpr::Op::kAnd:
    case PointcutExpr::Op::kOr: {
      int p = precedence(expr);
      const char* op = expr.op == PointcutExpr::Op::kAnd ? " && " : " || ";
      // Left-associative: a right child of equal precedence needs parentheses.
      return print_child(expr.children[0], p) + op + print_child(expr.children[1], p + 1);
    }
    case PointcutExpr::Op::kNot:
      return "!" + print_child(expr.children[0], 3);
    case PointcutExpr::Op::kNamed: {
      std::string out = expr.name + "(";
      for (std::size_t i = 0; i < expr.args.size(); ++i) out += (i ? ", " : "") + expr.args[i];
      return out + ")";
    }
    case PointcutExpr::Op::kPrim:
      return pretty_print(expr.prim);
  }
  return {};
}

bool NamedPointcut::has_param(std::string_view var) const {
  return std::any_of(params.begin(), params.end(), [&](const PointcutParam& p) { return p.name == var; });
}

std::string Condition::describe() const { return (negated ? "!" : "") + pretty_print(prim); }

const NamedPointcut* find_named(const std::vector<NamedPointcut>& named, std::string_view name) {
  for (const auto& n : named) {
    if (n.name == name) return &n;
  }
  return nullptr;
}

namespace {

constexpr int kMaxInlineDepth = 64;

void flatten_into(const PointcutExpr& e, const std::vector<NamedPointcut>& named, bool negated,
                  const std::string& owner, int depth, std::vector<Condition>& out) {
  if (depth > kMaxInlineDepth) {
    throw Error(ErrorCode::kUnresolvedNamedPointcut, "named pointcut references are recursive");
  }
  switch (e.op) {
    case PointcutExpr::Op::kAnd:
    case PointcutExpr::Op::kOr:
      flatten_into(e.children[0], named, negated, owner, depth, out);
      flatten_into(e.children[1], named, negated, owner, depth, out);
      break;
    case PointcutExpr::Op::kNot:
      flatten_into(e.children[0], named, !negated, owner, depth, out);
      break;
    case PointcutExpr::Op::kNamed: {
      const NamedPointcut* target = find_named(named, e.name);
      if (target == nullptr) {
        throw Error(ErrorCode::kUnresolvedNamedPointcut, "unresolved named pointcut '" + e.name + "'");
      }
      flatten_into(target->expr, named, negated, target->name, depth + 1, out);
      break;
    }
    case PointcutExpr::Op::kPrim:
      out.push_back(Condition{e.prim, negated, owner});
      break;
  }
}

bool combine(const PointcutExpr& e, const std::vector<NamedPointcut>& named, const std::vector<bool>& raw,
             std::size_t& next, int depth) {
  switch (e.op) {
    case PointcutExpr::Op::kAnd: {
      bool l = combine(e.children[0], named, raw, next, depth);
      bool r = combine(e.children[1], named, raw, next, depth);
      return l && r;
    }
    case PointcutExpr::Op::kOr: {
      bool l = combine(e.children[0], named, raw, next, depth);
      bool r = combine(e.children[1], named, raw, next, depth);
      return l || r;
    }
    case PointcutExpr::Op::kNot:
      return !combine(e.children[0], named, raw, next, depth);
    case PointcutExpr::Op::kNamed: {
      const NamedPointcut* target = find_named(named, e.name);
      if (target == nullptr || depth > kMaxInlineDepth) {
        throw Error(ErrorCode::kUnresolvedNamedPointcut, "unresolved named pointcut '" + e.name + "'");
      }
      return combine(target->expr, named, raw, next, depth + 1);
    }
    case PointcutExpr::Op::kPrim:
      return raw.at(next++);
  }
  return false;
}

}  // namespace

std::vector<Condition> flatten_conditions(const PointcutExpr& expr, const std::vector<NamedPointcut>& named) {
  std::vector<Condition> out;
  flatten_into(expr, named, false, "", 0, out);
  return out;
}

bool combine_conditions(const PointcutExpr& expr, const std::vector<NamedPointcut>& named,
                        const std::vector<bool>& literal_values) {
  auto conds = flatten_conditions(expr, named);
  if (conds.size() != literal_values.size()) {
    throw std::invalid_argument("condition vector length mismatch");
  }
  // Undo the polarity so the Not nodes can be applied structurally.
  std::vector<bool> raw(literal_values.size());
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = literal_values[i] != conds[i].negated;
  std::size_t next = 0;
  return combine(expr, named, raw, next, 0);
}

}  // namespace aspectlab
