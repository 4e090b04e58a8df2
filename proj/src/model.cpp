#include "aspectlab/model.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <sstream>

namespace aspectlab {

Stmt Stmt::emit(std::string label) {
  Stmt s;
  s.kind = Kind::kEmit;
  s.label = std::move(label);
  return s;
}

Stmt Stmt::call(Receiver receiver, std::string method, int arg_count) {
  Stmt s;
  s.kind = Kind::kCall;
  s.receiver = std::move(receiver);
  s.method = std::move(method);
  s.arg_count = arg_count;
  return s;
}

Stmt Stmt::super_call(std::string method) {
  Stmt s;
  s.kind = Kind::kSuperCall;
  s.method = std::move(method);
  return s;
}

Stmt Stmt::make_new(std::string variable, std::string type_name) {
  Stmt s;
  s.kind = Kind::kNew;
  s.variable = std::move(variable);
  s.type_name = std::move(type_name);
  return s;
}

Stmt Stmt::if_type(std::string variable, std::string type_name, std::vector<Stmt> then_body,
                   std::vector<Stmt> else_body) {
  Stmt s;
  s.kind = Kind::kIfType;
  s.variable = std::move(variable);
  s.type_name = std::move(type_name);
  s.then_body = std::move(then_body);
  s.else_body = std::move(else_body);
  return s;
}

Stmt Stmt::proceed() {
  Stmt s;
  s.kind = Kind::kProceed;
  return s;
}

namespace {

void number_into(Body& body, int& next) {
  for (auto& stmt : body) {
    if (stmt.kind != Stmt::Kind::kIfType) continue;
    stmt.ordinal = next++;
    number_into(stmt.then_body, next);
    number_into(stmt.else_body, next);
  }
}

}  // namespace

int number_branches(Body& body) {
  int next = 0;
  number_into(body, next);
  return next;
}

const MethodDecl* TypeDecl::find_method(std::string_view method, std::optional<int> arity) const {
  for (const auto& m : methods) {
    if (m.name == method && (!arity || m.arity() == *arity)) return &m;
  }
  return nullptr;
}

const FieldDecl* TypeDecl::find_field(std::string_view field) const {
  for (const auto& f : fields) {
    if (f.name == field) return &f;
  }
  return nullptr;
}

bool TypeDecl::operator==(const TypeDecl& o) const {
  return name == o.name && kind == o.kind && extends == o.extends && implements == o.implements &&
         anonymous == o.anonymous && enclosing == o.enclosing && alias == o.alias &&
         methods == o.methods && fields == o.fields;
}

const TypeDecl* ProgramModel::find(std::string_view qualified) const {
  auto it = index_.find(std::string(qualified));
  return it == index_.end() ? nullptr : &types_[it->second];
}

TypeDecl* ProgramModel::find_mutable(std::string_view qualified) {
  auto it = index_.find(std::string(qualified));
  return it == index_.end() ? nullptr : &types_[it->second];
}

const TypeDecl& ProgramModel::get(std::string_view qualified) const {
  const TypeDecl* t = find(qualified);
  if (t == nullptr) throw Error(ErrorCode::kUnknownType, "unknown type '" + std::string(qualified) + "'");
  return *t;
}

bool ProgramModel::is_builtin(std::string_view name) {
  return name == "void" || name == "Object" || name == "boolean" || name == "String";
}

std::optional<std::string> ProgramModel::resolve(std::string_view written,
                                                 std::string_view package) const {
  if (written.empty()) return std::nullopt;
  if (is_builtin(written)) return std::string(written);
  if (find(written) != nullptr) return std::string(written);
  if (!package.empty()) {
    std::string candidate = std::string(package) + "." + std::string(written);
    if (find(candidate) != nullptr) return candidate;
  }
  std::optional<std::string> found;
  int hits = 0;
  for (const auto& t : types_) {
    if (t.alias && (*t.alias == written)) return t.name;
  }
  for (const auto& t : types_) {
    std::string_view simple = t.name;
    if (auto dot = simple.rfind('.'); dot != std::string_view::npos) simple = simple.substr(dot + 1);
    if (simple == written) {
      found = t.name;
      ++hits;
    }
  }
  if (hits == 1) return found;
  return std::nullopt;
}

void ProgramModel::add_type(TypeDecl type) {
  index_.emplace(type.name, types_.size());
  types_.push_back(std::move(type));
}

std::vector<std::string> immediate_supertypes(const ProgramModel& model, std::string_view type) {
  if (ProgramModel::is_builtin(type)) {
    if (type == ProgramModel::kObject) return {};
    return {std::string(ProgramModel::kObject)};
  }
  const TypeDecl& decl = model.get(type);
  std::vector<std::string> out;
  if (decl.extends) {
    out.push_back(*decl.extends);
  } else if (!decl.is_interface()) {
    out.emplace_back(ProgramModel::kObject);
  }
  for (const auto& i : decl.implements) {
    if (std::find(out.begin(), out.end(), i) == out.end()) out.push_back(i);
  }
  return out;
}

std::vector<std::string> supertypes_closure(const ProgramModel& model, std::string_view type) {
  std::vector<std::string> out;
  std::deque<std::string> queue;
  for (auto& s : immediate_supertypes(model, type)) queue.push_back(std::move(s));
  while (!queue.empty()) {
    std::string next = std::move(queue.front());
    queue.pop_front();
    if (next == type || std::find(out.begin(), out.end(), next) != out.end()) continue;
    out.push_back(next);
    if (!model.is_known(next)) continue;
    for (auto& s : immediate_supertypes(model, next)) queue.push_back(std::move(s));
  }
  return out;
}

std::set<std::string> subtypes_transitive(const ProgramModel& model, std::string_view type) {
  if (!model.is_known(type)) {
    throw Error(ErrorCode::kUnknownType, "unknown type '" + std::string(type) + "'");
  }
  std::set<std::string> out{std::string(type)};
  for (const auto& t : model.types()) {
    auto sup = supertypes_closure(model, t.name);
    if (std::find(sup.begin(), sup.end(), type) != sup.end()) out.insert(t.name);
  }
  return out;
}

bool is_subtype(const ProgramModel& model, std::string_view sub, std::string_view super) {
  if (sub == super) return true;
  if (!model.is_known(sub)) return false;
  auto sup = supertypes_closure(model, sub);
  return std::find(sup.begin(), sup.end(), super) != sup.end();
}

bool is_abstract_type(const ProgramModel& model, std::string_view type) {
  if (ProgramModel::is_builtin(type)) return false;
  const TypeDecl& decl = model.get(type);
  if (decl.is_interface()) return true;
  return std::any_of(decl.methods.begin(), decl.methods.end(),
                     [](const MethodDecl& m) { return m.is_abstract; });
}

DispatchTarget resolve_dispatch(const ProgramModel& model, std::string_view runtime_class,
                                std::string_view method, std::optional<int> arity) {
  std::optional<std::string> current(runtime_class);
  int guard = 0;
  while (current && !ProgramModel::is_builtin(*current) && guard++ < 100000) {
    const TypeDecl& decl = model.get(*current);
    for (const auto& m : decl.methods) {
      if (m.name == method && !m.is_abstract && (!arity || m.arity() == *arity)) {
        return DispatchTarget{decl.name, &m};
      }
    }
    current = decl.extends;
  }
  std::string what = std::string(runtime_class) + "." + std::string(method);
  if (arity) what += "/" + std::to_string(*arity);
  throw Error(ErrorCode::kNoSuchMethod, "no concrete implementation of " + what);
}

std::vector<std::string> enclosing_chain(const ProgramModel& model, std::string_view type) {
  std::vector<std::string> out;
  const TypeDecl* decl = model.find(type);
  while (decl != nullptr && decl->enclosing && out.size() < model.types().size()) {
    out.push_back(*decl->enclosing);
    decl = model.find(*decl->enclosing);
  }
  return out;
}

namespace {

void dump_body(std::ostringstream& out, const Body& body) {
  bool first = true;
  for (const auto& s : body) {
    if (!first) out << "; ";
    first = false;
    switch (s.kind) {
      case Stmt::Kind::kEmit:
        if (s.label.find_first_of(" \t;{}(),") != std::string::npos) out << "emit \"" << s.label << '"';
        else out << "emit " << s.label;
        break;
      case Stmt::Kind::kNew: out << "new " << s.variable << ' ' << s.type_name; break;
      case Stmt::Kind::kCall:
        out << "call ";
        if (s.receiver.kind == Receiver::Kind::kThis) out << "this";
        else if (s.receiver.kind == Receiver::Kind::kNew) out << "new " << s.receiver.name;
        else out << s.receiver.name;
        out << '.' << s.method << '(' << s.arg_count << ')';
        break;
      case Stmt::Kind::kSuperCall: out << "supercall " << s.method << "()"; break;
      case Stmt::Kind::kProceed: out << "proceed"; break;
      case Stmt::Kind::kIfType:
        out << "if istype(" << s.variable << ", " << s.type_name << ") { ";
        dump_body(out, s.then_body);
        out << " }";
        if (!s.else_body.empty()) {
          out << " else { ";
          dump_body(out, s.else_body);
          out << " }";
        }
        break;
    }
  }
}

}  // namespace

std::string format_body(const Body& body) {
  std::ostringstream out;
  dump_body(out, body);
  return out.str();
}

std::string dump_model(const ProgramModel& model) {
  std::ostringstream out;
  for (const auto& t : model.types()) {
    out << (t.is_interface() ? "interface " : "class ") << t.name;
    if (t.extends) out << " extends " << *t.extends;
    if (!t.implements.empty()) {
      out << (t.is_interface() ? " extends-more " : " implements ");
      for (std::size_t i = 0; i < t.implements.size(); ++i) out << (i ? ", " : "") << t.implements[i];
    }
    if (t.anonymous) out << " anonymous in " << t.enclosing.value_or("?");
    if (t.alias) out << " alias " << *t.alias;
    out << '\n';
    for (const auto& f : t.fields) out << "  field " << f.type << ' ' << f.name << '\n';
    for (const auto& m : t.methods) {
      out << "  method " << (m.is_abstract ? "abstract " : "") << m.return_type << ' ' << m.name << '(';
      for (std::size_t i = 0; i < m.param_types.size(); ++i) out << (i ? "," : "") << m.param_types[i];
      out << ')';
      if (m.introduced_by) out << " introduced-by " << *m.introduced_by << '#' << m.introduction_index;
      out << '\n';
      if (!m.body.empty()) {
        out << "    ";
        dump_body(out, m.body);
        out << '\n';
      }
    }
  }
  return out.str();
}

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xF];
    h >>= 4;
  }
  return out;
}

std::string model_hash(const ProgramModel& model) { return fnv1a_hex(dump_model(model)); }

}  // namespace aspectlab
