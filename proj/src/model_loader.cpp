#include <algorithm>
#include <functional>
#include <map>
#include <string>

#include "aspectlab/model.hpp"
#include "stmt_parser.hpp"

namespace aspectlab {

namespace {

using detail::indent_of;
using detail::split_words;
using detail::trim;

struct RawMethod {
  MethodDecl decl;
  std::vector<std::pair<int, std::string>> body_lines;
  int line = 0;
};

struct RawType {
  TypeKind kind = TypeKind::kClass;
  std::string written;
  std::string package;
  std::vector<std::string> extends;
  std::vector<std::string> implements;
  std::optional<std::string> enclosing;
  std::vector<FieldDecl> fields;
  std::vector<RawMethod> methods;
  int line = 0;
};

[[noreturn]] void syntax(int line, const std::string& message) {
  throw Error(ErrorCode::kSyntax, message, line);
}

RawType parse_type_header(const std::vector<std::string>& words, const std::string& package, int line) {
  RawType t;
  t.kind = words[0] == "interface" ? TypeKind::kInterface : TypeKind::kClass;
  t.package = package;
  t.line = line;
  if (words.size() < 2) syntax(line, "missing type name");
  t.written = words[1];
  std::size_t i = 2;
  std::vector<std::string>* target = nullptr;
  while (i < words.size()) {
    const std::string& w = words[i];
    if (w == "extends") {
      target = &t.extends;
    } else if (w == "implements") {
      if (t.kind == TypeKind::kInterface) syntax(line, "interfaces use 'extends', not 'implements'");
      target = &t.implements;
    } else if (w == "anonymous") {
      if (t.kind == TypeKind::kInterface) syntax(line, "interfaces cannot be anonymous");
      if (i + 2 >= words.size() || words[i + 1] != "in") syntax(line, "expected 'anonymous in <Enclosing>'");
      t.enclosing = words[i + 2];
      i += 3;
      target = nullptr;
      continue;
    } else {
      if (target == nullptr) syntax(line, "unexpected '" + w + "' in type header");
      target->push_back(w);
    }
    ++i;
  }
  if (t.kind == TypeKind::kClass && t.extends.size() > 1) syntax(line, "a class extends at most one class");
  return t;
}

RawMethod parse_method_header(std::string_view rest, int line) {
  RawMethod m;
  m.line = line;
  auto open = rest.find('(');
  auto close = rest.rfind(')');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
    syntax(line, "expected 'method [abstract] <ret> <name>(<types>)'");
  }
  if (!trim(rest.substr(close + 1)).empty()) syntax(line, "unexpected text after method parameters");
  auto head = split_words(rest.substr(0, open));
  std::size_t i = 0;
  if (i < head.size() && head[i] == "abstract") {
    m.decl.is_abstract = true;
    ++i;
  }
  if (head.size() - i != 2) syntax(line, "expected '<ret> <name>' in method declaration");
  m.decl.return_type = head[i];
  m.decl.name = head[i + 1];
  m.decl.param_types = split_words(rest.substr(open + 1, close - open - 1));
  return m;
}

}  // namespace

ProgramModel load_model(std::string_view text) {
  std::vector<RawType> raws;
  std::string package;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    std::string_view raw_line = text.substr(start, end == std::string_view::npos ? end : end - start);
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    std::string line = detail::strip_comment(raw_line);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (line.find('\t') != std::string::npos) syntax(line_no, "tabs are not allowed; indent with spaces");
    int indent = indent_of(line);
    auto words = split_words(line);
    if (indent == 0) {
      if (words[0] == "package") {
        if (words.size() != 2) syntax(line_no, "expected 'package <dotted.name>'");
        package = words[1];
      } else if (words[0] == "class" || words[0] == "interface") {
        raws.push_back(parse_type_header(words, package, line_no));
      } else {
        syntax(line_no, "expected 'package', 'class' or 'interface'");
      }
    } else if (indent == 2) {
      if (raws.empty()) syntax(line_no, "member outside of a type declaration");
      RawType& t = raws.back();
      if (words[0] == "field") {
        if (words.size() != 3) syntax(line_no, "expected 'field <Type> <name>'");
        if (t.kind == TypeKind::kInterface) syntax(line_no, "interfaces cannot declare fields");
        t.fields.push_back({words[2], words[1]});
      } else if (words[0] == "method") {
        auto rest = trim(std::string_view(line).substr(line.find("method") + 6));
        RawMethod m = parse_method_header(rest, line_no);
        if (t.kind == TypeKind::kInterface) m.decl.is_abstract = true;
        t.methods.push_back(std::move(m));
      } else {
        syntax(line_no, "expected 'field' or 'method'");
      }
    } else if (indent >= 4) {
      if (raws.empty() || raws.back().methods.empty()) syntax(line_no, "statement outside of a method");
      RawMethod& m = raws.back().methods.back();
      if (m.decl.is_abstract) syntax(line_no, "abstract method '" + m.decl.name + "' cannot have a body");
      m.body_lines.emplace_back(line_no, line);
    } else {
      syntax(line_no, "unexpected indentation (use 0, 2 or 4+ spaces)");
    }
  }

  // Qualified names: named types first, then anonymous classes in file order.
  ProgramModel skeleton;
  std::vector<std::string> qualified(raws.size());
  auto add_skeleton = [&](std::size_t i, const std::string& name) {
    if (skeleton.find(name) != nullptr || ProgramModel::is_builtin(name)) {
      syntax(raws[i].line, "duplicate type '" + name + "'");
    }
    TypeDecl decl;
    decl.name = name;
    decl.kind = raws[i].kind;
    if (raws[i].enclosing) {
      decl.anonymous = true;
      decl.alias = raws[i].written;
    }
    skeleton.add_type(std::move(decl));
    qualified[i] = name;
  };
  for (std::size_t i = 0; i < raws.size(); ++i) {
    if (raws[i].enclosing) continue;
    const auto& r = raws[i];
    add_skeleton(i, r.written.find('.') != std::string::npos || r.package.empty() ? r.written
                                                                                  : r.package + "." + r.written);
  }
  std::map<std::string, int> anon_counter;
  for (std::size_t i = 0; i < raws.size(); ++i) {
    if (!raws[i].enclosing) continue;
    auto enc = skeleton.resolve(*raws[i].enclosing, raws[i].package);
    if (!enc || ProgramModel::is_builtin(*enc)) {
      throw Error(ErrorCode::kResolution, "unknown enclosing type '" + *raws[i].enclosing + "'", raws[i].line);
    }
    for (const auto& t : skeleton.types()) {
      if (t.alias && *t.alias == raws[i].written) syntax(raws[i].line, "duplicate type '" + raws[i].written + "'");
    }
    add_skeleton(i, *enc + "$" + std::to_string(++anon_counter[*enc]));
  }

  ProgramModel model;
  for (std::size_t i = 0; i < raws.size(); ++i) {
    RawType& r = raws[i];
    auto resolve = [&](const std::string& written, int line) {
      auto q = skeleton.resolve(written, r.package);
      if (!q) throw Error(ErrorCode::kResolution, "unknown type '" + written + "'", line);
      return *q;
    };
    TypeDecl decl = *skeleton.find(qualified[i]);
    decl.line = r.line;
    if (r.enclosing) decl.enclosing = resolve(*r.enclosing, r.line);
    std::vector<std::string> supers;
    for (const auto& e : r.extends) supers.push_back(resolve(e, r.line));
    if (!supers.empty()) {
      decl.extends = supers.front();
      decl.implements.assign(supers.begin() + 1, supers.end());
    }
    for (const auto& im : r.implements) decl.implements.push_back(resolve(im, r.line));
    for (auto& f : r.fields) decl.fields.push_back({f.name, resolve(f.type, r.line)});
    for (auto& rm : r.methods) {
      MethodDecl m = rm.decl;
      m.return_type = resolve(m.return_type, rm.line);
      for (auto& p : m.param_types) p = resolve(p, rm.line);
      if (!rm.body_lines.empty()) {
        std::string body_text;
        int first = rm.body_lines.front().first;
        int current = first;
        for (const auto& [ln, txt] : rm.body_lines) {
          while (current < ln) {
            body_text += '\n';
            ++current;
          }
          body_text += txt;
        }
        m.body = detail::parse_statements(body_text, first);
        detail::for_each_stmt(m.body, [&](Stmt& s) {
          if (s.kind == Stmt::Kind::kNew || s.kind == Stmt::Kind::kIfType) {
            s.type_name = resolve(s.type_name, rm.line);
          }
          if (s.kind == Stmt::Kind::kCall && s.receiver.kind == Receiver::Kind::kNew) {
            s.receiver.name = resolve(s.receiver.name, rm.line);
          }
        });
      }
      decl.methods.push_back(std::move(m));
    }
    model.add_type(std::move(decl));
  }
  validate_model(model);
  return model;
}

void validate_model(const ProgramModel& model) {
  auto known = [&](const std::string& name, int line, const std::string& what) {
    if (!model.is_known(name)) {
      throw Error(ErrorCode::kResolution, "unknown type '" + name + "' in " + what, line);
    }
  };
  auto kind_of = [&](const std::string& name) {
    if (name == ProgramModel::kObject) return TypeKind::kClass;
    const TypeDecl* t = model.find(name);
    return t ? t->kind : TypeKind::kClass;
  };
  for (const auto& t : model.types()) {
    if (t.extends) {
      known(*t.extends, t.line, t.name);
      if (ProgramModel::is_builtin(*t.extends) && *t.extends != ProgramModel::kObject) {
        throw Error(ErrorCode::kResolution, t.name + " cannot extend built-in '" + *t.extends + "'", t.line);
      }
      if (kind_of(*t.extends) != t.kind) {
        throw Error(ErrorCode::kResolution,
                    t.name + " extends '" + *t.extends + "' of the wrong kind", t.line);
      }
    }
    for (const auto& i : t.implements) {
      known(i, t.line, t.name);
      if (ProgramModel::is_builtin(i) || kind_of(i) != TypeKind::kInterface) {
        throw Error(ErrorCode::kResolution, t.name + " implements non-interface '" + i + "'", t.line);
      }
    }
    if (t.anonymous) {
      if (!t.enclosing || !model.find(*t.enclosing)) {
        throw Error(ErrorCode::kResolution, "anonymous class " + t.name + " lacks an enclosing type", t.line);
      }
    }
    for (const auto& f : t.fields) known(f.type, t.line, t.name + "." + f.name);
    for (std::size_t a = 0; a < t.methods.size(); ++a) {
      const MethodDecl& m = t.methods[a];
      known(m.return_type, t.line, t.name + "." + m.name);
      for (const auto& p : m.param_types) known(p, t.line, t.name + "." + m.name);
      if (m.is_abstract && !m.body.empty()) {
        throw Error(ErrorCode::kSyntax, "abstract method " + t.name + "." + m.name + " has a body", t.line);
      }
      for (std::size_t b = a + 1; b < t.methods.size(); ++b) {
        if (t.methods[b].name == m.name && t.methods[b].param_types == m.param_types) {
          throw Error(ErrorCode::kSyntax, "duplicate method " + t.name + "." + m.name, t.line);
        }
      }
      detail::for_each_stmt(m.body, [&](const Stmt& s) {
        if (s.kind == Stmt::Kind::kNew || s.kind == Stmt::Kind::kIfType) {
          known(s.type_name, t.line, t.name + "." + m.name);
        }
        if (s.kind == Stmt::Kind::kCall && s.receiver.kind == Receiver::Kind::kNew) {
          known(s.receiver.name, t.line, t.name + "." + m.name);
        }
        if (s.kind == Stmt::Kind::kSuperCall) {
          bool found = false;
          std::optional<std::string> cur = t.extends;
          std::size_t guard = 0;
          while (cur && !found && !ProgramModel::is_builtin(*cur) && guard++ <= model.types().size()) {
            const TypeDecl* sup = model.find(*cur);
            if (sup == nullptr) break;
            found = sup->find_method(s.method) != nullptr;
            cur = sup->extends;
          }
          if (!found) {
            throw Error(ErrorCode::kResolution,
                        "supercall " + s.method + "() in " + t.name + "." + m.name +
                            " has no superclass method of that name",
                        t.line);
          }
        }
      });
    }
  }

  // Cycle detection over extends/implements edges.
  enum class Mark { kNone, kActive, kDone };
  std::map<std::string, Mark> marks;
  std::vector<std::string> stack;
  std::function<void(const std::string&)> visit = [&](const std::string& name) {
    Mark& m = marks[name];
    if (m == Mark::kDone) return;
    if (m == Mark::kActive) {
      auto it = std::find(stack.begin(), stack.end(), name);
      std::string cycle;
      for (; it != stack.end(); ++it) cycle += *it + " -> ";
      cycle += name;
      throw Error(ErrorCode::kCycle, "hierarchy cycle: " + cycle);
    }
    m = Mark::kActive;
    stack.push_back(name);
    if (const TypeDecl* t = model.find(name)) {
      if (t->extends) visit(*t->extends);
      for (const auto& i : t->implements) visit(i);
    }
    stack.pop_back();
    marks[name] = Mark::kDone;
  };
  for (const auto& t : model.types()) visit(t.name);
}

}  // namespace aspectlab
