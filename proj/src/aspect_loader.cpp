#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "aspectlab/aspect.hpp"
#include "stmt_parser.hpp"

namespace aspectlab {

std::string_view to_string(AdviceKind kind) {
  switch (kind) {
    case AdviceKind::kBefore: return "before";
    case AdviceKind::kAfter: return "after";
    case AdviceKind::kAfterReturning: return "after-returning";
    case AdviceKind::kAround: return "around";
  }
  return "?";
}

std::string AspectDef::advice_label(std::size_t index) const { return name + ".advice#" + std::to_string(index); }

std::string AspectDef::pointcut_label(const NamedPointcut& pc) const { return name + "." + pc.name; }

PointcutContext AspectDef::advice_context(std::size_t index) const {
  return PointcutContext{&named, advice.at(index).params, advice_label(index), name};
}

PointcutContext AspectDef::pointcut_context(const NamedPointcut& pc) const {
  return PointcutContext{&named, pc.params, pointcut_label(pc), name};
}

namespace {

constexpr const char* kSupercallMessage =
    "supercall is not available in advice: super methods cannot be accessed when advising a method";

[[noreturn]] void syntax(int line, const std::string& message) { throw Error(ErrorCode::kSyntax, message, line); }

struct Chunk {
  int line = 0;
  std::string text;  // lines joined with '\n'
};

// Offset -> line within a chunk.
int line_at(const Chunk& c, std::size_t offset) {
  return c.line + static_cast<int>(std::count(c.text.begin(), c.text.begin() + static_cast<long>(offset), '\n'));
}

// Whitespace runs (including newlines) -> single spaces.
std::string collapse(std::string_view s) {
  std::istringstream in{std::string(s)};
  std::string out;
  for (std::string w; in >> w;) out += (out.empty() ? "" : " ") + w;
  return out;
}

PointcutExpr parse_pointcut_at(std::string_view text, int line) {
  try {
    return parse_pointcut(text);
  } catch (const Error& e) {
    throw Error(e.code(), e.detail(), line, e.position());
  }
}

TypePattern parse_type_pattern_at(std::string_view text, int line) {
  std::string wrapped = "within(" + std::string(detail::trim(text)) + ")";
  PointcutExpr e;
  try {
    e = parse_pointcut(wrapped);
  } catch (const Error& err) {
    throw Error(ErrorCode::kSyntax, "bad type pattern '" + std::string(detail::trim(text)) + "'", line);
  }
  if (e.op != PointcutExpr::Op::kPrim || e.prim.kind != PrimKind::kWithin) {
    syntax(line, "bad type pattern '" + std::string(detail::trim(text)) + "'");
  }
  return e.prim.type;
}

// "(A a, B b)" contents -> params
std::vector<PointcutParam> parse_params(std::string_view text, int line) {
  std::vector<PointcutParam> out;
  if (detail::trim(text).empty()) return out;
  for (const auto& part : detail::split(text, ',')) {
    std::vector<std::string> words;
    std::istringstream in(part);
    for (std::string w; in >> w;) words.push_back(w);
    if (words.size() != 2) syntax(line, "expected '<Type> <name>' parameter, found '" + part + "'");
    for (const auto& p : out) {
      if (p.name == words[1]) syntax(line, "duplicate parameter '" + words[1] + "'");
    }
    out.push_back({words[0], words[1]});
  }
  return out;
}

// Position of the ')' matching the '(' at `open`.
std::size_t matching_paren(std::string_view s, std::size_t open, int line) {
  int depth = 0;
  for (std::size_t i = open; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    if (s[i] == ')' && --depth == 0) return i;
  }
  syntax(line, "unbalanced parentheses");
}

struct Braced {
  std::string head;
  std::string body;
  int body_line = 0;
};

Braced split_body(const Chunk& c) {
  auto open = c.text.find('{');
  if (open == std::string::npos) syntax(c.line, "expected '{'");
  auto close = c.text.rfind('}');
  if (close == std::string::npos || close < open) syntax(c.line, "expected '}'");
  if (!detail::trim(std::string_view(c.text).substr(close + 1)).empty()) {
    syntax(line_at(c, close), "unexpected text after '}'");
  }
  if (detail::brace_delta(c.text) != 0) syntax(c.line, "unbalanced braces");
  return Braced{c.text.substr(0, open), c.text.substr(open + 1, close - open - 1), line_at(c, open)};
}

void parse_member(const Chunk& c, AspectDef& aspect, Diagnostics& diags) {
  std::string_view text = detail::trim(c.text);
  auto words = detail::split_words(std::string(text.substr(0, text.find_first_of("({:"))));
  const std::string head = words.empty() ? std::string() : words.front();

  if (head == "declare") {
    auto colon = text.find(':');
    if (colon == std::string_view::npos) syntax(c.line, "expected ':' after declare");
    std::string what = collapse(text.substr(7, colon - 7));
    std::string rest = collapse(text.substr(colon + 1));
    if (what == "parents") {
      auto rw = detail::split_words(rest);
      auto kw = std::find_if(rw.begin(), rw.end(), [](const std::string& w) { return w == "implements" || w == "extends"; });
      if (kw == rw.begin() || kw == rw.end() || kw + 2 != rw.end()) {
        syntax(c.line, "expected 'declare parents: <TypePattern> implements <Interface>'");
      }
      DeclareParents dp;
      std::string pat;
      for (auto it = rw.begin(); it != kw; ++it) pat += *it;
      dp.pattern = parse_type_pattern_at(pat, c.line);
      dp.interface_name = *(kw + 1);
      dp.line = c.line;
      aspect.declare_parents.push_back(std::move(dp));
      return;
    }
    if (what == "precedence") {
      for (const auto& w : detail::split(rest, ',')) {
        if (w.empty()) syntax(c.line, "empty name in declare precedence");
        aspect.precedence.push_back(w);
      }
      aspect.declares_precedence = true;
      return;
    }
    syntax(c.line, "unknown declaration 'declare " + what + "'");
  }

  if (head == "introduce") {
    Braced b;
    std::string header;
    if (c.text.find('{') != std::string::npos) {
      b = split_body(c);
      header = collapse(b.head);
    } else {
      header = collapse(c.text);
    }
    auto hw = detail::split_words(header.substr(0, header.find('(')));
    std::size_t i = 1;
    if (i < hw.size() && hw[i] == "class") {
      diags.push_back({Severity::kWarning, "UnsupportedIntroduction",
                       "introduction of nested classes is not supported; ignored", c.line});
      return;
    }
    if (i < hw.size() && (hw[i] == "private" || hw[i] == "protected" || hw[i] == "public")) {
      if (hw[i] != "public") {
        diags.push_back({Severity::kWarning, "UnsupportedIntroduction",
                         hw[i] + " methods cannot be introduced; introduced as public", c.line});
      }
      ++i;
    }
    if (hw.size() != i + 2) syntax(c.line, "expected 'introduce <ret> <Type>.<name>(<types>) { ... }'");
    const std::string& target = hw[i + 1];
    auto dot = target.rfind('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == target.size()) {
      syntax(c.line, "introduction target must be '<Type>.<method>'");
    }
    auto open = header.find('(');
    auto close = header.find(')', open == std::string::npos ? 0 : open);
    if (open == std::string::npos || close == std::string::npos) syntax(c.line, "expected parameter list");
    if (!detail::trim(std::string_view(header).substr(close + 1)).empty()) {
      syntax(c.line, "unexpected text after parameter list");
    }
    Introduction intro;
    intro.line = c.line;
    intro.target_type = target.substr(0, dot);
    intro.method.name = target.substr(dot + 1);
    intro.method.return_type = hw[i];
    for (const auto& p : detail::split(std::string_view(header).substr(open + 1, close - open - 1), ',')) {
      if (!p.empty()) intro.method.param_types.push_back(p);
    }
    if (c.text.find('{') == std::string::npos) syntax(c.line, "introduced method needs a body");
    detail::StmtParseOptions opts;
    intro.method.body = detail::parse_statements(b.body, b.body_line, opts);
    aspect.introductions.push_back(std::move(intro));
    return;
  }

  if (head == "pointcut") {
    auto open = text.find('(');
    if (open == std::string_view::npos) syntax(c.line, "expected '(' after pointcut name");
    NamedPointcut pc;
    pc.line = c.line;
    pc.name = collapse(text.substr(8, open - 8));
    if (pc.name.empty() || pc.name.find(' ') != std::string::npos) syntax(c.line, "bad pointcut name");
    auto close = matching_paren(text, open, c.line);
    pc.params = parse_params(text.substr(open + 1, close - open - 1), c.line);
    auto rest = detail::trim(text.substr(close + 1));
    if (rest.empty() || rest.front() != ':') syntax(c.line, "expected ':' after pointcut parameters");
    pc.expr = parse_pointcut_at(rest.substr(1), c.line);
    aspect.named.push_back(std::move(pc));
    return;
  }

  static const std::pair<const char*, AdviceKind> kinds[] = {{"before", AdviceKind::kBefore},
                                                             {"after-returning", AdviceKind::kAfterReturning},
                                                             {"after", AdviceKind::kAfter},
                                                             {"around", AdviceKind::kAround}};
  for (const auto& [kw, kind] : kinds) {
    if (head != kw) continue;
    Braced b = split_body(c);
    std::string_view h = detail::trim(b.head);
    auto open = h.find('(');
    if (open == std::string_view::npos) syntax(c.line, std::string("expected '(' after ") + kw);
    auto close = matching_paren(h, open, c.line);
    AdviceDef adv;
    adv.kind = kind;
    adv.line = c.line;
    adv.params = parse_params(h.substr(open + 1, close - open - 1), c.line);
    auto rest = detail::trim(h.substr(close + 1));
    if (rest.empty() || rest.front() != ':') syntax(c.line, "expected ':' after advice parameters");
    adv.pointcut = parse_pointcut_at(rest.substr(1), c.line);
    detail::StmtParseOptions opts;
    opts.allow_proceed = kind == AdviceKind::kAround;
    opts.allow_supercall = false;
    opts.supercall_message = kSupercallMessage;
    adv.body = detail::parse_statements(b.body, b.body_line, opts);
    aspect.advice.push_back(std::move(adv));
    return;
  }
  syntax(c.line, "unknown aspect member '" + head + "'");
}

AspectDef parse_header(const std::vector<std::string>& w, int line) {
  AspectDef a;
  a.line = line;
  std::size_t i = 0;
  while (i < w.size() && (w[i] == "abstract" || w[i] == "privileged")) {
    (w[i] == "abstract" ? a.is_abstract : a.privileged) = true;
    ++i;
  }
  if (i >= w.size() || w[i] != "aspect") syntax(line, "expected 'aspect <Name>'");
  if (++i >= w.size()) syntax(line, "expected aspect name");
  a.name = w[i++];
  for (; i < w.size(); ++i) {
    if (w[i] == "privileged") a.privileged = true;
    else syntax(line, "unexpected '" + w[i] + "' in aspect header");
  }
  return a;
}

// Variables bound by this/target after inlining, in the root's names.
void collect_bindings(const PointcutExpr& e, const std::vector<NamedPointcut>& named,
                      const std::vector<PointcutParam>& params, const std::map<std::string, std::string>& rename,
                      std::set<std::string>& out, int depth) {
  if (depth > 64) return;
  switch (e.op) {
    case PointcutExpr::Op::kAnd:
    case PointcutExpr::Op::kOr:
    case PointcutExpr::Op::kNot:
      for (const auto& c : e.children) collect_bindings(c, named, params, rename, out, depth);
      return;
    case PointcutExpr::Op::kNamed: {
      const NamedPointcut* t = find_named(named, e.name);
      if (t == nullptr) return;
      std::map<std::string, std::string> inner;
      for (std::size_t i = 0; i < t->params.size(); ++i) {
        std::string outer = i < e.args.size() ? e.args[i] : t->params[i].name;
        auto it = rename.find(outer);
        inner[t->params[i].name] = it == rename.end() ? outer : it->second;
      }
      collect_bindings(t->expr, named, t->params, inner, out, depth + 1);
      return;
    }
    case PointcutExpr::Op::kPrim: break;
  }
  if ((e.prim.kind == PrimKind::kThis || e.prim.kind == PrimKind::kTarget) && e.prim.type.is_identifier()) {
    const std::string& id = e.prim.type.segments[0];
    bool is_param = std::any_of(params.begin(), params.end(), [&](const PointcutParam& p) { return p.name == id; });
    if (is_param) {
      auto it = rename.find(id);
      out.insert(it == rename.end() ? id : it->second);
    }
  }
}

bool has_dynamic(const PointcutExpr& e, const std::vector<NamedPointcut>& named, int depth) {
  if (depth > 64) return false;
  switch (e.op) {
    case PointcutExpr::Op::kNamed: {
      const NamedPointcut* t = find_named(named, e.name);
      return t != nullptr && has_dynamic(t->expr, named, depth + 1);
    }
    case PointcutExpr::Op::kPrim: return e.prim.is_dynamic();
    default:
      return std::any_of(e.children.begin(), e.children.end(),
                         [&](const PointcutExpr& c) { return has_dynamic(c, named, depth); });
  }
}

void check_expr(const PointcutExpr& e, const AspectDef& aspect, int line) {
  switch (e.op) {
    case PointcutExpr::Op::kNamed: {
      const NamedPointcut* t = find_named(aspect.named, e.name);
      if (t == nullptr) {
        throw Error(ErrorCode::kUnresolvedNamedPointcut, "unresolved named pointcut '" + e.name + "'", line);
      }
      if (!e.args.empty() && e.args.size() != t->params.size()) {
        syntax(line, "pointcut '" + e.name + "' expects " + std::to_string(t->params.size()) + " argument(s)");
      }
      return;
    }
    case PointcutExpr::Op::kPrim:
      if (e.prim.kind == PrimKind::kCflow) {
        if (has_dynamic(e.prim.inner.front(), aspect.named, 0)) {
          throw Error(ErrorCode::kUnsupportedNesting, "cflow over this/target/cflow conditions is not supported",
                      line);
        }
        check_expr(e.prim.inner.front(), aspect, line);
      }
      return;
    default:
      for (const auto& c : e.children) check_expr(c, aspect, line);
  }
}

int count_proceeds(const Body& body) {
  int n = 0;
  detail::for_each_stmt(body, [&](const Stmt& s) { n += s.kind == Stmt::Kind::kProceed; });
  return n;
}

}  // namespace

void validate_aspect(const AspectDef& aspect) {
  std::set<std::string> names;
  for (const auto& pc : aspect.named) {
    if (!names.insert(pc.name).second) {
      throw Error(ErrorCode::kDuplicatePointcutName, "duplicate pointcut name '" + pc.name + "'", pc.line);
    }
  }
  for (const auto& pc : aspect.named) {
    check_expr(pc.expr, aspect, pc.line);
    try {
      flatten_conditions(pc.expr, aspect.named);
    } catch (const Error& e) {
      throw Error(e.code(), e.detail(), pc.line);
    }
  }
  for (const auto& adv : aspect.advice) {
    check_expr(adv.pointcut, aspect, adv.line);
    try {
      flatten_conditions(adv.pointcut, aspect.named);
    } catch (const Error& e) {
      throw Error(e.code(), e.detail(), adv.line);
    }
    std::set<std::string> bound;
    collect_bindings(adv.pointcut, aspect.named, adv.params, {}, bound, 0);
    for (const auto& p : adv.params) {
      if (!bound.count(p.name)) syntax(adv.line, "advice parameter '" + p.name + "' is not bound by this() or target()");
    }
    int proceeds = count_proceeds(adv.body);
    if (adv.kind == AdviceKind::kAround && proceeds > 1) syntax(adv.line, "around advice has more than one proceed");
    if (adv.kind != AdviceKind::kAround && proceeds > 0) syntax(adv.line, "proceed is only allowed in around advice");
    bool super = false;
    detail::for_each_stmt(adv.body, [&](const Stmt& s) { super |= s.kind == Stmt::Kind::kSuperCall; });
    if (super) syntax(adv.line, kSupercallMessage);
  }
}

AspectLoad load_aspects(std::string_view text) {
  AspectLoad out;
  std::vector<std::pair<int, std::string>> lines;
  {
    int n = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
      auto end = text.find('\n', start);
      std::string_view raw = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
      ++n;
      std::string line = detail::strip_comment(raw);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find('\t') != std::string::npos) syntax(n, "tabs are not allowed for indentation");
      if (!detail::trim(line).empty()) lines.emplace_back(n, std::move(line));
      if (end == std::string_view::npos) break;
      start = end + 1;
    }
  }

  AspectDef* current = nullptr;
  for (std::size_t i = 0; i < lines.size();) {
    auto& [ln, line] = lines[i];
    int indent = detail::indent_of(line);
    if (indent == 0) {
      out.aspects.push_back(parse_header(detail::split_words(line), ln));
      current = &out.aspects.back();
      ++i;
      continue;
    }
    if (current == nullptr) syntax(ln, "member outside of an aspect");
    if (indent != 2) syntax(ln, "expected two-space indentation for aspect members");
    Chunk chunk{ln, line};
    int depth = detail::brace_delta(line);
    ++i;
    while (i < lines.size() && (depth > 0 || detail::indent_of(lines[i].second) > 2)) {
      if (depth <= 0 && detail::indent_of(lines[i].second) == 0) break;
      // Keep the line count so statement line numbers stay exact.
      for (int gap = lines[i - 1].first; gap < lines[i].first; ++gap) chunk.text += '\n';
      chunk.text += lines[i].second;
      depth += detail::brace_delta(lines[i].second);
      ++i;
    }
    parse_member(chunk, *current, out.diagnostics);
  }
  std::set<std::string> names;
  for (const auto& a : out.aspects) {
    if (!names.insert(a.name).second) syntax(a.line, "duplicate aspect '" + a.name + "'");
    validate_aspect(a);
  }
  return out;
}

namespace {

std::string print_params(const std::vector<PointcutParam>& params) {
  std::string out;
  for (std::size_t i = 0; i < params.size(); ++i) out += (i ? ", " : "") + params[i].type + " " + params[i].name;
  return out;
}

}  // namespace

std::string dump_aspects(const std::vector<AspectDef>& aspects) {
  std::ostringstream out;
  for (const auto& a : aspects) {
    out << (a.is_abstract ? "abstract " : "") << "aspect " << a.name << (a.privileged ? " privileged" : "") << '\n';
    for (const auto& dp : a.declare_parents) {
      out << "  declare parents: " << pretty_print(dp.pattern) << " implements " << dp.interface_name << '\n';
    }
    for (const auto& in : a.introductions) {
      out << "  introduce " << in.method.return_type << ' ' << in.target_type << '.' << in.method.name << '(';
      for (std::size_t i = 0; i < in.method.param_types.size(); ++i) {
        out << (i ? ", " : "") << in.method.param_types[i];
      }
      out << ") { " << format_body(in.method.body) << " }\n";
    }
    for (const auto& pc : a.named) {
      out << "  pointcut " << pc.name << '(' << print_params(pc.params) << "): " << pretty_print(pc.expr) << '\n';
    }
    for (const auto& adv : a.advice) {
      out << "  " << to_string(adv.kind) << '(' << print_params(adv.params) << "): " << pretty_print(adv.pointcut)
          << " { " << format_body(adv.body) << " }\n";
    }
    if (a.declares_precedence) {
      out << "  declare precedence: ";
      for (std::size_t i = 0; i < a.precedence.size(); ++i) out << (i ? ", " : "") << a.precedence[i];
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace aspectlab
