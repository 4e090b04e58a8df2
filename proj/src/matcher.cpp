#include "aspectlab/matcher.hpp"

#include <algorithm>
#include <functional>

#include "stmt_parser.hpp"

namespace aspectlab {

std::string_view to_string(ShadowKind kind) { return kind == ShadowKind::kCall ? "call" : "execution"; }

std::string_view to_string(Witness w) {
  switch (w) {
    case Witness::kNoMatch: return "no-match";
    case Witness::kEmpty: return "empty";
    case Witness::kNonEmpty: return "nonempty";
  }
  return "?";
}

std::string Shadow::signature() const { return declaring_type + "." + method + "/" + std::to_string(arity); }

std::string Shadow::site() const {
  if (kind != ShadowKind::kCall) return {};
  return site_type + "." + site_method + "#" + std::to_string(site_index);
}

std::optional<int> ShadowTable::execution_of(const MethodDecl* method) const {
  auto it = exec_.find(method);
  if (it == exec_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> ShadowTable::call_at(const Stmt* stmt) const {
  auto it = call_.find(stmt);
  if (it == call_.end()) return std::nullopt;
  return it->second;
}

namespace {

const MethodDecl* lookup_method(const ProgramModel& model, const std::string& type, const std::string& name,
                                std::optional<int> arity) {
  if (const TypeDecl* decl = model.find(type)) {
    if (const MethodDecl* m = decl->find_method(name, arity)) return m;
  }
  if (!model.is_known(type)) return nullptr;
  for (const auto& sup : supertypes_closure(model, type)) {
    if (const TypeDecl* decl = model.find(sup)) {
      if (const MethodDecl* m = decl->find_method(name, arity)) return m;
    }
  }
  return nullptr;
}

const FieldDecl* lookup_field(const ProgramModel& model, const std::string& type, const std::string& name) {
  if (const TypeDecl* decl = model.find(type)) {
    if (const FieldDecl* f = decl->find_field(name)) return f;
    for (const auto& sup : supertypes_closure(model, type)) {
      if (const TypeDecl* s = model.find(sup)) {
        if (const FieldDecl* f = s->find_field(name)) return f;
      }
    }
  }
  return nullptr;
}

}  // namespace

std::string static_receiver_type(const ProgramModel& model, const std::string& site_type, const Body& body,
                                 const Stmt& call) {
  switch (call.receiver.kind) {
    case Receiver::Kind::kThis: return site_type;
    case Receiver::Kind::kNew: return call.receiver.name;
    case Receiver::Kind::kVariable: break;
  }
  std::optional<std::string> bound;
  bool reached = false;
  detail::for_each_stmt(body, [&](const Stmt& s) {
    if (&s == &call) reached = true;
    if (!reached && s.kind == Stmt::Kind::kNew && s.variable == call.receiver.name) bound = s.type_name;
  });
  if (bound) return *bound;
  if (const FieldDecl* f = lookup_field(model, site_type, call.receiver.name)) return f->type;
  return std::string(ProgramModel::kObject);
}

ShadowTable compute_shadows(const ProgramModel& model) {
  ShadowTable table;
  for (const auto& type : model.types()) {
    for (const auto& method : type.methods) {
      if (!method.is_abstract) {
        Shadow s;
        s.id = static_cast<int>(table.shadows_.size());
        s.kind = ShadowKind::kExecution;
        s.declaring_type = type.name;
        s.method = method.name;
        s.arity = method.arity();
        s.return_type = method.return_type;
        s.site_type = type.name;
        s.site_method = method.name;
        s.site_arity = method.arity();
        table.exec_.emplace(&method, s.id);
        table.shadows_.push_back(std::move(s));
      }
      int index = 0;
      detail::for_each_stmt(method.body, [&](const Stmt& stmt) {
        int here = index++;
        if (stmt.kind != Stmt::Kind::kCall && stmt.kind != Stmt::Kind::kSuperCall) return;
        Shadow s;
        s.id = static_cast<int>(table.shadows_.size());
        s.kind = ShadowKind::kCall;
        s.method = stmt.method;
        s.site_type = type.name;
        s.site_method = method.name;
        s.site_arity = method.arity();
        s.site_index = here;
        const MethodDecl* target = nullptr;
        if (stmt.kind == Stmt::Kind::kSuperCall) {
          s.is_super = true;
          s.declaring_type = type.extends.value_or(std::string(ProgramModel::kObject));
          target = lookup_method(model, s.declaring_type, stmt.method, std::nullopt);
          s.arity = target ? target->arity() : 0;
        } else {
          s.declaring_type = static_receiver_type(model, type.name, method.body, stmt);
          s.arity = stmt.arg_count;
          target = lookup_method(model, s.declaring_type, stmt.method, stmt.arg_count);
        }
        s.return_type = target ? target->return_type : std::string(ProgramModel::kObject);
        table.call_.emplace(&stmt, s.id);
        table.shadows_.push_back(std::move(s));
      });
    }
  }
  return table;
}

namespace {

// `org.app.Outer$1` -> [org, app, Outer, $1]
std::vector<std::string> name_segments(std::string_view name) {
  std::vector<std::string> out;
  for (const auto& part : detail::split(name, '.')) {
    std::size_t start = 0;
    for (std::size_t i = 1; i < part.size(); ++i) {
      if (part[i] == '$') {
        out.push_back(part.substr(start, i - start));
        start = i;
      }
    }
    out.push_back(part.substr(start));
  }
  return out;
}

std::vector<std::string> pattern_segments(const TypePattern& p) {
  std::vector<std::string> out;
  for (const auto& seg : p.segments) {
    if (seg == TypePattern::kAnyPackages) {
      out.push_back(seg);
    } else {
      for (auto& s : name_segments(seg)) out.push_back(std::move(s));
    }
  }
  return out;
}

// Leftmost-longest: each `*` tries the longest span first.
bool glob(std::string_view p, std::string_view t, std::vector<int>& lens) {
  if (p.empty()) return t.empty();
  if (p[0] == '*') {
    for (int k = static_cast<int>(t.size()); k >= 0; --k) {
      lens.push_back(k);
      if (glob(p.substr(1), t.substr(static_cast<std::size_t>(k)), lens)) return true;
      lens.pop_back();
    }
    return false;
  }
  if (t.empty() || p[0] != t[0]) return false;
  return glob(p.substr(1), t.substr(1), lens);
}

bool segments_match(const std::vector<std::string>& ps, std::size_t pi, const std::vector<std::string>& ns,
                    std::size_t ni, std::vector<int>& lens) {
  if (pi == ps.size()) return ni == ns.size();
  if (ps[pi] == TypePattern::kAnyPackages) {
    for (std::size_t k = ns.size() - ni + 1; k-- > 0;) {
      if (segments_match(ps, pi + 1, ns, ni + k, lens)) return true;
    }
    return false;
  }
  if (ni == ns.size()) return false;
  std::size_t mark = lens.size();
  if (glob(ps[pi], ns[ni], lens) && segments_match(ps, pi + 1, ns, ni + 1, lens)) return true;
  lens.resize(mark);
  return false;
}

TypeMatch to_match(bool ok, const std::vector<int>& lens, int stars) {
  TypeMatch m;
  m.matched = ok;
  if (!ok) {
    m.witnesses.assign(static_cast<std::size_t>(stars), Witness::kNoMatch);
    return m;
  }
  for (int len : lens) m.witnesses.push_back(len == 0 ? Witness::kEmpty : Witness::kNonEmpty);
  return m;
}

std::string joined(const TypePattern& p) {
  std::string out;
  for (const auto& s : p.segments) out += (out.empty() ? "" : ".") + s;
  return out;
}

using ClosureFn = std::function<const std::vector<std::string>&(const std::string&)>;

TypeMatch match_type_core(const TypePattern& pattern, const std::string& type, const ProgramModel& model,
                          const ClosureFn& closure) {
  int stars = pattern.star_count();
  if (pattern.is_exact()) {
    if (auto resolved = model.resolve(joined(pattern))) {
      bool ok = type == *resolved;
      if (!ok && pattern.subtypes) {
        const auto& sup = closure(type);
        ok = std::find(sup.begin(), sup.end(), *resolved) != sup.end();
      }
      return to_match(ok, {}, 0);
    }
  }
  auto ps = pattern_segments(pattern);
  std::vector<int> lens;
  // A lone `*` names every type, whatever its package.
  if (ps.size() == 1 && ps[0] == "*") return to_match(true, {static_cast<int>(type.size())}, stars);
  if (segments_match(ps, 0, name_segments(type), 0, lens)) return to_match(true, lens, stars);
  if (pattern.subtypes) {
    for (const auto& sup : closure(type)) {
      lens.clear();
      if (segments_match(ps, 0, name_segments(sup), 0, lens)) return to_match(true, lens, stars);
    }
  }
  return to_match(false, {}, stars);
}

}  // namespace

TypeMatch match_type_pattern(const TypePattern& pattern, std::string_view type_name, const ProgramModel& model) {
  std::vector<std::string> cache;
  ClosureFn closure = [&](const std::string& t) -> const std::vector<std::string>& {
    cache = model.is_known(t) ? supertypes_closure(model, t) : std::vector<std::string>{};
    return cache;
  };
  return match_type_core(pattern, std::string(type_name), model, closure);
}

TypeMatch match_name_pattern(const NamePattern& pattern, std::string_view name) {
  std::vector<int> lens;
  bool ok = glob(pattern.text, name, lens);
  return to_match(ok, lens, pattern.star_count());
}

Matcher::Matcher(const ProgramModel& model, const ShadowTable& shadows) : model_(model), shadows_(shadows) {
  for (const auto& t : model.types()) closure_.emplace(t.name, supertypes_closure(model, t.name));
  for (std::string_view b : {"void", "boolean", "String"}) {
    closure_.emplace(std::string(b), supertypes_closure(model, b));
  }
}

const std::vector<std::string>& Matcher::supertypes(const std::string& type) const {
  auto it = closure_.find(type);
  return it == closure_.end() ? builtin_closure_ : it->second;
}

TypeMatch Matcher::match_type(const TypePattern& pattern, const std::string& type) const {
  return match_type_core(pattern, type, model_,
                         [this](const std::string& t) -> const std::vector<std::string>& { return supertypes(t); });
}

SignatureMatch Matcher::match_signature(const MethodPattern& pattern, const std::string& type,
                                        const std::string& method, int arity,
                                        const std::string& return_type) const {
  SignatureMatch out;
  out.return_type = match_type(pattern.return_type, return_type);
  out.name = match_name_pattern(pattern.name, method);
  out.params = pattern.params.accepts(arity);
  out.declaring_type = match_type(pattern.declaring_type, type);
  if (!out.declaring_type.matched) {
    for (const auto& sup : supertypes(type)) {
      const TypeDecl* decl = model_.find(sup);
      if (decl == nullptr || decl->find_method(method, arity) == nullptr) continue;
      TypeMatch m = match_type(pattern.declaring_type, sup);
      if (m.matched) {
        out.declaring_type = std::move(m);
        break;
      }
    }
  }
  out.matched = out.return_type.matched && out.name.matched && out.params && out.declaring_type.matched;
  return out;
}

namespace {

// The method a shadow's code belongs to, as a signature for withincode.
struct SiteSignature {
  std::string type;
  std::string method;
  int arity = 0;
  std::string return_type;
};

SiteSignature site_signature(const ProgramModel& model, const Shadow& s) {
  if (s.kind == ShadowKind::kExecution) return {s.declaring_type, s.method, s.arity, s.return_type};
  SiteSignature sig{s.site_type, s.site_method, s.site_arity, "void"};
  if (const TypeDecl* t = model.find(s.site_type)) {
    if (const MethodDecl* m = t->find_method(s.site_method, s.site_arity)) sig.return_type = m->return_type;
  }
  return sig;
}

bool is_variable(const PrimitivePointcut& prim, const std::vector<PointcutParam>* params) {
  if (params == nullptr || !prim.type.is_identifier()) return false;
  const std::string& id = prim.type.segments[0];
  return std::any_of(params->begin(), params->end(), [&](const PointcutParam& p) { return p.name == id; });
}

constexpr int kMaxDepth = 64;

}  // namespace

std::vector<PatternSite> pattern_sites(const PointcutExpr& expr, const std::vector<PointcutParam>& params) {
  std::vector<PatternSite> out;
  int stars = 0;
  int plus = 0;
  auto add = [&](const TypePattern* t, const NamePattern* n, const char* role, PrimKind kind) {
    PatternSite site;
    site.type = t;
    site.name = n;
    site.role = role;
    site.prim = kind;
    site.wildcard_base = stars;
    stars += t != nullptr ? t->star_count() : (n != nullptr ? n->star_count() : 0);
    if (t && t->subtypes) site.plus_index = plus++;
    out.push_back(std::move(site));
  };
  std::function<void(const PointcutExpr&)> walk = [&](const PointcutExpr& e) {
    switch (e.op) {
      case PointcutExpr::Op::kAnd:
      case PointcutExpr::Op::kOr:
      case PointcutExpr::Op::kNot:
        for (const auto& c : e.children) walk(c);
        return;
      case PointcutExpr::Op::kNamed: return;
      case PointcutExpr::Op::kPrim: break;
    }
    const PrimitivePointcut& p = e.prim;
    if (p.uses_method_pattern()) {
      add(&p.method.return_type, nullptr, "return", p.kind);
      add(&p.method.declaring_type, nullptr, "declaring", p.kind);
      add(nullptr, &p.method.name, "name", p.kind);
    } else if (p.kind == PrimKind::kCflow) {
      for (const auto& c : p.inner) walk(c);
    } else if (!is_variable(p, &params)) {
      add(&p.type, nullptr, p.kind == PrimKind::kWithin ? "within" : p.kind == PrimKind::kThis ? "this" : "target",
          p.kind);
    }
  };
  walk(expr);
  return out;
}

bool Matcher::static_primitive(const PrimitivePointcut& prim, int shadow) const {
  const Shadow& s = shadows_.at(shadow);
  switch (prim.kind) {
    case PrimKind::kCall:
    case PrimKind::kExecution: {
      ShadowKind want = prim.kind == PrimKind::kCall ? ShadowKind::kCall : ShadowKind::kExecution;
      if (s.kind != want) return false;
      return match_signature(prim.method, s.declaring_type, s.method, s.arity, s.return_type).matched;
    }
    case PrimKind::kWithin: {
      if (match_type(prim.type, s.enclosing_type()).matched) return true;
      for (const auto& outer : enclosing_chain(model_, s.enclosing_type())) {
        if (match_type(prim.type, outer).matched) return true;
      }
      return false;
    }
    case PrimKind::kWithincode: {
      SiteSignature sig = site_signature(model_, s);
      return match_signature(prim.method, sig.type, sig.method, sig.arity, sig.return_type).matched;
    }
    default: return false;
  }
}

int Matcher::static_eval(const PointcutExpr& expr, const PointcutContext& ctx, int shadow) const {
  std::function<int(const PointcutExpr&, int)> go = [&](const PointcutExpr& e, int depth) -> int {
    switch (e.op) {
      case PointcutExpr::Op::kAnd: {
        int l = go(e.children[0], depth);
        int r = go(e.children[1], depth);
        if (l == 0 || r == 0) return 0;
        return (l == 1 && r == 1) ? 1 : -1;
      }
      case PointcutExpr::Op::kOr: {
        int l = go(e.children[0], depth);
        int r = go(e.children[1], depth);
        if (l == 1 || r == 1) return 1;
        return (l == 0 && r == 0) ? 0 : -1;
      }
      case PointcutExpr::Op::kNot: {
        int v = go(e.children[0], depth);
        return v == -1 ? -1 : 1 - v;
      }
      case PointcutExpr::Op::kNamed: {
        const NamedPointcut* target = ctx.named ? find_named(*ctx.named, e.name) : nullptr;
        if (target == nullptr || depth > kMaxDepth) {
          throw Error(ErrorCode::kUnresolvedNamedPointcut, "unresolved named pointcut '" + e.name + "'");
        }
        return go(target->expr, depth + 1);
      }
      case PointcutExpr::Op::kPrim:
        if (e.prim.is_dynamic()) return -1;
        return static_primitive(e.prim, shadow) ? 1 : 0;
    }
    return 0;
  };
  return go(expr, 0);
}

std::set<int> Matcher::static_shadows(const PointcutExpr& expr, const PointcutContext& ctx) const {
  std::set<int> out;
  for (const auto& s : shadows_.all()) {
    if (static_eval(expr, ctx, s.id) != 0) out.insert(s.id);
  }
  return out;
}

class Matcher::Evaluation {
 public:
  Evaluation(const Matcher& m, const PointcutContext& ctx, MatchOutcome& out) : m_(m), ctx_(ctx), out_(out) {}

  struct Subject {
    int shadow = 0;
    const std::optional<RuntimeObject>* this_object = nullptr;
    const std::optional<RuntimeObject>* target_object = nullptr;
    const std::vector<int>* stack = nullptr;
    std::size_t stack_size = 0;
  };

  struct Frame {
    const std::vector<PointcutParam>* params = nullptr;
    std::map<std::string, std::string> rename;
    std::string owner;
    int stars = 0;
    int plus = 0;
  };

  bool run(const PointcutExpr& e, const Subject& subj, Frame& frame, bool negated, bool record, int depth) {
    switch (e.op) {
      case PointcutExpr::Op::kAnd: {
        bool l = run(e.children[0], subj, frame, negated, record, depth);
        bool r = run(e.children[1], subj, frame, negated, record, depth);
        return l && r;
      }
      case PointcutExpr::Op::kOr: {
        bool l = run(e.children[0], subj, frame, negated, record, depth);
        bool r = run(e.children[1], subj, frame, negated, record, depth);
        return l || r;
      }
      case PointcutExpr::Op::kNot: return !run(e.children[0], subj, frame, !negated, record, depth);
      case PointcutExpr::Op::kNamed: {
        const NamedPointcut* target = ctx_.named ? find_named(*ctx_.named, e.name) : nullptr;
        if (target == nullptr || depth > kMaxDepth) {
          throw Error(ErrorCode::kUnresolvedNamedPointcut, "unresolved named pointcut '" + e.name + "'");
        }
        Frame inner;
        inner.params = &target->params;
        inner.owner = ctx_.scope.empty() ? target->name : ctx_.scope + "." + target->name;
        for (std::size_t i = 0; i < target->params.size(); ++i) {
          const std::string& pname = target->params[i].name;
          std::string outer = i < e.args.size() ? e.args[i] : pname;
          auto it = frame.rename.find(outer);
          inner.rename[pname] = it == frame.rename.end() ? outer : it->second;
        }
        return run(target->expr, subj, inner, negated, record, depth + 1);
      }
      case PointcutExpr::Op::kPrim: {
        bool v = prim(e.prim, subj, frame, depth);
        if (record) out_.condition_vector.push_back(v != negated);
        return v;
      }
    }
    return false;
  }

 private:
  void witnesses(Frame& frame, const std::vector<Witness>& ws) {
    for (Witness w : ws) out_.witnesses.push_back({frame.owner, frame.stars++, w});
  }

  void untested(Frame& frame, int stars, bool plus) {
    for (int i = 0; i < stars; ++i) out_.witnesses.push_back({frame.owner, frame.stars++, Witness::kNoMatch});
    if (plus) ++frame.plus;
  }

  void type_result(Frame& frame, const TypePattern& p, const TypeMatch& m, const std::string& subject) {
    witnesses(frame, m.witnesses);
    if (p.subtypes) out_.probes.push_back({frame.owner, frame.plus++, subject, m.matched});
  }

  void skip_method(Frame& frame, const MethodPattern& p) {
    untested(frame, p.return_type.star_count(), p.return_type.subtypes);
    untested(frame, p.declaring_type.star_count(), p.declaring_type.subtypes);
    untested(frame, p.name.star_count(), false);
  }

  bool method(Frame& frame, const MethodPattern& p, const std::string& type, const std::string& name, int arity,
              const std::string& ret) {
    SignatureMatch sig = m_.match_signature(p, type, name, arity, ret);
    type_result(frame, p.return_type, sig.return_type, ret);
    type_result(frame, p.declaring_type, sig.declaring_type, type);
    witnesses(frame, sig.name.witnesses);
    return sig.matched;
  }

  const PointcutParam* param_of(const Frame& frame, const PrimitivePointcut& p) const {
    if (!is_variable(p, frame.params)) return nullptr;
    for (const auto& param : *frame.params) {
      if (param.name == p.type.segments[0]) return &param;
    }
    return nullptr;
  }

  bool object_test(const PrimitivePointcut& p, const std::optional<RuntimeObject>* obj, Frame& frame) {
    bool present = obj != nullptr && obj->has_value();
    if (const PointcutParam* param = param_of(frame, p)) {
      if (!present) return false;
      std::string declared = m_.model_.resolve(param->type).value_or(param->type);
      const std::string& cls = (*obj)->class_name;
      bool ok = cls == declared;
      if (!ok) {
        const auto& sup = m_.supertypes(cls);
        ok = std::find(sup.begin(), sup.end(), declared) != sup.end();
      }
      if (ok) {
        auto it = frame.rename.find(param->name);
        out_.bindings[it == frame.rename.end() ? param->name : it->second] = **obj;
      }
      return ok;
    }
    if (!present) {
      untested(frame, p.type.star_count(), p.type.subtypes);
      return false;
    }
    TypeMatch tm = m_.match_type(p.type, (*obj)->class_name);
    type_result(frame, p.type, tm, (*obj)->class_name);
    return tm.matched;
  }

  bool prim(const PrimitivePointcut& p, const Subject& subj, Frame& frame, int depth) {
    const Shadow& s = m_.shadows_.at(subj.shadow);
    switch (p.kind) {
      case PrimKind::kCall:
      case PrimKind::kExecution: {
        ShadowKind want = p.kind == PrimKind::kCall ? ShadowKind::kCall : ShadowKind::kExecution;
        if (s.kind != want) {
          skip_method(frame, p.method);
          return false;
        }
        return method(frame, p.method, s.declaring_type, s.method, s.arity, s.return_type);
      }
      case PrimKind::kWithincode: {
        SiteSignature sig = site_signature(m_.model_, s);
        return method(frame, p.method, sig.type, sig.method, sig.arity, sig.return_type);
      }
      case PrimKind::kWithin: {
        TypeMatch tm = m_.match_type(p.type, s.enclosing_type());
        std::string subject = s.enclosing_type();
        if (!tm.matched) {
          for (const auto& outer : enclosing_chain(m_.model_, s.enclosing_type())) {
            TypeMatch om = m_.match_type(p.type, outer);
            if (om.matched) {
              tm = std::move(om);
              subject = outer;
              break;
            }
          }
        }
        type_result(frame, p.type, tm, subject);
        return tm.matched;
      }
      case PrimKind::kThis: return object_test(p, subj.this_object, frame);
      case PrimKind::kTarget: return object_test(p, subj.target_object, frame);
      case PrimKind::kCflow: return cflow(p, subj, frame, depth);
    }
    return false;
  }

  bool cflow(const PrimitivePointcut& p, const Subject& subj, Frame& frame, int depth) {
    const PointcutExpr& inner = p.inner.front();
    std::optional<std::size_t> hit;
    if (subj.stack != nullptr) {
      for (std::size_t i = subj.stack_size; i-- > 0;) {
        MatchOutcome scratch;
        Evaluation probe(m_, ctx_, scratch);
        Frame f = frame;
        Subject entry{(*subj.stack)[i], nullptr, nullptr, subj.stack, i + 1};
        if (probe.run(inner, entry, f, false, false, depth)) {
          hit = i;
          break;
        }
      }
    }
    // Record the inner patterns once, against the matching entry or the current shadow.
    Subject at{subj.shadow, nullptr, nullptr, subj.stack, subj.stack_size};
    if (hit) at = Subject{(*subj.stack)[*hit], nullptr, nullptr, subj.stack, *hit + 1};
    std::map<std::string, RuntimeObject> keep = out_.bindings;
    run(inner, at, frame, false, false, depth);
    out_.bindings = std::move(keep);
    return hit.has_value();
  }

  const Matcher& m_;
  const PointcutContext& ctx_;
  MatchOutcome& out_;
};

MatchOutcome Matcher::eval(const PointcutExpr& expr, const PointcutContext& ctx, const JoinPoint& jp) const {
  MatchOutcome out;
  Evaluation ev(*this, ctx, out);
  Evaluation::Subject subj{jp.shadow, &jp.this_object, &jp.target_object, &jp.call_stack, jp.call_stack.size()};
  Evaluation::Frame frame;
  frame.params = &ctx.params;
  frame.owner = ctx.label;
  out.matched = ev.run(expr, subj, frame, false, true, 0);
  return out;
}

}  // namespace aspectlab
