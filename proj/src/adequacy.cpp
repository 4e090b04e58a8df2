#include "aspectlab/adequacy.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "stmt_parser.hpp"

namespace aspectlab {

std::string_view to_string(ObligationKind kind) {
  switch (kind) {
    case ObligationKind::kConditionCombo: return "ConditionCombo";
    case ObligationKind::kWildcardBoundary: return "WildcardBoundary";
    case ObligationKind::kHierarchyBoundary: return "HierarchyBoundary";
    case ObligationKind::kJoinPointCoverage: return "JoinPointCoverage";
    case ObligationKind::kAllReceiverClasses: return "AllReceiverClasses";
    case ObligationKind::kAllTargetMethods: return "AllTargetMethods";
    case ObligationKind::kAdviceBranch: return "AdviceBranch";
  }
  return "?";
}

std::string_view id_prefix(ObligationKind kind) {
  switch (kind) {
    case ObligationKind::kConditionCombo: return "CC";
    case ObligationKind::kWildcardBoundary: return "WB";
    case ObligationKind::kHierarchyBoundary: return "HB";
    case ObligationKind::kJoinPointCoverage: return "JP";
    case ObligationKind::kAllReceiverClasses: return "RC";
    case ObligationKind::kAllTargetMethods: return "TM";
    case ObligationKind::kAdviceBranch: return "AB";
  }
  return "?";
}

std::string Obligation::status() const {
  if (!met) return "unmet";
  return "met(" + met_by + ":" + std::to_string(met_event) + ")";
}

namespace {

std::string vector_text(const std::vector<bool>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += std::string(i ? "," : "") + (v[i] ? "T" : "F");
  return out + "]";
}

std::string joined_pattern(const TypePattern& p) {
  std::string out;
  for (const auto& s : p.segments) out += (out.empty() ? "" : ".") + s;
  return out;
}

bool is_bare_named(const PointcutExpr& e) { return e.op == PointcutExpr::Op::kNamed; }

}  // namespace

std::vector<std::vector<bool>> condition_vectors(std::size_t n, ConditionMode mode) {
  std::vector<std::vector<bool>> out;
  if (n == 0) return out;
  if (mode == ConditionMode::kExhaustive) {
    if (n > 20) throw Error(ErrorCode::kSyntax, "too many conditions for exhaustive mode");
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
      std::vector<bool> v(n);
      for (std::size_t i = 0; i < n; ++i) v[i] = (mask >> (n - 1 - i)) & 1u;
      out.push_back(std::move(v));
    }
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<bool> v(n, false);
    v[i] = true;
    out.push_back(std::move(v));
  }
  std::vector<bool> all(n, true);
  if (std::find(out.begin(), out.end(), all) == out.end()) out.push_back(all);
  return out;
}

std::vector<LabelledPointcut> labelled_pointcuts(const std::vector<AspectDef>& aspects) {
  std::vector<LabelledPointcut> out;
  for (std::size_t a = 0; a < aspects.size(); ++a) {
    const AspectDef& aspect = aspects[a];
    for (const auto& pc : aspect.named) {
      out.push_back({a, aspect.pointcut_label(pc), &pc.expr, aspect.pointcut_context(pc)});
    }
    for (std::size_t i = 0; i < aspect.advice.size(); ++i) {
      if (is_bare_named(aspect.advice[i].pointcut)) continue;
      out.push_back({a, aspect.advice_label(i), &aspect.advice[i].pointcut, aspect.advice_context(i)});
    }
  }
  return out;
}

std::vector<Obligation> gen_condition_obligations(const PointcutExpr& expr, const AspectDef& aspect,
                                                  const std::string& label, ConditionMode mode) {
  auto conds = flatten_conditions(expr, aspect.named);
  std::vector<Obligation> out;
  for (auto& v : condition_vectors(conds.size(), mode)) {
    Obligation o;
    o.kind = ObligationKind::kConditionCombo;
    o.label = label;
    o.detail = label + " " + vector_text(v);
    for (const auto& c : conds) o.conditions.emplace_back(to_string(c.prim.kind));
    o.vector = std::move(v);
    out.push_back(std::move(o));
  }
  return out;
}

std::vector<Obligation> gen_wildcard_obligations(const std::vector<AspectDef>& aspects) {
  std::vector<Obligation> out;
  for (const auto& lp : labelled_pointcuts(aspects)) {
    for (const auto& site : pattern_sites(*lp.expr, lp.context.params)) {
      int stars = site.type ? site.type->star_count() : site.name->star_count();
      std::string text = site.type ? pretty_print(*site.type) : site.name->text;
      for (int k = 0; k < stars; ++k) {
        for (Witness w : {Witness::kEmpty, Witness::kNonEmpty}) {
          Obligation o;
          o.kind = ObligationKind::kWildcardBoundary;
          o.label = lp.label;
          o.occurrence = site.wildcard_base + k;
          o.required = w;
          o.detail = lp.label + " *#" + std::to_string(o.occurrence) + " in " + std::string(to_string(site.prim)) +
                     " " + site.role + " '" + text + "' " + std::string(to_string(w));
          out.push_back(std::move(o));
        }
      }
    }
  }
  return out;
}

std::vector<Obligation> gen_hierarchy_obligations(const std::vector<AspectDef>& aspects, const ProgramModel& model,
                                                  Diagnostics* diagnostics) {
  std::vector<Obligation> out;
  for (const auto& lp : labelled_pointcuts(aspects)) {
    for (const auto& site : pattern_sites(*lp.expr, lp.context.params)) {
      if (site.plus_index < 0) continue;
      TypePattern base = *site.type;
      base.subtypes = false;
      if (!base.is_exact()) {
        if (diagnostics) {
          diagnostics->push_back({Severity::kWarning, "HierarchyPattern",
                                  lp.label + ": '" + pretty_print(*site.type) +
                                      "' has no single named type; no hierarchy obligations",
                                  0});
        }
        continue;
      }
      auto t = model.resolve(joined_pattern(base));
      if (!t) throw Error(ErrorCode::kUnknownType, "unknown type '" + joined_pattern(base) + "' in " + lp.label);
      auto add = [&](const std::string& type, bool expect) {
        Obligation o;
        o.kind = ObligationKind::kHierarchyBoundary;
        o.label = lp.label;
        o.pattern = site.plus_index;
        o.type = type;
        o.expect_match = expect;
        o.detail = lp.label + " '" + pretty_print(*site.type) + "' at " + type + (expect ? " match" : " no-match");
        out.push_back(std::move(o));
      };
      add(*t, true);
      for (const auto& s : immediate_supertypes(model, *t)) add(s, false);
    }
  }
  return out;
}

std::vector<Obligation> gen_joinpoint_obligations(const Runtime& runtime, Diagnostics* diagnostics) {
  std::vector<Obligation> out;
  const auto& aspects = runtime.aspects();
  for (const auto& aspect : aspects) {
    for (std::size_t i = 0; i < aspect.advice.size(); ++i) {
      auto shadows = runtime.matcher().static_shadows(aspect.advice[i].pointcut, aspect.advice_context(i));
      if (shadows.empty() && diagnostics) {
        diagnostics->push_back({Severity::kWarning, "DeadPointcut",
                                aspect.advice_label(i) + " matches no join point shadow", aspect.advice[i].line});
      }
      for (int s : shadows) {
        const Shadow& sh = runtime.shadows().at(s);
        Obligation o;
        o.kind = ObligationKind::kJoinPointCoverage;
        o.label = aspect.advice_label(i);
        o.shadow = s;
        o.detail = o.label + " @ " + std::to_string(s) + " " + std::string(to_string(sh.kind)) + " " + sh.signature();
        out.push_back(std::move(o));
      }
    }
  }
  return out;
}

std::vector<Obligation> gen_polymorphic_obligations(const Runtime& runtime) {
  const ProgramModel& model = runtime.model();
  std::vector<Obligation> receivers, targets;
  for (const auto& sh : runtime.shadows().all()) {
    if (sh.kind != ShadowKind::kCall || sh.is_super || !model.is_known(sh.declaring_type)) continue;
    std::vector<std::string> classes;
    std::vector<std::pair<std::string, bool>> bound;  // target signature, introduced
    for (const auto& t : subtypes_transitive(model, sh.declaring_type)) {
      const TypeDecl* decl = model.find(t);
      if (decl == nullptr || decl->is_interface() || is_abstract_type(model, t)) continue;
      classes.push_back(t);
      try {
        DispatchTarget d = resolve_dispatch(model, t, sh.method, sh.arity);
        std::string sig = d.declaring_type + "." + d.method->name + "/" + std::to_string(d.method->arity());
        bool introduced = d.method->introduced_by.has_value();
        if (std::none_of(bound.begin(), bound.end(), [&](const auto& b) { return b.first == sig; })) {
          bound.emplace_back(sig, introduced);
        }
      } catch (const Error&) {
      }
    }
    bool any_introduced = std::any_of(bound.begin(), bound.end(), [](const auto& b) { return b.second; });
    if (!any_introduced || classes.size() < 2) continue;
    std::string where = std::to_string(sh.id) + " " + sh.site() + " " + sh.signature();
    for (const auto& c : classes) {
      Obligation o;
      o.kind = ObligationKind::kAllReceiverClasses;
      o.shadow = sh.id;
      o.type = c;
      o.detail = "call " + where + " receiver " + c;
      receivers.push_back(std::move(o));
    }
    for (const auto& [sig, introduced] : bound) {
      Obligation o;
      o.kind = ObligationKind::kAllTargetMethods;
      o.shadow = sh.id;
      o.type = sig;
      o.detail = "call " + where + " -> " + sig + (introduced ? " (introduced)" : "");
      targets.push_back(std::move(o));
    }
  }
  receivers.insert(receivers.end(), targets.begin(), targets.end());
  return receivers;
}

namespace {

void branch_obligations(const Body& body, const std::string& owner, std::vector<Obligation>& out) {
  detail::for_each_stmt(body, [&](const Stmt& s) {
    if (s.kind != Stmt::Kind::kIfType) return;
    for (bool then_branch : {true, false}) {
      Obligation o;
      o.kind = ObligationKind::kAdviceBranch;
      o.label = owner;
      o.ordinal = s.ordinal;
      o.then_branch = then_branch;
      o.detail = owner + " if#" + std::to_string(s.ordinal) + " istype(" + s.variable + ", " + s.type_name + ") " +
                 (then_branch ? "then" : "else");
      out.push_back(std::move(o));
    }
  });
}

}  // namespace

std::vector<Obligation> gen_advice_branch_obligations(const Runtime& runtime) {
  std::vector<Obligation> out;
  for (const auto& aspect : runtime.aspects()) {
    for (std::size_t i = 0; i < aspect.advice.size(); ++i) {
      branch_obligations(aspect.advice[i].body, aspect.advice_label(i), out);
    }
  }
  for (const auto& t : runtime.model().types()) {
    for (const auto& m : t.methods) {
      if (!m.introduced_by) continue;
      branch_obligations(m.body, t.name + "." + m.name + "/" + std::to_string(m.arity()), out);
    }
  }
  return out;
}

std::vector<std::string> unresolved_pattern_names(const std::vector<AspectDef>& aspects, const ProgramModel& model) {
  std::set<std::string> names;
  auto check = [&](const TypePattern& p) {
    TypePattern base = p;
    base.subtypes = false;
    if (base.is_exact() && !model.resolve(joined_pattern(base))) names.insert(joined_pattern(base));
  };
  for (const auto& lp : labelled_pointcuts(aspects)) {
    for (const auto& site : pattern_sites(*lp.expr, lp.context.params)) {
      if (site.type) check(*site.type);
    }
  }
  return {names.begin(), names.end()};
}

ObligationSet generate_obligations(const Runtime& runtime, const ObligationConfig& config) {
  ObligationSet set;
  const auto& aspects = runtime.aspects();
  auto missing = unresolved_pattern_names(aspects, runtime.model());
  if (!missing.empty()) {
    std::string list;
    for (const auto& n : missing) list += (list.empty() ? "" : ", ") + n;
    set.diagnostics.push_back({Severity::kError, "StubRequired",
                               "pointcuts name types absent from the model (" + list +
                                   "); supply a stub application with --stub-model",
                               0});
  }
  std::vector<Obligation> all;
  for (const auto& lp : labelled_pointcuts(aspects)) {
    auto cc = gen_condition_obligations(*lp.expr, aspects[lp.aspect], lp.label, config.mode);
    all.insert(all.end(), cc.begin(), cc.end());
  }
  auto append = [&](std::vector<Obligation> more) { all.insert(all.end(), more.begin(), more.end()); };
  append(gen_wildcard_obligations(aspects));
  if (missing.empty()) append(gen_hierarchy_obligations(aspects, runtime.model(), &set.diagnostics));
  append(gen_joinpoint_obligations(runtime, &set.diagnostics));
  append(gen_polymorphic_obligations(runtime));
  append(gen_advice_branch_obligations(runtime));
  std::map<ObligationKind, int> counters;
  for (auto& o : all) o.id = std::string(id_prefix(o.kind)) + "." + std::to_string(++counters[o.kind]);
  set.obligations = std::move(all);
  return set;
}

const KindTally& CoverageReport::tally(ObligationKind kind) const {
  for (const auto& t : per_kind) {
    if (t.kind == kind) return t;
  }
  throw std::out_of_range("no tally for kind");
}

namespace {

struct Hit {
  std::string scenario;
  int event = -1;
};

std::string witness_key(const std::string& owner, int occ, Witness w) {
  return owner + "\x1f" + std::to_string(occ) + "\x1f" + std::string(to_string(w));
}

std::string probe_key(const std::string& owner, int pattern, const std::string& type, bool matched) {
  return owner + "\x1f" + std::to_string(pattern) + "\x1f" + type + "\x1f" + (matched ? "1" : "0");
}

std::string int_key(const std::string& a, int b) { return a + "\x1f" + std::to_string(b); }

std::string condition_hint(const Obligation& o, const std::vector<std::vector<bool>>& seen) {
  std::vector<std::string> parts;
  for (std::size_t i = 0; i < o.vector.size(); ++i) {
    bool observed = std::any_of(seen.begin(), seen.end(), [&](const std::vector<bool>& v) {
      return i < v.size() && v[i] == o.vector[i];
    });
    if (observed) continue;
    std::string name = i < o.conditions.size() ? o.conditions[i] : "condition";
    parts.push_back(name + "-clause never " + (o.vector[i] ? "satisfied" : "falsified"));
  }
  if (parts.empty()) return "each value seen, never together";
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : "; ") + p;
  return out;
}

}  // namespace

CoverageReport check_coverage(std::vector<Obligation>& obligations, const std::vector<RunLog>& logs,
                              const std::string& expected_hash) {
  for (const auto& log : logs) {
    if (log.model_hash != expected_hash) {
      throw Error(ErrorCode::kStaleLog, "log for scenario '" + log.scenario + "' was recorded over model " +
                                            log.model_hash + ", current is " + expected_hash);
    }
  }
  std::map<std::string, std::map<std::vector<bool>, Hit>> vectors;
  std::map<std::string, Hit> witnesses, probes, fired, receivers, targets, branches;
  auto note = [](std::map<std::string, Hit>& m, const std::string& key, const std::string& scen, int ev) {
    m.emplace(key, Hit{scen, ev});
  };
  for (const auto& log : logs) {
    for (const auto& ev : log.evaluations) {
      vectors[ev.label].emplace(ev.outcome.condition_vector, Hit{log.scenario, ev.event_index});
      for (const auto& w : ev.outcome.witnesses) {
        note(witnesses, witness_key(w.owner, w.occurrence, w.state), log.scenario, ev.event_index);
      }
      for (const auto& p : ev.outcome.probes) {
        note(probes, probe_key(p.owner, p.pattern, p.subject_type, p.matched), log.scenario, ev.event_index);
      }
    }
    for (std::size_t i = 0; i < log.trace.size(); ++i) {
      const TraceEvent& e = log.trace[i];
      if (e.kind != TraceEvent::Kind::kAdviceFired) continue;
      note(fired, int_key(e.aspect + ".advice#" + std::to_string(e.advice_index), e.shadow), log.scenario,
           static_cast<int>(i));
    }
    for (const auto& d : log.dispatches) {
      note(receivers, int_key(d.receiver_class, d.shadow), log.scenario, d.event_index);
      note(targets, int_key(d.target, d.shadow), log.scenario, d.event_index);
    }
    for (const auto& b : log.branches) {
      note(branches, int_key(b.owner, b.ordinal) + (b.then_branch ? "T" : "F"), log.scenario, b.event_index);
    }
  }

  auto lookup = [](const std::map<std::string, Hit>& m, const std::string& key) -> const Hit* {
    auto it = m.find(key);
    return it == m.end() ? nullptr : &it->second;
  };
  for (auto& o : obligations) {
    const Hit* hit = nullptr;
    o.hint.clear();
    switch (o.kind) {
      case ObligationKind::kConditionCombo: {
        auto it = vectors.find(o.label);
        if (it != vectors.end()) {
          auto v = it->second.find(o.vector);
          if (v != it->second.end()) hit = &v->second;
        }
        if (!hit) {
          std::vector<std::vector<bool>> seen;
          if (it != vectors.end()) {
            for (const auto& [vec, h] : it->second) seen.push_back(vec);
          }
          o.hint = it == vectors.end() ? "pointcut never evaluated" : condition_hint(o, seen);
        }
        break;
      }
      case ObligationKind::kWildcardBoundary:
        hit = lookup(witnesses, witness_key(o.label, o.occurrence, o.required));
        if (!hit) o.hint = std::string("no join point aligned this wildcard ") + std::string(to_string(o.required));
        break;
      case ObligationKind::kHierarchyBoundary:
        hit = lookup(probes, probe_key(o.label, o.pattern, o.type, o.expect_match));
        if (!hit) o.hint = "no join point on " + o.type + " evaluated";
        break;
      case ObligationKind::kJoinPointCoverage:
        hit = lookup(fired, int_key(o.label, o.shadow));
        if (!hit) o.hint = "advice never fired at this shadow";
        break;
      case ObligationKind::kAllReceiverClasses:
        hit = lookup(receivers, int_key(o.type, o.shadow));
        if (!hit) o.hint = "call never made on a " + o.type;
        break;
      case ObligationKind::kAllTargetMethods:
        hit = lookup(targets, int_key(o.type, o.shadow));
        if (!hit) o.hint = "binding never exercised";
        break;
      case ObligationKind::kAdviceBranch:
        hit = lookup(branches, int_key(o.label, o.ordinal) + (o.then_branch ? "T" : "F"));
        if (!hit) o.hint = "branch never taken";
        break;
    }
    o.met = hit != nullptr;
    o.met_by = hit ? hit->scenario : "";
    o.met_event = hit ? hit->event : -1;
  }

  CoverageReport report;
  for (ObligationKind k : kAllObligationKinds) {
    KindTally t{k};
    for (const auto& o : obligations) {
      if (o.kind != k) continue;
      ++t.total;
      t.met += o.met;
    }
    if (t.total == 0) report.warnings.push_back(std::string(to_string(k)) + ": no obligations (0/0 counted as 100%)");
    report.met += t.met;
    report.total += t.total;
    report.per_kind.push_back(t);
  }
  if (report.total == 0) report.warnings.push_back("no obligations at all; coverage is vacuously 100%");
  return report;
}

std::string format_obligation(const Obligation& o) {
  return o.id + "\t" + std::string(to_string(o.kind)) + "\t" + o.detail + "\t" + o.status();
}

std::string format_report(const CoverageReport& report, const std::vector<Obligation>& obligations) {
  char buf[64];
  std::string out;
  for (const auto& t : report.per_kind) {
    std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * t.fraction());
    out += std::string(to_string(t.kind)) + "\t" + std::to_string(t.met) + "/" + std::to_string(t.total) + "\t" +
           buf + "\n";
  }
  std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * report.overall());
  out += "Overall\t" + std::to_string(report.met) + "/" + std::to_string(report.total) + "\t" + buf + "\n";
  bool header = false;
  for (const auto& o : obligations) {
    if (o.met) continue;
    if (!header) out += "unmet:\n";
    header = true;
    out += "  " + o.id + "\t" + o.detail + (o.hint.empty() ? "" : "\t(" + o.hint + ")") + "\n";
  }
  return out;
}

}  // namespace aspectlab
