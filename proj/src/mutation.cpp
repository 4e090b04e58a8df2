#include "aspectlab/mutation.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <functional>
#include <thread>

#include "stmt_parser.hpp"

namespace aspectlab {

const std::vector<OperatorInfo>& mutation_operators() {
  static const std::vector<OperatorInfo> table = {
      {"ITD-MN", "introduction under a wrong method name (missing or accidental override)",
       "append _m to an introduced method's name"},
      {"ITD-CT", "member introduced into the wrong class of the hierarchy",
       "retarget an introduction to a sibling of its target (same first immediate supertype)"},
      {"ITD-PD", "inconsistent parent declaration (behavioral subtyping)",
       "replace a declare-parents interface with another interface; structural half only, no contracts"},
      {"ITD-OR", "inconsistent overriding introduction (behavioral subtyping)",
       "swap the bodies of same-named introductions on sibling types"},
      {"ITD-OP", "omitted parent interface", "delete a declare-parents clause"},
      {"PC-PP", "wrong primitive pointcut (call instead of execution)", "swap call and execution"},
      {"PC-LO", "errors in the logic combining pointcut conditions",
       "swap && and || at a binary node; add or remove a negation at a primitive"},
      {"PC-PT", "wrong type or method pattern (field/constructor patterns are outside the model)",
       "replace a literal segment with *, toggle +, delete a .."},
      {"ADV-KS", "wrong advice kind", "rotate before -> after -> after-returning -> before"},
      {"ADV-PR", "wrong or missing proceed in around advice",
       "delete the proceed, or duplicate it (rejected by the loader, so stillborn)"},
      {"ADV-PC", "wrong or missing advice precedence", "reverse a declare precedence list, or delete it"},
      {"ADV-ST", "advice breaking a class invariant or postcondition",
       "surrogate: delete one advice statement; contracts are not modelled"},
  };
  return table;
}

bool is_operator_id(const std::string& id) {
  const auto& t = mutation_operators();
  return std::any_of(t.begin(), t.end(), [&](const OperatorInfo& o) { return o.id == id; });
}

std::string_view to_string(MutantStatus status) {
  switch (status) {
    case MutantStatus::kPending: return "pending";
    case MutantStatus::kStillborn: return "stillborn";
    case MutantStatus::kSurvived: return "survived";
    case MutantStatus::kKilled: return "killed";
    case MutantStatus::kFlaggedEquivalent: return "flagged-equivalent";
  }
  return "?";
}

std::optional<double> MutationScore::score() const {
  if (killed + survived == 0) return std::nullopt;
  return static_cast<double>(killed) / (killed + survived);
}

namespace {

// A pointcut expression owned by an aspect, addressable in a copy.
struct ExprSlot {
  std::size_t aspect = 0;
  bool is_advice = false;
  std::size_t index = 0;
  std::string where;
};

std::vector<ExprSlot> expr_slots(const std::vector<AspectDef>& aspects) {
  std::vector<ExprSlot> out;
  for (std::size_t a = 0; a < aspects.size(); ++a) {
    for (std::size_t i = 0; i < aspects[a].named.size(); ++i) {
      out.push_back({a, false, i, aspects[a].name + "/pointcut " + aspects[a].named[i].name});
    }
    for (std::size_t i = 0; i < aspects[a].advice.size(); ++i) {
      out.push_back({a, true, i,
                     aspects[a].name + "/advice#" + std::to_string(i) + " " +
                         std::string(to_string(aspects[a].advice[i].kind))});
    }
  }
  return out;
}

PointcutExpr& slot_expr(std::vector<AspectDef>& aspects, const ExprSlot& s) {
  return s.is_advice ? aspects[s.aspect].advice[s.index].pointcut : aspects[s.aspect].named[s.index].expr;
}

// Pre-order over an expression, descending into cflow bodies.
void visit(PointcutExpr& e, PointcutExpr* parent, const std::string& path,
           const std::function<void(PointcutExpr&, PointcutExpr*, const std::string&)>& fn) {
  fn(e, parent, path);
  for (std::size_t i = 0; i < e.children.size(); ++i) visit(e.children[i], &e, path + "." + std::to_string(i), fn);
  if (e.op == PointcutExpr::Op::kPrim && e.prim.kind == PrimKind::kCflow) {
    visit(e.prim.inner.front(), &e, path + ".cflow", fn);
  }
}

PointcutExpr* node_at(PointcutExpr& root, int target, PointcutExpr** parent_out) {
  int k = 0;
  PointcutExpr* found = nullptr;
  visit(root, nullptr, "", [&](PointcutExpr& n, PointcutExpr* parent, const std::string&) {
    if (k++ == target) {
      found = &n;
      if (parent_out) *parent_out = parent;
    }
  });
  return found;
}

// Pattern edits are addressed as (node, pattern slot within the primitive).
struct PatternRef {
  TypePattern* type = nullptr;
  NamePattern* name = nullptr;
  std::string role;
};

std::vector<PatternRef> patterns_of(PrimitivePointcut& p, const std::vector<PointcutParam>& params) {
  std::vector<PatternRef> out;
  if (p.uses_method_pattern()) {
    out.push_back({&p.method.return_type, nullptr, "return type"});
    out.push_back({&p.method.declaring_type, nullptr, "declaring type"});
    out.push_back({nullptr, &p.method.name, "method name"});
  } else if (p.kind == PrimKind::kWithin || p.kind == PrimKind::kThis || p.kind == PrimKind::kTarget) {
    bool variable = p.kind != PrimKind::kWithin && p.type.is_identifier() &&
                    std::any_of(params.begin(), params.end(),
                                [&](const PointcutParam& q) { return q.name == p.type.segments[0]; });
    if (!variable) out.push_back({&p.type, nullptr, std::string(to_string(p.kind)) + " type"});
  }
  return out;
}

const std::vector<PointcutParam>& slot_params(const std::vector<AspectDef>& aspects, const ExprSlot& s) {
  return s.is_advice ? aspects[s.aspect].advice[s.index].params : aspects[s.aspect].named[s.index].params;
}

std::string type_of(const ProgramModel& model, const std::string& written) {
  return model.resolve(written).value_or(written);
}

std::string first_supertype(const ProgramModel& model, const std::string& type) {
  if (!model.is_known(type)) return {};
  auto sup = immediate_supertypes(model, type);
  return sup.empty() ? std::string() : sup.front();
}

class Generator {
 public:
  Generator(const std::vector<AspectDef>& aspects, const ProgramModel& model, const MutationConfig& config)
      : aspects_(aspects), model_(model), config_(config) {
    try {
      woven_ = weave_static(model, aspects);
    } catch (const Error&) {
      woven_ = model;
    }
  }

  std::vector<Mutant> run() {
    for (const auto& info : mutation_operators()) {
      if (!config_.operators.empty() && !config_.operators.count(info.id)) continue;
      op_ = info.id;
      if (op_ == "ITD-MN") itd_mn();
      else if (op_ == "ITD-CT") itd_ct();
      else if (op_ == "ITD-PD") itd_pd();
      else if (op_ == "ITD-OR") itd_or();
      else if (op_ == "ITD-OP") itd_op();
      else if (op_ == "PC-PP") pc_pp();
      else if (op_ == "PC-LO") pc_lo();
      else if (op_ == "PC-PT") pc_pt();
      else if (op_ == "ADV-KS") adv_ks();
      else if (op_ == "ADV-PR") adv_pr();
      else if (op_ == "ADV-PC") adv_pc();
      else if (op_ == "ADV-ST") adv_st();
    }
    char buf[16];
    for (std::size_t i = 0; i < out_.size(); ++i) {
      std::snprintf(buf, sizeof buf, "M%03zu", i + 1);
      out_[i].id = buf;
    }
    return std::move(out_);
  }

 private:
  void add(std::string location, std::string delta, const std::function<void(std::vector<AspectDef>&)>& edit) {
    Mutant m;
    m.op = op_;
    m.location = std::move(location);
    m.delta = std::move(delta);
    m.aspects = aspects_;
    edit(m.aspects);
    out_.push_back(std::move(m));
  }

  std::string intro_where(const AspectDef& a, const Introduction& in) const {
    return a.name + "/introduce " + in.target_type + "." + in.method.name;
  }

  std::vector<std::string> siblings(const std::string& type) const {
    std::vector<std::string> out;
    std::string parent = first_supertype(woven_, type);
    if (parent.empty()) return out;
    for (const auto& t : woven_.types()) {
      if (t.name == type || t.is_interface()) continue;
      if (first_supertype(woven_, t.name) == parent) out.push_back(t.name);
    }
    return out;
  }

  void itd_mn() {
    for (std::size_t a = 0; a < aspects_.size(); ++a) {
      for (std::size_t i = 0; i < aspects_[a].introductions.size(); ++i) {
        const auto& in = aspects_[a].introductions[i];
        add(intro_where(aspects_[a], in), in.method.name + " -> " + in.method.name + "_m",
            [&](auto& as) { as[a].introductions[i].method.name += "_m"; });
      }
    }
  }

  void itd_ct() {
    for (std::size_t a = 0; a < aspects_.size(); ++a) {
      for (std::size_t i = 0; i < aspects_[a].introductions.size(); ++i) {
        const auto& in = aspects_[a].introductions[i];
        std::string target = type_of(woven_, in.target_type);
        int n = 0;
        for (const auto& sib : siblings(target)) {
          if (n++ >= config_.sibling_cap) break;
          add(intro_where(aspects_[a], in), "target " + target + " -> " + sib,
              [&](auto& as) { as[a].introductions[i].target_type = sib; });
        }
      }
    }
  }

  void itd_pd() {
    for (std::size_t a = 0; a < aspects_.size(); ++a) {
      for (std::size_t i = 0; i < aspects_[a].declare_parents.size(); ++i) {
        const auto& dp = aspects_[a].declare_parents[i];
        std::string iface = type_of(woven_, dp.interface_name);
        int n = 0;
        for (const auto& t : woven_.types()) {
          if (!t.is_interface() || t.name == iface) continue;
          if (n++ >= config_.sibling_cap) break;
          add(aspects_[a].name + "/declare parents " + pretty_print(dp.pattern), iface + " -> " + t.name,
              [&](auto& as) { as[a].declare_parents[i].interface_name = t.name; });
        }
      }
    }
  }

  void itd_or() {
    for (std::size_t a = 0; a < aspects_.size(); ++a) {
      const auto& intros = aspects_[a].introductions;
      for (std::size_t i = 0; i < intros.size(); ++i) {
        for (std::size_t j = i + 1; j < intros.size(); ++j) {
          if (intros[i].method.name != intros[j].method.name) continue;
          std::string ti = type_of(woven_, intros[i].target_type);
          std::string tj = type_of(woven_, intros[j].target_type);
          if (ti == tj || first_supertype(woven_, ti).empty() ||
              first_supertype(woven_, ti) != first_supertype(woven_, tj)) {
            continue;
          }
          add(aspects_[a].name + "/introduce " + intros[i].method.name,
              "swap bodies " + ti + " <-> " + tj, [&](auto& as) {
                std::swap(as[a].introductions[i].method.body, as[a].introductions[j].method.body);
              });
        }
      }
    }
  }

  void itd_op() {
    for (std::size_t a = 0; a < aspects_.size(); ++a) {
      for (std::size_t i = 0; i < aspects_[a].declare_parents.size(); ++i) {
        const auto& dp = aspects_[a].declare_parents[i];
        add(aspects_[a].name + "/declare parents " + pretty_print(dp.pattern),
            "delete implements " + dp.interface_name,
            [&](auto& as) { as[a].declare_parents.erase(as[a].declare_parents.begin() + static_cast<long>(i)); });
      }
    }
  }

  // Calls fn(slot, node index, node, parent, path) for every node of every pointcut.
  void each_node(const std::function<void(const ExprSlot&, int, PointcutExpr&, PointcutExpr*, const std::string&)>& fn) {
    std::vector<AspectDef> scratch = aspects_;
    for (const auto& slot : expr_slots(aspects_)) {
      int k = 0;
      visit(slot_expr(scratch, slot), nullptr, "root", [&](PointcutExpr& n, PointcutExpr* parent, const std::string& p) {
        fn(slot, k++, n, parent, p);
      });
    }
  }

  void pc_pp() {
    each_node([&](const ExprSlot& slot, int k, PointcutExpr& n, PointcutExpr*, const std::string& path) {
      if (n.op != PointcutExpr::Op::kPrim) return;
      if (n.prim.kind != PrimKind::kCall && n.prim.kind != PrimKind::kExecution) return;
      bool to_call = n.prim.kind == PrimKind::kExecution;
      add(slot.where + " " + path, std::string(to_call ? "execution -> call" : "call -> execution"), [&](auto& as) {
        PointcutExpr* node = node_at(slot_expr(as, slot), k, nullptr);
        node->prim.kind = to_call ? PrimKind::kCall : PrimKind::kExecution;
      });
    });
  }

  void pc_lo() {
    each_node([&](const ExprSlot& slot, int k, PointcutExpr& n, PointcutExpr* parent, const std::string& path) {
      if (n.op == PointcutExpr::Op::kAnd || n.op == PointcutExpr::Op::kOr) {
        bool to_or = n.op == PointcutExpr::Op::kAnd;
        add(slot.where + " " + path, to_or ? "&& -> ||" : "|| -> &&", [&](auto& as) {
          node_at(slot_expr(as, slot), k, nullptr)->op = to_or ? PointcutExpr::Op::kOr : PointcutExpr::Op::kAnd;
        });
        return;
      }
      if (n.op != PointcutExpr::Op::kPrim) return;
      bool negated = parent != nullptr && parent->op == PointcutExpr::Op::kNot;
      std::string text = pretty_print(n.prim);
      add(slot.where + " " + path, negated ? "drop ! on " + text : "add ! on " + text, [&](auto& as) {
        PointcutExpr* par = nullptr;
        PointcutExpr* node = node_at(slot_expr(as, slot), k, &par);
        if (negated) {
          PointcutExpr inner = *node;
          *par = std::move(inner);
        } else {
          PointcutExpr inner = *node;
          *node = PointcutExpr::make_not(std::move(inner));
        }
      });
    });
  }

  void pc_pt() {
    each_node([&](const ExprSlot& slot, int k, PointcutExpr& n, PointcutExpr*, const std::string& path) {
      if (n.op != PointcutExpr::Op::kPrim) return;
      auto refs = patterns_of(n.prim, slot_params(aspects_, slot));
      for (std::size_t r = 0; r < refs.size(); ++r) {
        auto target = [&, r](std::vector<AspectDef>& as) {
          PointcutExpr* node = node_at(slot_expr(as, slot), k, nullptr);
          return patterns_of(node->prim, slot_params(as, slot))[r];
        };
        std::string where = slot.where + " " + path + " " + refs[r].role;
        if (refs[r].name) {
          if (refs[r].name->text != "*") {
            add(where, refs[r].name->text + " -> *", [&](auto& as) { target(as).name->text = "*"; });
          }
          continue;
        }
        const TypePattern& tp = *refs[r].type;
        std::string before = pretty_print(tp);
        for (std::size_t s = 0; s < tp.segments.size(); ++s) {
          if (tp.segments[s] == TypePattern::kAnyPackages || tp.segments[s] == "*") continue;
          TypePattern after = tp;
          after.segments[s] = "*";
          add(where, before + " -> " + pretty_print(after), [&](auto& as) { target(as).type->segments[s] = "*"; });
        }
        TypePattern toggled = tp;
        toggled.subtypes = !tp.subtypes;
        add(where, before + " -> " + pretty_print(toggled), [&](auto& as) {
          target(as).type->subtypes = !target(as).type->subtypes;
        });
        for (std::size_t s = 0; s < tp.segments.size(); ++s) {
          if (tp.segments[s] != TypePattern::kAnyPackages) continue;
          TypePattern after = tp;
          after.segments.erase(after.segments.begin() + static_cast<long>(s));
          add(where, before + " -> " + pretty_print(after), [&](auto& as) {
            auto& segs = target(as).type->segments;
            segs.erase(segs.begin() + static_cast<long>(s));
          });
        }
      }
    });
  }

  void adv_ks() {
    for (std::size_t a = 0; a < aspects_.size(); ++a) {
      for (std::size_t i = 0; i < aspects_[a].advice.size(); ++i) {
        AdviceKind from = aspects_[a].advice[i].kind;
        if (from == AdviceKind::kAround) continue;
        AdviceKind to = from == AdviceKind::kBefore  ? AdviceKind::kAfter
                        : from == AdviceKind::kAfter ? AdviceKind::kAfterReturning
                                                     : AdviceKind::kBefore;
        add(aspects_[a].name + "/advice#" + std::to_string(i),
            std::string(to_string(from)) + " -> " + std::string(to_string(to)),
            [&](auto& as) { as[a].advice[i].kind = to; });
      }
    }
  }

  // Pre-order statement addressing inside a body.
  static Body* parent_body(Body& body, int target, std::size_t* pos) {
    int k = 0;
    Body* found = nullptr;
    std::function<void(Body&)> walk = [&](Body& b) {
      for (std::size_t i = 0; i < b.size() && !found; ++i) {
        if (k++ == target) {
          found = &b;
          *pos = i;
          return;
        }
        walk(b[i].then_body);
        if (found) return;
        walk(b[i].else_body);
      }
    };
    walk(body);
    return found;
  }

  void adv_pr() {
    for (std::size_t a = 0; a < aspects_.size(); ++a) {
      for (std::size_t i = 0; i < aspects_[a].advice.size(); ++i) {
        if (aspects_[a].advice[i].kind != AdviceKind::kAround) continue;
        int k = 0;
        detail::for_each_stmt(aspects_[a].advice[i].body, [&](const Stmt& s) {
          int here = k++;
          if (s.kind != Stmt::Kind::kProceed) return;
          std::string where = aspects_[a].name + "/advice#" + std::to_string(i) + " stmt " + std::to_string(here);
          add(where, "delete proceed", [&](auto& as) {
            std::size_t pos = 0;
            Body* b = parent_body(as[a].advice[i].body, here, &pos);
            b->erase(b->begin() + static_cast<long>(pos));
          });
          add(where, "duplicate proceed", [&](auto& as) {
            std::size_t pos = 0;
            Body* b = parent_body(as[a].advice[i].body, here, &pos);
            b->insert(b->begin() + static_cast<long>(pos) + 1, Stmt::proceed());
          });
        });
      }
    }
  }

  void adv_pc() {
    for (std::size_t a = 0; a < aspects_.size(); ++a) {
      if (!aspects_[a].declares_precedence) continue;
      const auto& list = aspects_[a].precedence;
      std::string text;
      for (const auto& p : list) text += (text.empty() ? "" : ", ") + p;
      if (list.size() >= 2) {
        add(aspects_[a].name + "/declare precedence", "reverse " + text,
            [&](auto& as) { std::reverse(as[a].precedence.begin(), as[a].precedence.end()); });
      }
      add(aspects_[a].name + "/declare precedence", "delete " + text, [&](auto& as) {
        as[a].precedence.clear();
        as[a].declares_precedence = false;
      });
    }
  }

  void adv_st() {
    for (std::size_t a = 0; a < aspects_.size(); ++a) {
      for (std::size_t i = 0; i < aspects_[a].advice.size(); ++i) {
        int k = 0;
        detail::for_each_stmt(aspects_[a].advice[i].body, [&](const Stmt& s) {
          int here = k++;
          if (s.kind == Stmt::Kind::kProceed) return;
          Body single{s};
          add(aspects_[a].name + "/advice#" + std::to_string(i) + " stmt " + std::to_string(here),
              "delete " + format_body(single), [&](auto& as) {
                std::size_t pos = 0;
                Body* b = parent_body(as[a].advice[i].body, here, &pos);
                b->erase(b->begin() + static_cast<long>(pos));
                number_branches(as[a].advice[i].body);
              });
        });
      }
    }
  }

  const std::vector<AspectDef>& aspects_;
  const ProgramModel& model_;
  const MutationConfig& config_;
  ProgramModel woven_;
  std::string op_;
  std::vector<Mutant> out_;
};

}  // namespace

std::vector<Mutant> generate_mutants(const std::vector<AspectDef>& aspects, const ProgramModel& model,
                                     const MutationConfig& config) {
  return Generator(aspects, model, config).run();
}

MutationScore tally(const std::vector<Mutant>& mutants) {
  MutationScore s;
  for (const auto& m : mutants) {
    switch (m.status) {
      case MutantStatus::kKilled: ++s.killed; break;
      case MutantStatus::kSurvived: ++s.survived; break;
      case MutantStatus::kStillborn: ++s.stillborn; break;
      case MutantStatus::kFlaggedEquivalent: ++s.equivalent; break;
      case MutantStatus::kPending: break;
    }
  }
  return s;
}

namespace {

// Exceptions are not modelled, so after and after-returning behave alike.
AdviceKind observable(AdviceKind kind) { return kind == AdviceKind::kAfterReturning ? AdviceKind::kAfter : kind; }

Trace observable(Trace trace) {
  for (auto& e : trace) e.advice_kind = observable(e.advice_kind);
  return trace;
}

// What weaving statically produces: the woven types, the shadows of every
// named pointcut, and at each shadow the advice that may run there, in
// execution order, with kind and body.
struct Signature {
  std::string woven;
  std::vector<std::set<int>> named;
  std::vector<std::vector<std::string>> advice_at;

  bool operator==(const Signature&) const = default;
};

Signature static_signature(const Runtime& rt) {
  Signature sig;
  sig.woven = dump_model(rt.model());
  for (const auto& a : rt.aspects()) {
    for (const auto& pc : a.named) sig.named.push_back(rt.matcher().static_shadows(pc.expr, a.pointcut_context(pc)));
  }
  sig.advice_at.resize(rt.shadows().size());
  for (const auto& ref : rt.advice_order()) {
    const AspectDef& a = rt.aspects()[ref.aspect];
    const AdviceDef& adv = a.advice[ref.index];
    std::string entry = a.advice_label(ref.index) + " " + std::string(to_string(observable(adv.kind))) + " {" +
                        format_body(adv.body) + "}";
    for (int s : rt.matcher().static_shadows(adv.pointcut, a.advice_context(ref.index))) {
      sig.advice_at[static_cast<std::size_t>(s)].push_back(entry);
    }
  }
  return sig;
}

void analyse(Mutant& m, const ProgramModel& model, const std::vector<Scenario>& scenarios,
             const std::vector<RunLog>& baseline, const Signature& base_sig, OracleMode oracle) {
  std::unique_ptr<Runtime> rt;
  try {
    for (const auto& a : m.aspects) validate_aspect(a);
    rt = Runtime::build(model, m.aspects);
  } catch (const Error& e) {
    m.status = MutantStatus::kStillborn;
    m.reason = e.what();
    return;
  }
  ExecOptions opts;
  opts.keep_logs = false;
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    RunLog log = rt->execute(scenarios[s], opts);
    TraceComparison cmp;
    if (oracle == OracleMode::kExpected && scenarios[s].expected) {
      cmp = compare_traces(log.trace, *scenarios[s].expected);
    } else {
      cmp = compare_exact(observable(log.trace), observable(baseline[s].trace));
    }
    if (cmp.pass && log.error_code != baseline[s].error_code) {
      cmp.pass = false;
      cmp.divergence = static_cast<int>(log.trace.size());
    }
    if (!cmp.pass) {
      m.status = MutantStatus::kKilled;
      m.killer = scenarios[s].name;
      m.divergence = cmp.divergence;
      return;
    }
  }
  m.status = static_signature(*rt) == base_sig ? MutantStatus::kFlaggedEquivalent : MutantStatus::kSurvived;
}

}  // namespace

AnalysisResult run_mutation_analysis(const ProgramModel& model, const std::vector<AspectDef>& aspects,
                                     const std::vector<Scenario>& scenarios, std::vector<Mutant> mutants,
                                     const AnalysisOptions& options, const std::vector<RunLog>* recorded_baseline) {
  auto base = Runtime::build(model, aspects);
  AnalysisResult result;
  if (recorded_baseline != nullptr) {
    for (const auto& log : *recorded_baseline) {
      if (log.model_hash != base->hash()) {
        throw Error(ErrorCode::kStaleBaseline, "baseline for scenario '" + log.scenario +
                                                   "' was recorded over a different program");
      }
    }
    for (const auto& sc : scenarios) {
      auto it = std::find_if(recorded_baseline->begin(), recorded_baseline->end(),
                             [&](const RunLog& l) { return l.scenario == sc.name; });
      if (it == recorded_baseline->end()) {
        throw Error(ErrorCode::kStaleBaseline, "baseline has no run for scenario '" + sc.name + "'");
      }
      result.baseline.push_back(*it);
    }
  } else {
    ExecOptions opts;
    opts.keep_logs = false;
    for (const auto& sc : scenarios) result.baseline.push_back(base->execute(sc, opts));
  }
  if (options.oracle == OracleMode::kExpected) {
    for (std::size_t s = 0; s < scenarios.size(); ++s) {
      if (!scenarios[s].expected) continue;
      auto cmp = compare_traces(result.baseline[s].trace, *scenarios[s].expected);
      if (!cmp.pass) {
        throw Error(ErrorCode::kStaleBaseline, "unmutated aspects fail scenario '" + scenarios[s].name +
                                                   "' at event " + std::to_string(cmp.divergence));
      }
    }
  }
  Signature base_sig = static_signature(*base);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < mutants.size(); i = next++) {
      analyse(mutants[i], model, scenarios, result.baseline, base_sig, options.oracle);
    }
  };
  int jobs = std::max(1, options.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  result.score = tally(mutants);
  result.mutants = std::move(mutants);
  return result;
}

std::string format_mutants_tsv(const std::vector<Mutant>& mutants) {
  std::string out = "id\toperator\tlocation\tdelta\tstatus\tkiller\n";
  for (const auto& m : mutants) {
    std::string killer = m.status == MutantStatus::kKilled ? m.killer + "@" + std::to_string(m.divergence) : "-";
    out += m.id + "\t" + m.op + "\t" + m.location + "\t" + m.delta + "\t" + std::string(to_string(m.status)) + "\t" +
           killer + "\n";
  }
  return out;
}

}  // namespace aspectlab
