#include <doctest.h>

#include <chrono>

#include "aspectlab/interpreter.hpp"
#include "aspectlab/matcher.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace aspectlab;

namespace {

NamedPointcut named(std::string name, std::string_view text) {
  NamedPointcut pc;
  pc.name = std::move(name);
  pc.expr = parse_pointcut(text);
  return pc;
}

// Named pointcuts the corpus refers to.
std::vector<NamedPointcut> corpus_named() {
  return {named("inExecuteMethod", "execution(void AbstractCommand.execute())"),
          named("inAbstractClass", "within(*..DrawApplication.*)"),
          named("outsideApplication", "!within(*..DrawApplication.*)"),
          named("commandExecute", fixture::kCommandExecute)};
}

std::vector<Witness> witnesses(std::string_view pattern, std::string_view type, const ProgramModel& m) {
  auto p = parse_pointcut("within(" + std::string(pattern) + ")").prim.type;
  return match_type_pattern(p, type, m).witnesses;
}

const char* const kFixtures[] = {"contract.apm", "persistence.apm", "undo.apm"};

}  // namespace

TEST_CASE("type patterns: literal, subtype and anonymous members") {
  auto m = fixture::model("contract.apm");
  auto lit = parse_pointcut("within(A)").prim.type;
  auto tiny = load_model("class A\n");
  CHECK(match_type_pattern(lit, "A", tiny).matched);
  CHECK(match_type_pattern(lit, "A", tiny).witnesses.empty());

  auto cmd = parse_pointcut("within(Command+)").prim.type;
  CHECK(match_type_pattern(cmd, fixture::q("PasteCommand"), m).matched);
  CHECK(match_type_pattern(cmd, fixture::q("DrawApplication$2"), m).matched);
  CHECK_FALSE(match_type_pattern(cmd, fixture::q("DrawApplication"), m).matched);

  auto app = load_model("package org.app\nclass DrawApplication\n");
  CHECK(witnesses("*..DrawApplication.*", "org.app.DrawApplication$1", app) ==
        std::vector<Witness>{Witness::kNonEmpty, Witness::kNonEmpty});
  CHECK(witnesses("*..DrawApplication.*", "org.app.DrawApplication", app) ==
        std::vector<Witness>{Witness::kNoMatch, Witness::kNoMatch});
}

TEST_CASE("wildcards record empty and non-empty spans") {
  auto m = load_model("class Command\nclass PasteCommand\n");
  CHECK(witnesses("*Command", "PasteCommand", m) == std::vector<Witness>{Witness::kNonEmpty});
  CHECK(witnesses("*Command", "Command", m) == std::vector<Witness>{Witness::kEmpty});
  CHECK(witnesses("Paste*", "PasteCommand", m) == std::vector<Witness>{Witness::kNonEmpty});
  // Leftmost-longest: the first star takes everything it can.
  CHECK(witnesses("*Command*", "PasteCommand", m) == std::vector<Witness>{Witness::kNonEmpty, Witness::kEmpty});
  CHECK(witnesses("*", "PasteCommand", m) == std::vector<Witness>{Witness::kNonEmpty});
}

TEST_CASE("literal names without + are exact equality") {
  for (auto name : kFixtures) {
    auto m = fixture::model(name);
    for (const auto& t : m.types()) {
      TypePattern p;
      std::string seg;
      for (char c : t.name) {
        if (c == '.') {
          p.segments.push_back(seg);
          seg.clear();
        } else {
          seg += c;
        }
      }
      p.segments.push_back(seg);
      for (const auto& other : m.types()) {
        CHECK(match_type_pattern(p, other.name, m).matched == (other.name == t.name));
      }
    }
  }
}

TEST_CASE("commandExecute selects exactly the 17 named command bodies") {
  auto m = fixture::model("contract.apm");
  auto table = compute_shadows(m);
  Matcher matcher(m, table);
  auto shadows = matcher.static_shadows(parse_pointcut(fixture::kCommandExecute), PointcutContext{});
  CHECK(shadows.size() == 17);
  for (int id : shadows) {
    const auto& s = table.at(id);
    CHECK(s.kind == ShadowKind::kExecution);
    CHECK(s.method == "execute");
    const TypeDecl& d = m.get(s.declaring_type);
    CHECK_FALSE(d.anonymous);
    CHECK(d.extends == fixture::q("AbstractCommand"));
  }
}

TEST_CASE("static shadows of simple cases") {
  auto empty = load_model("");
  auto t0 = compute_shadows(empty);
  CHECK(Matcher(empty, t0).static_shadows(parse_pointcut("execution(* *.*(..))"), {}).empty());

  auto m = fixture::model("contract.apm");
  auto table = compute_shadows(m);
  Matcher matcher(m, table);
  auto alone = matcher.static_shadows(parse_pointcut("execution(void PasteCommand.execute())"), {});
  auto with_this = matcher.static_shadows(parse_pointcut("this(c) && execution(void PasteCommand.execute())"), {});
  CHECK(alone.size() == 1);
  CHECK(alone == with_this);
  auto negated = matcher.static_shadows(parse_pointcut("!this(c) && execution(void PasteCommand.execute())"), {});
  CHECK(negated == alone);
}

TEST_CASE("static shadows agree with the brute-force evaluator") {
  auto corpus = fixture::pointcut_corpus();
  auto pcs = corpus_named();
  PointcutContext ctx;
  ctx.named = &pcs;
  std::size_t compared = 0;
  auto start = std::chrono::steady_clock::now();
  for (auto name : kFixtures) {
    auto m = fixture::model(name);
    auto table = compute_shadows(m);
    CHECK(m.types().size() <= 50);
    CHECK(table.size() <= 200);
    Matcher matcher(m, table);
    for (const auto& text : corpus) {
      CAPTURE(name);
      CAPTURE(text);
      auto e = parse_pointcut(text);
      CHECK(matcher.static_shadows(e, ctx) == oracle::static_shadows(m, table, e, pcs));
      for (const auto& s : table.all()) {
        int want = oracle::eval(m, e, pcs, s);
        CHECK(matcher.static_eval(e, ctx, s.id) == (want == 2 ? -1 : want));
      }
      ++compared;
    }
  }
  CHECK(compared == corpus.size() * 3);
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(5));
}

TEST_CASE("condition vectors at named and anonymous commands") {
  auto m = fixture::model("contract.apm");
  auto aspects = fixture::aspects("contract.apa");
  auto rt = Runtime::build(m, aspects);
  auto scenarios = fixture::scenarios({"contract.scn", "contract_anonymous.scn"});
  std::map<std::string, std::vector<bool>> seen;
  std::map<std::string, bool> fired;
  for (const auto& sc : scenarios) {
    if (sc.name != "executePaste" && sc.name != "anonymousExit") continue;
    auto log = rt->execute(sc);
    for (const auto& ev : log.evaluations) {
      if (ev.label != "CommandContracts.commandExecute") continue;
      const auto& s = rt->shadows().at(ev.shadow);
      if (s.kind != ShadowKind::kExecution || s.method != "execute") continue;
      seen[sc.name] = ev.outcome.condition_vector;
      fired[sc.name] = ev.outcome.matched;
    }
  }
  CHECK(seen["executePaste"] == std::vector<bool>{true, true, true});
  CHECK(fired["executePaste"]);
  CHECK(seen["anonymousExit"] == std::vector<bool>{true, true, false});
  CHECK_FALSE(fired["anonymousExit"]);
}

TEST_CASE("dynamic evaluation is sound, deterministic and agrees with its own vector") {
  struct Case {
    const char* model;
    const char* aspects;
    std::vector<std::string_view> scenarios;
  };
  std::vector<Case> cases = {{"contract.apm", "contract.apa", {"contract.scn", "contract_anonymous.scn"}},
                             {"contract.apm", "contract_testability.apa", {"contract.scn", "contract_anonymous.scn"}},
                             {"persistence.apm", "persistence.apa", {"persistence.scn"}},
                             {"undo.apm", "undo.apa", {"undo.scn"}}};
  for (const auto& c : cases) {
    auto rt = Runtime::build(fixture::model(c.model), fixture::aspects(c.aspects));
    std::map<std::string, std::set<int>> statics;
    std::map<std::string, std::pair<const PointcutExpr*, PointcutContext>> exprs;
    for (const auto& a : rt->aspects()) {
      for (std::size_t i = 0; i < a.advice.size(); ++i) {
        exprs[a.advice_label(i)] = {&a.advice[i].pointcut, a.advice_context(i)};
      }
      for (const auto& pc : a.named) exprs[a.pointcut_label(pc)] = {&pc.expr, a.pointcut_context(pc)};
    }
    for (const auto& [label, e] : exprs) statics[label] = rt->matcher().static_shadows(*e.first, e.second);

    std::vector<Scenario> suite;
    for (auto s : c.scenarios) {
      auto more = fixture::scenarios({s});
      suite.insert(suite.end(), more.begin(), more.end());
    }
    for (const auto& sc : suite) {
      auto log = rt->execute(sc);
      auto again = rt->execute(sc);
      CHECK(dump_trace(log.trace) == dump_trace(again.trace));
      REQUIRE(log.evaluations.size() == again.evaluations.size());
      for (std::size_t i = 0; i < log.evaluations.size(); ++i) {
        const auto& ev = log.evaluations[i];
        CAPTURE(ev.label);
        CHECK(ev.outcome == again.evaluations[i].outcome);
        REQUIRE(exprs.count(ev.label) == 1);
        const auto& [expr, ctx] = exprs[ev.label];
        if (ev.outcome.matched) CHECK(statics[ev.label].count(ev.shadow) == 1);
        CHECK(ev.outcome.condition_vector.size() == flatten_conditions(*expr, *ctx.named).size());
        // The vector already carries each literal's polarity.
        CHECK(combine_conditions(*expr, *ctx.named, ev.outcome.condition_vector) == ev.outcome.matched);
      }
    }
  }
}
