#include <doctest.h>

#include <algorithm>

#include "aspectlab/adequacy.hpp"
#include "aspectlab/error.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace aspectlab;

namespace {

const std::string kContractLabel = "CommandContracts.commandExecute";

std::vector<Obligation> of(const std::vector<Obligation>& all, ObligationKind kind, const std::string& label = {}) {
  std::vector<Obligation> out;
  for (const auto& o : all) {
    if (o.kind == kind && (label.empty() || o.label == label)) out.push_back(o);
  }
  return out;
}

std::vector<RunLog> run_all(const Runtime& rt, const std::vector<Scenario>& scenarios) {
  std::vector<RunLog> logs;
  for (const auto& sc : scenarios) logs.push_back(rt.execute(sc));
  return logs;
}

std::vector<Scenario> named_commands() {
  std::vector<Scenario> out;
  for (auto& sc : fixture::scenarios({"contract.scn"})) {
    if (sc.name.rfind("execute", 0) == 0) out.push_back(sc);
  }
  return out;
}

const Obligation* find_vector(const std::vector<Obligation>& obs, std::vector<bool> v) {
  for (const auto& o : obs) {
    if (o.vector == v) return &o;
  }
  return nullptr;
}

// First concrete method on the extends chain, found without the model helpers.
std::string dispatch_by_hand(const ProgramModel& m, std::string type, const std::string& method, int arity) {
  while (true) {
    const TypeDecl& d = m.get(type);
    for (const auto& md : d.methods) {
      if (md.name == method && md.arity() == arity && !md.is_abstract) {
        return type + "." + method + "/" + std::to_string(arity);
      }
    }
    if (!d.extends) return {};
    type = *d.extends;
  }
}

}  // namespace

TEST_CASE("condition vector counts") {
  CHECK(condition_vectors(3, ConditionMode::kEachCondition).size() == 4);
  CHECK(condition_vectors(3, ConditionMode::kExhaustive).size() == 8);
  CHECK(condition_vectors(1, ConditionMode::kEachCondition) == std::vector<std::vector<bool>>{{true}});
  CHECK(condition_vectors(1, ConditionMode::kExhaustive).size() == 2);
  for (std::size_t n = 1; n <= 6; ++n) {
    auto each = condition_vectors(n, ConditionMode::kEachCondition);
    auto all = condition_vectors(n, ConditionMode::kExhaustive);
    CHECK(all.size() == (std::size_t{1} << n));
    CHECK(each.size() == (n == 1 ? 1 : n + 1));
    for (const auto& v : each) {
      CHECK(std::find(all.begin(), all.end(), v) != all.end());
      CHECK((std::count(v.begin(), v.end(), true) == 1 || std::count(v.begin(), v.end(), true) == long(n)));
    }
  }
}

TEST_CASE("obligations for the contract pointcut") {
  auto rt = Runtime::build(fixture::model("contract.apm"), fixture::aspects("contract.apa"));
  const auto& a = rt->aspects()[0];
  const auto& expr = a.named[0].expr;
  CHECK(gen_condition_obligations(expr, a, kContractLabel, ConditionMode::kEachCondition).size() == 4);
  CHECK(gen_condition_obligations(expr, a, kContractLabel, ConditionMode::kExhaustive).size() == 8);

  auto wb = of(gen_wildcard_obligations(rt->aspects()), ObligationKind::kWildcardBoundary, kContractLabel);
  CHECK(wb.size() == 4);

  auto hb = gen_hierarchy_obligations(rt->aspects(), rt->model());
  REQUIRE(hb.size() == 1 + immediate_supertypes(rt->model(), fixture::q("Command")).size());
  CHECK(hb.size() == 1);
  CHECK(hb[0].type == fixture::q("Command"));
  CHECK(hb[0].expect_match);

  auto jp = gen_joinpoint_obligations(*rt);
  CHECK(of(jp, ObligationKind::kJoinPointCoverage, "CommandContracts.advice#0").size() == 17);
}

TEST_CASE("obligation generation on small aspects") {
  auto m = load_model(
      "interface I\ninterface J\nclass C\nclass T extends C implements I, J\n"
      "  method void m()\n    emit m\n  method void mine()\n    emit mine\n");
  auto gen = [&](const std::string& text) {
    auto rt = Runtime::build(m, load_aspects(text).aspects);
    return generate_obligations(*rt, {}).obligations;
  };
  auto wb = gen("aspect A\n  before(): execution(* T.m*()) {\n    emit x\n  }\n");
  CHECK(of(wb, ObligationKind::kWildcardBoundary).size() == 4);
  CHECK(of(gen("aspect A\n  before(): execution(void T.m()) {\n    emit x\n  }\n"), ObligationKind::kWildcardBoundary)
            .empty());
  auto hb = of(gen("aspect A\n  before(): execution(void T+.m()) {\n    emit x\n  }\n"),
               ObligationKind::kHierarchyBoundary);
  REQUIRE(hb.size() == 4);
  CHECK(hb[0].expect_match);
  CHECK(std::count_if(hb.begin(), hb.end(), [](const Obligation& o) { return !o.expect_match; }) == 3);

  auto twice = gen(
      "aspect A\n  pointcut p(): execution(void T.m*())\n"
      "  before(): p() {\n    emit x\n  }\n  after(): p() {\n    emit y\n  }\n");
  CHECK(of(twice, ObligationKind::kJoinPointCoverage).size() == 4);

  auto ab = gen(
      "aspect A\n  before(T t): this(t) && execution(void T.m()) {\n"
      "    if istype(t, T) {\n      if istype(t, C) {\n        emit a\n      }\n    } else {\n      emit b\n    }\n"
      "  }\n");
  CHECK(of(ab, ObligationKind::kAdviceBranch).size() == 4);

  auto dead = Runtime::build(m, load_aspects("aspect A\n  before(): execution(* Nope.*()) {\n    emit x\n  }\n").aspects);
  Diagnostics diags;
  CHECK(gen_joinpoint_obligations(*dead, &diags).empty());
  CHECK_FALSE(diags.empty());
}

TEST_CASE("generation is deterministic") {
  auto rt = Runtime::build(fixture::model("persistence.apm"), fixture::aspects("persistence.apa"));
  auto a = generate_obligations(*rt, {ConditionMode::kExhaustive}).obligations;
  auto b = generate_obligations(*rt, {ConditionMode::kExhaustive}).obligations;
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].id == b[i].id);
    CHECK(a[i].detail == b[i].detail);
  }
  CHECK(a[0].id == "CC.1");
}

TEST_CASE("polymorphic obligations match a brute-force dispatch enumeration") {
  auto rt = Runtime::build(fixture::model("persistence.apm"), fixture::aspects("persistence.apa"));
  const auto& m = rt->model();
  auto obs = gen_polymorphic_obligations(*rt);
  auto rc = of(obs, ObligationKind::kAllReceiverClasses);
  auto tm = of(obs, ObligationKind::kAllTargetMethods);
  CHECK(rc.size() == 3);

  std::set<int> sites;
  for (const auto& o : obs) sites.insert(o.shadow);
  REQUIRE(sites.size() == 1);
  const Shadow& call = rt->shadows().at(*sites.begin());
  CHECK(call.method == "write");

  std::set<std::string> receivers, targets;
  for (const auto& t : m.types()) {
    if (t.is_interface() || is_abstract_type(m, t.name)) continue;
    auto up = oracle::supertypes(m, t.name);
    if (t.name != call.declaring_type && up.count(call.declaring_type) == 0) continue;
    receivers.insert(t.name);
    auto target = dispatch_by_hand(m, t.name, call.method, call.arity);
    if (!target.empty()) targets.insert(target);
  }
  std::set<std::string> rc_types, tm_types;
  for (const auto& o : rc) rc_types.insert(o.type);
  for (const auto& o : tm) tm_types.insert(o.type);
  CHECK(rc_types == receivers);
  CHECK(tm_types == targets);
  CHECK(tm.size() == targets.size());
  CHECK(targets.size() == 3);

  auto logs = run_all(*rt, fixture::scenarios({"persistence.scn"}));
  auto report = check_coverage(obs, logs, rt->hash());
  CHECK(report.tally(ObligationKind::kAllReceiverClasses).met == 3);
  CHECK(report.tally(ObligationKind::kAllTargetMethods).met == 3);
}

TEST_CASE("shared inherited introduction collapses target methods") {
  auto m = load_model(
      "interface S\nclass Base implements S\n  method void store()\n    call this.write(1)\n"
      "class A extends Base\nclass B extends Base\nclass C extends Base\n");
  auto aspects = load_aspects(
                     "aspect P\n  introduce void A.write(String) {\n    emit a\n  }\n"
                     "  introduce void Base.write(String) {\n    emit base\n  }\n")
                     .aspects;
  auto rt = Runtime::build(m, aspects);
  auto obs = gen_polymorphic_obligations(*rt);
  // Base is concrete too, so four receivers; B, C and Base share one target.
  CHECK(of(obs, ObligationKind::kAllReceiverClasses).size() == 4);
  CHECK(of(obs, ObligationKind::kAllTargetMethods).size() == 2);
}

TEST_CASE("coverage of the contract suite") {
  auto rt = Runtime::build(fixture::model("contract.apm"), fixture::aspects("contract.apa"));
  auto full = named_commands();
  REQUIRE(full.size() == 17);
  auto anon = fixture::scenarios({"contract_anonymous.scn"});
  auto named_logs = run_all(*rt, full);
  auto anon_logs = run_all(*rt, anon);
  auto with_anon = named_logs;
  with_anon.insert(with_anon.end(), anon_logs.begin(), anon_logs.end());

  SUBCASE("join points met without the anonymous scenario") {
    auto obs = generate_obligations(*rt, {}).obligations;
    check_coverage(obs, named_logs, rt->hash());
    auto jp = of(obs, ObligationKind::kJoinPointCoverage, "CommandContracts.advice#0");
    CHECK(jp.size() == 17);
    CHECK(std::all_of(jp.begin(), jp.end(), [](const Obligation& o) { return o.met; }));
  }

  SUBCASE("each-condition reaches 3 of 4; the this-false vector is infeasible") {
    auto everything = run_all(*rt, fixture::scenarios({"contract.scn", "contract_anonymous.scn"}));
    auto obs = generate_obligations(*rt, {}).obligations;
    check_coverage(obs, everything, rt->hash());
    auto cc = of(obs, ObligationKind::kConditionCombo, kContractLabel);
    REQUIRE(cc.size() == 4);
    CHECK(std::count_if(cc.begin(), cc.end(), [](const Obligation& o) { return o.met; }) == 3);
    const Obligation* infeasible = find_vector(cc, {false, true, false});
    REQUIRE(infeasible != nullptr);
    CHECK_FALSE(infeasible->met);
    CHECK(find_vector(cc, {true, true, true})->met);
  }

  SUBCASE("[T,T,F] needs the anonymous scenario") {
    auto without = generate_obligations(*rt, {ConditionMode::kExhaustive}).obligations;
    check_coverage(without, named_logs, rt->hash());
    auto open = of(without, ObligationKind::kConditionCombo, kContractLabel);
    const Obligation* gap = find_vector(open, {true, true, false});
    REQUIRE(gap != nullptr);
    CHECK_FALSE(gap->met);
    CHECK(gap->hint.find("within-clause never falsified") != std::string::npos);

    auto with = generate_obligations(*rt, {ConditionMode::kExhaustive}).obligations;
    check_coverage(with, with_anon, rt->hash());
    auto done = of(with, ObligationKind::kConditionCombo, kContractLabel);
    const Obligation* closed = find_vector(done, {true, true, false});
    REQUIRE(closed != nullptr);
    CHECK(closed->met);
    CHECK(closed->met_by == "anonymousExit");
  }
}

TEST_CASE("coverage report arithmetic") {
  auto rt = Runtime::build(fixture::model("undo.apm"), fixture::aspects("undo.apa"));
  auto obs = generate_obligations(*rt, {}).obligations;
  auto empty = check_coverage(obs, {}, rt->hash());
  CHECK(empty.met == 0);
  CHECK_FALSE(empty.warnings.empty());

  auto logs = run_all(*rt, fixture::scenarios({"undo.scn"}));
  auto report = check_coverage(obs, logs, rt->hash());
  int met = 0, total = 0;
  for (const auto& k : report.per_kind) {
    CHECK(k.fraction() >= 0.0);
    CHECK(k.fraction() <= 1.0);
    auto listed = of(obs, k.kind);
    CHECK(k.total == static_cast<int>(listed.size()));
    CHECK(k.met == std::count_if(listed.begin(), listed.end(), [](const Obligation& o) { return o.met; }));
    met += k.met;
    total += k.total;
  }
  CHECK(report.met == met);
  CHECK(report.total == total);
  CHECK(report.overall() == doctest::Approx(static_cast<double>(met) / total));

  logs[0].model_hash = "0000000000000000";
  CHECK_THROWS_AS(check_coverage(obs, logs, rt->hash()), Error);
}

TEST_CASE("unresolved names in abstract aspects") {
  auto aspects = load_aspects(
                     "abstract aspect Reusable\n  before(): execution(void Subject.notify()) {\n    emit x\n  }\n")
                     .aspects;
  auto names = unresolved_pattern_names(aspects, fixture::model("contract.apm"));
  CHECK(names == std::vector<std::string>{"Subject"});
  auto stub = load_model("class Subject\n  method void notify()\n    emit n\n");
  CHECK(unresolved_pattern_names(aspects, stub).empty());
}
