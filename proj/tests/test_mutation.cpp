#include <doctest.h>

#include <algorithm>
#include <chrono>

#include "aspectlab/error.hpp"
#include "aspectlab/mutation.hpp"
#include "support.hpp"

using namespace aspectlab;

namespace {

struct Suite {
  const char* model;
  const char* aspects;
  std::vector<std::string_view> scenarios;
  const char* manifest;
};

const std::vector<Suite>& suites() {
  static const std::vector<Suite> s = {
      {"contract.apm", "contract.apa", {"contract.scn", "contract_anonymous.scn"}, "contract.mutants.tsv"},
      {"persistence.apm", "persistence.apa", {"persistence.scn"}, "persistence.mutants.tsv"},
      {"undo.apm", "undo.apa", {"undo.scn"}, "undo.mutants.tsv"},
  };
  return s;
}

std::vector<Scenario> load_suite(const Suite& s) {
  std::vector<Scenario> out;
  for (auto name : s.scenarios) {
    auto more = fixture::scenarios({name});
    out.insert(out.end(), more.begin(), more.end());
  }
  return out;
}

AnalysisResult analyse(const Suite& s, const std::vector<Scenario>& scenarios, int jobs = 4) {
  auto m = fixture::model(s.model);
  auto a = fixture::aspects(s.aspects);
  AnalysisOptions opts;
  opts.jobs = jobs;
  return run_mutation_analysis(m, a, scenarios, generate_mutants(a, m), opts);
}

int count_op(const std::vector<Mutant>& ms, const std::string& op, const std::string& aspect = {}) {
  return static_cast<int>(std::count_if(ms.begin(), ms.end(), [&](const Mutant& m) {
    return m.op == op && (aspect.empty() || m.location.rfind(aspect + "/", 0) == 0);
  }));
}

const Mutant* find_delta(const std::vector<Mutant>& ms, const std::string& delta) {
  for (const auto& m : ms) {
    if (m.delta == delta) return &m;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("every operator family produces a mutant on the fixtures") {
  std::set<std::string> seen;
  for (const auto& s : suites()) {
    for (const auto& m : generate_mutants(fixture::aspects(s.aspects), fixture::model(s.model))) seen.insert(m.op);
  }
  std::set<std::string> all;
  for (const auto& op : mutation_operators()) all.insert(op.id);
  CHECK(all.size() == 12);
  CHECK(seen == all);
}

TEST_CASE("mutants of the contract aspect") {
  auto ms = generate_mutants(fixture::aspects("contract.apa"), fixture::model("contract.apm"));
  CHECK(count_op(ms, "PC-PP", "CommandContracts") == 1);
  CHECK(count_op(ms, "PC-LO", "CommandContracts") == 5);
  CHECK(count_op(ms, "PC-PT", "CommandContracts") >= 4);
  CHECK(count_op(ms, "ADV-KS", "CommandContracts") == 1);
  CHECK(count_op(ms, "ADV-ST", "CommandContracts") == 1);
  CHECK(count_op(ms, "ADV-PR") == 0);
  for (std::size_t i = 0; i < ms.size(); ++i) {
    char id[8];
    std::snprintf(id, sizeof id, "M%03zu", i + 1);
    CHECK(ms[i].id == id);
  }
}

TEST_CASE("parent replacement needs a second interface") {
  auto m = load_model("interface I\nclass C\n");
  auto a = load_aspects("aspect A\n  declare parents: C implements I\n").aspects;
  auto ms = generate_mutants(a, m);
  CHECK(count_op(ms, "ITD-PD") == 0);
  CHECK(count_op(ms, "ITD-OP") == 1);
}

TEST_CASE("operator selection filters the enumeration") {
  MutationConfig cfg;
  cfg.operators = {"ADV-KS"};
  auto ms = generate_mutants(fixture::aspects("undo.apa"), fixture::model("undo.apm"), cfg);
  REQUIRE_FALSE(ms.empty());
  for (const auto& m : ms) CHECK(m.op == "ADV-KS");
}

TEST_CASE("checked-in manifests are reproduced and fully killed") {
  auto start = std::chrono::steady_clock::now();
  for (const auto& s : suites()) {
    CAPTURE(s.manifest);
    auto result = analyse(s, load_suite(s));
    CHECK(format_mutants_tsv(result.mutants) == fixture::read(s.manifest));
    for (const auto& m : result.mutants) {
      CAPTURE(m.id);
      CHECK(m.status != MutantStatus::kSurvived);
      CHECK(m.status != MutantStatus::kPending);
    }
    REQUIRE(result.score.score().has_value());
    CHECK(*result.score.score() == 1.0);
  }
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(30));
}

TEST_CASE("dropping the within negation") {
  const Suite& contract = suites()[0];
  auto full = load_suite(contract);
  std::vector<Scenario> named;
  for (const auto& sc : full) {
    if (sc.name.rfind("execute", 0) == 0) named.push_back(sc);
  }
  REQUIRE(named.size() == 17);
  auto with_anon = named;
  with_anon.push_back(full.back());
  REQUIRE(with_anon.back().name == "anonymousExit");

  auto drop = find_delta(analyse(contract, with_anon).mutants, "drop ! on within(*..DrawApplication.*)");
  REQUIRE(drop != nullptr);
  CHECK(drop->status == MutantStatus::kKilled);

  // The named commands stop firing the advice too, so they already kill it.
  auto alone = find_delta(analyse(contract, named).mutants, "drop ! on within(*..DrawApplication.*)");
  REQUIRE(alone != nullptr);
  CHECK(alone->status == MutantStatus::kKilled);
  CHECK(alone->divergence == 0);
}

TEST_CASE("before turned into after is killed by a command scenario") {
  auto result = analyse(suites()[0], load_suite(suites()[0]));
  auto ks = find_delta(result.mutants, "before -> after");
  REQUIRE(ks != nullptr);
  CHECK(ks->status == MutantStatus::kKilled);
  CHECK(ks->killer.rfind("execute", 0) == 0);
}

TEST_CASE("analysis is deterministic and monotone in the suite") {
  const Suite& undo = suites()[2];
  auto full = load_suite(undo);
  auto a = analyse(undo, full, 1);
  auto b = analyse(undo, full, 8);
  CHECK(format_mutants_tsv(a.mutants) == format_mutants_tsv(b.mutants));
  for (std::size_t n = 0; n <= full.size(); ++n) {
    std::vector<Scenario> prefix(full.begin(), full.begin() + static_cast<long>(n));
    auto smaller = analyse(undo, prefix);
    CHECK(smaller.score.killed <= a.score.killed);
    CHECK(smaller.score.stillborn == a.score.stillborn);
  }
}

TEST_CASE("score bookkeeping") {
  std::vector<Mutant> ms(5);
  ms[0].status = MutantStatus::kKilled;
  ms[1].status = MutantStatus::kKilled;
  ms[2].status = MutantStatus::kSurvived;
  ms[3].status = MutantStatus::kStillborn;
  ms[4].status = MutantStatus::kFlaggedEquivalent;
  auto s = tally(ms);
  CHECK(s.killed == 2);
  CHECK(s.survived == 1);
  CHECK(s.stillborn == 1);
  CHECK(s.equivalent == 1);
  CHECK(*s.score() == doctest::Approx(2.0 / 3.0));
  CHECK_FALSE(tally({}).score().has_value());
}

TEST_CASE("expected-trace oracle") {
  auto m = fixture::model("contract.apm");
  auto a = fixture::aspects("contract.apa");
  AnalysisOptions opts;
  opts.oracle = OracleMode::kExpected;
  auto good = load_scenarios(
      "scenario paste\n  new c PasteCommand\n  invoke c.execute()\n  expect:\n"
      "    PointcutFired CommandContracts commandExecute 2\n    AdviceFired CommandContracts 0 before 2\n"
      "    ...\n    Exit 2\n");
  auto result = run_mutation_analysis(m, a, good, generate_mutants(a, m), opts);
  CHECK(result.score.killed > 0);

  auto bad = load_scenarios("scenario paste\n  new c PasteCommand\n  invoke c.execute()\n  expect:\n    Emit nothing\n");
  CHECK_THROWS_AS(run_mutation_analysis(m, a, bad, generate_mutants(a, m), opts), Error);
}

TEST_CASE("a recorded baseline over another model is stale") {
  auto m = fixture::model("contract.apm");
  auto a = fixture::aspects("contract.apa");
  auto scenarios = load_suite(suites()[0]);
  auto first = run_mutation_analysis(m, a, scenarios, {});
  auto baseline = first.baseline;
  REQUIRE_FALSE(baseline.empty());
  CHECK_NOTHROW(run_mutation_analysis(m, a, scenarios, {}, {}, &baseline));
  baseline[0].model_hash = "ffffffffffffffff";
  try {
    run_mutation_analysis(m, a, scenarios, {}, {}, &baseline);
    FAIL("expected StaleBaseline");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kStaleBaseline);
  }
}

TEST_CASE("traceability table covers the fault model") {
  // One entry per fault-model bullet: introductions, pointcuts, advice.
  const std::vector<std::pair<std::string, std::string>> bullets = {
      {"ITD-MN", "wrong method name"},   {"ITD-CT", "wrong class"},
      {"ITD-PD", "parent declaration"},  {"ITD-OR", "overriding introduction"},
      {"ITD-OP", "omitted parent"},      {"PC-PP", "wrong primitive pointcut"},
      {"PC-LO", "logic"},                {"PC-PT", "pattern"},
      {"ADV-KS", "advice kind"},         {"ADV-PR", "proceed"},
      {"ADV-PC", "precedence"},          {"ADV-ST", "invariant"},
  };
  const auto& table = mutation_operators();
  REQUIRE(table.size() == bullets.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    CHECK(table[i].id == bullets[i].first);
    std::string fault = table[i].fault;
    std::transform(fault.begin(), fault.end(), fault.begin(), [](unsigned char c) { return std::tolower(c); });
    CHECK(fault.find(bullets[i].second) != std::string::npos);
    CHECK_FALSE(table[i].realization.empty());
    CHECK(is_operator_id(table[i].id));
  }
  CHECK_FALSE(is_operator_id("XX-YY"));
}
