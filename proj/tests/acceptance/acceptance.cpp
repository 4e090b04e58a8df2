// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "aspectlab/adequacy.hpp"
#include "aspectlab/cli.hpp"
#include "aspectlab/mutation.hpp"
#include "oracle.hpp"
#include "support.hpp"
#include "weaving_props.hpp"

using namespace aspectlab;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned limits.
constexpr double kShadowSeconds = 1.0;
constexpr double kOracleSeconds = 5.0;
constexpr double kMutationSeconds = 30.0;
constexpr std::size_t kMinOracleCorpus = 30;
constexpr std::size_t kMinRoundTripCorpus = 50;
constexpr std::size_t kFigureExpressions = 7;

struct Line {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

const std::string kContractLabel = "CommandContracts.commandExecute";

std::vector<Scenario> named_commands() {
  std::vector<Scenario> out;
  for (auto& sc : fixture::scenarios({"contract.scn"})) {
    if (sc.name.rfind("execute", 0) == 0) out.push_back(sc);
  }
  return out;
}

Line shadows_17() {
  auto m = fixture::model("contract.apm");
  auto start = Clock::now();
  auto table = compute_shadows(m);
  Matcher matcher(m, table);
  auto s = matcher.static_shadows(parse_pointcut(fixture::kCommandExecute), {});
  double t = seconds_since(start);
  return {s.size() == 17 && t < kShadowSeconds,
          std::to_string(s.size()) + " shadows (want 17), " + fmt(t) + " s (limit " + fmt(kShadowSeconds) + ")"};
}

Line obligation_counts() {
  auto rt = Runtime::build(fixture::model("contract.apm"), fixture::aspects("contract.apa"));
  const auto& a = rt->aspects()[0];
  auto each = gen_condition_obligations(a.named[0].expr, a, kContractLabel, ConditionMode::kEachCondition).size();
  auto all = gen_condition_obligations(a.named[0].expr, a, kContractLabel, ConditionMode::kExhaustive).size();
  std::size_t wb = 0;
  for (const auto& o : gen_wildcard_obligations(rt->aspects())) wb += o.label == kContractLabel;
  auto hb = gen_hierarchy_obligations(rt->aspects(), rt->model()).size();
  auto want_hb = 1 + immediate_supertypes(rt->model(), fixture::q("Command")).size();
  bool ok = each == 4 && all == 8 && wb == 4 && hb == want_hb;
  return {ok, "each-condition " + std::to_string(each) + "/4, exhaustive " + std::to_string(all) + "/8, wildcard " +
                  std::to_string(wb) + "/4, hierarchy " + std::to_string(hb) + "/" + std::to_string(want_hb)};
}

Line coverage_gap() {
  auto m = fixture::model("contract.apm");
  auto aspects = fixture::aspects("contract.apa");
  auto rt = Runtime::build(m, aspects);
  auto named = named_commands();
  auto with_anon = named;
  auto anon = fixture::scenarios({"contract_anonymous.scn"});
  with_anon.insert(with_anon.end(), anon.begin(), anon.end());

  auto logs_of = [&](const std::vector<Scenario>& suite) {
    std::vector<RunLog> logs;
    for (const auto& sc : suite) logs.push_back(rt->execute(sc));
    return logs;
  };
  auto ttf_met = [&](const std::vector<RunLog>& logs, int& jp_met, int& jp_total) {
    auto obs = generate_obligations(*rt, {ConditionMode::kExhaustive}).obligations;
    check_coverage(obs, logs, rt->hash());
    bool met = false;
    jp_met = jp_total = 0;
    for (const auto& o : obs) {
      if (o.kind == ObligationKind::kConditionCombo && o.label == kContractLabel &&
          o.vector == std::vector<bool>{true, true, false}) {
        met = o.met;
      }
      if (o.kind == ObligationKind::kJoinPointCoverage && o.label == "CommandContracts.advice#0") {
        ++jp_total;
        jp_met += o.met;
      }
    }
    return met;
  };
  int jp_met = 0, jp_total = 0, jp2 = 0, jp2_total = 0;
  bool gap_unmet = !ttf_met(logs_of(named), jp_met, jp_total);
  bool closed = ttf_met(logs_of(with_anon), jp2, jp2_total);

  auto drop_status = [&](const std::vector<Scenario>& suite) {
    MutationConfig cfg;
    cfg.operators = {"PC-LO"};
    auto r = run_mutation_analysis(m, aspects, suite, generate_mutants(aspects, m, cfg));
    for (const auto& mu : r.mutants) {
      if (mu.delta == "drop ! on within(*..DrawApplication.*)") return mu;
    }
    return Mutant{};
  };
  auto without = drop_status(named);
  auto with = drop_status(with_anon);
  bool survives = without.status == MutantStatus::kSurvived;
  bool killed = with.status == MutantStatus::kKilled;
  bool ok = jp_met == 17 && jp_total == 17 && gap_unmet && closed && survives && killed;
  std::string detail = "JP " + std::to_string(jp_met) + "/" + std::to_string(jp_total) + " without anonymous; " +
                       "[T,T,F] " + (gap_unmet ? "unmet" : "met") + " without, " + (closed ? "met" : "unmet") +
                       " with; drop-! mutant without anonymous: " + std::string(to_string(without.status)) +
                       (without.killer.empty() ? "" : " by " + without.killer + "@" + std::to_string(without.divergence)) +
                       " (want survived); with anonymous: " + std::string(to_string(with.status));
  return {ok, detail};
}

Line oracle_equivalence() {
  auto corpus = fixture::pointcut_corpus();
  std::vector<NamedPointcut> pcs;
  for (auto [n, t] : std::vector<std::pair<std::string, std::string>>{
           {"inExecuteMethod", "execution(void AbstractCommand.execute())"},
           {"inAbstractClass", "within(*..DrawApplication.*)"},
           {"outsideApplication", "!within(*..DrawApplication.*)"},
           {"commandExecute", std::string(fixture::kCommandExecute)}}) {
    NamedPointcut pc;
    pc.name = n;
    pc.expr = parse_pointcut(t);
    pcs.push_back(pc);
  }
  PointcutContext ctx;
  ctx.named = &pcs;
  auto start = Clock::now();
  int agree = 0, total = 0;
  bool sizes = true;
  for (auto name : {"contract.apm", "persistence.apm", "undo.apm"}) {
    auto m = fixture::model(name);
    auto table = compute_shadows(m);
    sizes = sizes && m.types().size() <= 50 && table.size() <= 200;
    Matcher matcher(m, table);
    for (const auto& text : corpus) {
      auto e = parse_pointcut(text);
      ++total;
      agree += matcher.static_shadows(e, ctx) == oracle::static_shadows(m, table, e, pcs);
    }
  }
  double t = seconds_since(start);
  bool ok = sizes && corpus.size() >= kMinOracleCorpus && agree == total && t < kOracleSeconds;
  return {ok, std::to_string(agree) + "/" + std::to_string(total) + " agree over 3 fixtures x " +
                  std::to_string(corpus.size()) + " pointcuts, " + fmt(t) + " s (limit " + fmt(kOracleSeconds) + ")"};
}

Line weaving_properties() {
  int violations = 0, runs = 0;
  bool reached = true;
  for (const auto& f : props::kFixtures) {
    auto s = props::run_random(f, props::kScenarios, 20240917u);
    violations += s.violations();
    runs += s.runs;
    reached = reached && s.suppress_hits > 0 && s.flow_hits > 0;
  }
  return {violations == 0 && runs == 3 * props::kScenarios && reached,
          std::to_string(runs) + " random scenarios, " + std::to_string(violations) + " violations"};
}

Line mutation_quality() {
  struct Suite {
    const char* model;
    const char* aspects;
    std::vector<std::string_view> scenarios;
    const char* manifest;
  };
  std::vector<Suite> suites = {
      {"contract.apm", "contract.apa", {"contract.scn", "contract_anonymous.scn"}, "contract.mutants.tsv"},
      {"persistence.apm", "persistence.apa", {"persistence.scn"}, "persistence.mutants.tsv"},
      {"undo.apm", "undo.apa", {"undo.scn"}, "undo.mutants.tsv"}};
  auto start = Clock::now();
  std::set<std::string> families;
  bool manifests = true;
  MutationScore total;
  for (const auto& s : suites) {
    auto m = fixture::model(s.model);
    auto a = fixture::aspects(s.aspects);
    std::vector<Scenario> scenarios;
    for (auto n : s.scenarios) {
      auto more = fixture::scenarios({n});
      scenarios.insert(scenarios.end(), more.begin(), more.end());
    }
    AnalysisOptions opts;
    opts.jobs = 4;
    auto r = run_mutation_analysis(m, a, scenarios, generate_mutants(a, m), opts);
    for (const auto& mu : r.mutants) families.insert(mu.op);
    manifests = manifests && format_mutants_tsv(r.mutants) == fixture::read(s.manifest);
    total.killed += r.score.killed;
    total.survived += r.score.survived;
    total.stillborn += r.score.stillborn;
    total.equivalent += r.score.equivalent;
  }
  double t = seconds_since(start);
  const auto& table = mutation_operators();
  bool traced = table.size() == 12 && std::all_of(table.begin(), table.end(), [](const OperatorInfo& o) {
                  return !o.fault.empty() && !o.realization.empty();
                });
  double score = total.score().value_or(0.0);
  bool ok = families.size() == 12 && manifests && score == 1.0 && traced && t < kMutationSeconds;
  return {ok, std::to_string(families.size()) + "/12 families, manifests " + (manifests ? "match" : "differ") +
                  ", killed " + std::to_string(total.killed) + " survived " + std::to_string(total.survived) +
                  " flagged " + std::to_string(total.equivalent) + " stillborn " + std::to_string(total.stillborn) +
                  ", score " + fmt(score) + ", traceability " + std::to_string(table.size()) + "/12, " + fmt(t) +
                  " s (limit " + fmt(kMutationSeconds) + ")"};
}

Line round_trip() {
  auto corpus = fixture::pointcut_corpus();
  std::size_t ok = 0;
  for (const auto& text : corpus) {
    auto e = parse_pointcut(text);
    auto printed = pretty_print(e);
    ok += parse_pointcut(printed) == e && pretty_print(parse_pointcut(printed)) == printed;
  }
  // The figure expressions open the corpus file.
  const std::vector<std::string> figures = {
      std::string(fixture::kCommandExecute),
      "within(*..DrawApplication.*)",
      "execution(void AbstractCommand.execute())",
      "this(aCommand) && inExecuteMethod() && !inAbstractClass()",
      "call(Object Clipboard.getContents()) && withincode(void PasteCommand.execute())",
      "this(cmd) && execution(void PasteCommand.execute())",
      "call(* Class+.*)"};
  std::size_t present = 0;
  for (const auto& f : figures) present += std::count(corpus.begin(), corpus.end(), f) > 0;
  bool pass = corpus.size() >= kMinRoundTripCorpus && ok == corpus.size() && present == kFigureExpressions;
  return {pass, std::to_string(ok) + "/" + std::to_string(corpus.size()) + " round-trip, figure expressions " +
                    std::to_string(present) + "/" + std::to_string(kFigureExpressions)};
}

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

Line polymorphic() {
  auto rt = Runtime::build(fixture::model("persistence.apm"), fixture::aspects("persistence.apa"));
  const auto& m = rt->model();
  auto obs = gen_polymorphic_obligations(*rt);
  std::set<std::string> rc, tm;
  std::set<int> sites;
  for (const auto& o : obs) {
    sites.insert(o.shadow);
    (o.kind == ObligationKind::kAllReceiverClasses ? rc : tm).insert(o.type);
  }
  std::set<std::string> brute;
  for (int id : sites) {
    const Shadow& call = rt->shadows().at(id);
    for (const auto& t : m.types()) {
      if (t.is_interface() || is_abstract_type(m, t.name)) continue;
      auto up = oracle::supertypes(m, t.name);
      if (t.name != call.declaring_type && up.count(call.declaring_type) == 0) continue;
      auto target = dispatch_by_hand(m, t.name, call.method, call.arity);
      if (!target.empty()) brute.insert(target);
    }
  }
  std::size_t tm_count = 0;
  for (const auto& o : obs) tm_count += o.kind == ObligationKind::kAllTargetMethods;
  bool ok = rc.size() == 3 && sites.size() == 1 && tm == brute && tm_count == brute.size();
  return {ok, "AllReceiverClasses " + std::to_string(rc.size()) + "/3, AllTargetMethods " + std::to_string(tm_count) +
                  " vs brute-force " + std::to_string(brute.size()) + ", call sites " + std::to_string(sites.size())};
}

std::map<std::string, std::string> data_files(const fs::path& dir) {
  std::map<std::string, std::string> out;
  if (!fs::exists(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().filename() == "run-metadata.json") continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[e.path().filename().string()] = ss.str();
  }
  return out;
}

Line determinism() {
  struct Input {
    const char* model;
    const char* aspects;
    std::vector<const char*> scenarios;
  };
  std::vector<Input> inputs = {{"contract.apm", "contract.apa", {"contract.scn", "contract_anonymous.scn"}},
                               {"persistence.apm", "persistence.apa", {"persistence.scn"}},
                               {"undo.apm", "undo.apa", {"undo.scn"}}};
  auto root = fs::temp_directory_path() / "aspectlab_acceptance";
  int same = 0, total = 0;
  for (const auto& in : inputs) {
    for (std::string cmd : {"check", "shadows", "obligations", "coverage", "mutate"}) {
      std::vector<std::string> args = {cmd, "--model", fixture::path(in.model), "--aspects", fixture::path(in.aspects),
                                       "--jobs", "4"};
      for (auto s : in.scenarios) args.insert(args.end(), {"--scenarios", fixture::path(s)});
      std::string outs[2];
      std::map<std::string, std::string> files[2];
      for (int k = 0; k < 2; ++k) {
        auto dir = root / (std::string(in.model) + "_" + cmd + "_" + std::to_string(k));
        fs::remove_all(dir);
        auto a = args;
        a.insert(a.end(), {"--out", dir.string()});
        std::ostringstream out, err;
        run_cli(a, out, err);
        outs[k] = out.str();
        files[k] = data_files(dir);
      }
      ++total;
      same += outs[0] == outs[1] && files[0] == files[1];
    }
  }
  fs::remove_all(root);
  return {same == total, std::to_string(same) + "/" + std::to_string(total) + " command runs byte-identical"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Line()>>> criteria = {
      {"contract fixture fidelity", shadows_17},
      {"obligation counts", obligation_counts},
      {"coverage gap", coverage_gap},
      {"matcher oracle equivalence", oracle_equivalence},
      {"weaving-order properties", weaving_properties},
      {"mutation suite quality", mutation_quality},
      {"parser round-trip", round_trip},
      {"polymorphic obligations", polymorphic},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Line l;
    try {
      l = criteria[i].second();
    } catch (const std::exception& e) {
      l = {false, std::string("exception: ") + e.what()};
    }
    failed += !l.pass;
    std::cout << (l.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": " << l.detail
              << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
