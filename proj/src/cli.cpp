#include "aspectlab/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "aspectlab/adequacy.hpp"
#include "aspectlab/aspect.hpp"
#include "aspectlab/interpreter.hpp"
#include "aspectlab/log_io.hpp"
#include "aspectlab/model.hpp"
#include "aspectlab/mutation.hpp"
#include "aspectlab/trace.hpp"

namespace aspectlab {

namespace fs = std::filesystem;

namespace {

struct RunConfig {
  std::string model_path;
  std::vector<std::string> aspect_paths;
  std::vector<std::string> scenario_paths;
  std::string stub_model_path;
  std::string mode = "each";
  double min_coverage = 1.0;
  double min_score = 0.0;
  std::vector<std::string> operators;
  std::string oracle = "baseline";
  std::string out_dir;
  std::string logs_path;
  std::string baseline_path;
  std::string log_path;
  std::string pointcut;
  std::vector<std::string> params;
  int jobs = 1;
};

struct Inputs {
  ProgramModel model;
  std::vector<AspectDef> aspects;
  std::vector<Scenario> scenarios;
  std::optional<ProgramModel> stub;
  Diagnostics warnings;
  std::vector<std::string> warning_files;
};

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bool color_enabled() {
  const char* v = std::getenv("ASPECTLAB_COLOR");
  return v != nullptr && std::string(v) == "1";
}

std::string severity_tag(Severity s) {
  bool color = color_enabled();
  if (s == Severity::kError) return color ? "\033[31merror\033[0m" : "error";
  return color ? "\033[33mwarning\033[0m" : "warning";
}

std::string located(const std::string& file, int line) {
  return line > 0 ? file + ":" + std::to_string(line) : file;
}

void print_diag(std::ostream& err, const std::string& file, const Diagnostic& d) {
  err << located(file, d.line) << ": " << severity_tag(d.severity) << ": " << d.code << ": " << d.message << "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << text;
}

// Runs `load` and rethrows any Error as a located InputError.
template <typename Fn>
auto load_or_fail(const std::string& file, Fn&& load) {
  try {
    return load(read_file(file));
  } catch (const Error& e) {
    std::string where = located(file, e.line());
    if (e.position() >= 0) where += ":" + std::to_string(e.position() + 1);
    throw InputError(where + ": " + severity_tag(Severity::kError) + ": " + std::string(to_string(e.code())) + ": " +
                     e.detail());
  }
}

Inputs load_inputs(const RunConfig& cfg) {
  Inputs in;
  in.model = load_or_fail(cfg.model_path, [](const std::string& t) { return load_model(t); });
  for (const auto& p : cfg.aspect_paths) {
    AspectLoad load = load_or_fail(p, [](const std::string& t) { return load_aspects(t); });
    for (auto& a : load.aspects) in.aspects.push_back(std::move(a));
    for (auto& d : load.diagnostics) {
      in.warnings.push_back(d);
      in.warning_files.push_back(p);
    }
  }
  for (const auto& p : cfg.scenario_paths) {
    auto scs = load_or_fail(p, [](const std::string& t) { return load_scenarios(t); });
    in.scenarios.insert(in.scenarios.end(), scs.begin(), scs.end());
  }
  if (!cfg.stub_model_path.empty()) {
    in.stub = load_or_fail(cfg.stub_model_path, [](const std::string& t) { return load_model(t); });
  }
  return in;
}

std::unique_ptr<Runtime> build_runtime(const ProgramModel& model, const std::vector<AspectDef>& aspects) {
  try {
    return Runtime::build(model, aspects);
  } catch (const Error& e) {
    throw InputError("weave: " + severity_tag(Severity::kError) + ": " + std::string(to_string(e.code())) + ": " +
                     e.detail());
  }
}

std::vector<RunLog> run_all(const Runtime& rt, const std::vector<Scenario>& scenarios, int jobs) {
  std::vector<RunLog> logs(scenarios.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < scenarios.size(); i = next++) logs[i] = rt.execute(scenarios[i]);
  };
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return logs;
}

std::string iso_now() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

void write_metadata(const RunConfig& cfg, const std::string& command) {
  if (cfg.out_dir.empty()) return;
  nlohmann::json meta = {{"command", command},
                         {"timestamp", iso_now()},
                         {"model", cfg.model_path},
                         {"aspects", cfg.aspect_paths},
                         {"scenarios", cfg.scenario_paths}};
  write_file(fs::path(cfg.out_dir) / "run-metadata.json", meta.dump(2) + "\n");
}

void ensure_out_dir(const RunConfig& cfg) {
  if (!cfg.out_dir.empty()) fs::create_directories(cfg.out_dir);
}

ConditionMode parse_mode(const std::string& mode) {
  return mode == "exhaustive" ? ConditionMode::kExhaustive : ConditionMode::kEachCondition;
}

int cmd_check(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Inputs in = load_inputs(cfg);
  for (std::size_t i = 0; i < in.warnings.size(); ++i) print_diag(err, in.warning_files[i], in.warnings[i]);
  auto rt = build_runtime(in.model, in.aspects);
  int errors = 0;
  for (const auto& sc : in.scenarios) {
    for (const auto& step : sc.steps) {
      if (step.kind == ScenarioStep::Kind::kNew && !rt->model().resolve(step.name)) {
        err << "scenario " << sc.name << ":" << step.line << ": " << severity_tag(Severity::kError)
            << ": UnknownType: class '" << step.name << "' is not in the model\n";
        ++errors;
      }
    }
  }
  if (errors > 0) return kExitInput;
  std::ostringstream report;
  report << "ok: " << rt->model().types().size() << " types, " << in.aspects.size() << " aspects, "
         << in.scenarios.size() << " scenarios, " << rt->shadows().size() << " shadows\n";
  out << report.str();
  if (!cfg.out_dir.empty()) {
    ensure_out_dir(cfg);
    write_file(fs::path(cfg.out_dir) / "check.txt", report.str());
    write_metadata(cfg, "check");
  }
  return kExitOk;
}

int cmd_shadows(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  Inputs in = load_inputs(cfg);
  auto rt = build_runtime(in.model, in.aspects);
  std::optional<std::set<int>> selected;
  if (!cfg.pointcut.empty()) {
    PointcutExpr expr;
    try {
      expr = parse_pointcut(cfg.pointcut);
    } catch (const Error& e) {
      throw InputError("--pointcut:" + std::to_string(e.position() + 1) + ": " + severity_tag(Severity::kError) +
                       ": SyntaxError: " + e.detail());
    }
    PointcutContext ctx;
    ctx.label = "pointcut";
    for (const auto& p : cfg.params) {
      std::istringstream ss(p);
      PointcutParam param;
      if (!(ss >> param.type >> param.name)) throw InputError("--param expects '<Type> <name>', got '" + p + "'");
      ctx.params.push_back(param);
    }
    try {
      selected = rt->matcher().static_shadows(expr, ctx);
    } catch (const Error& e) {
      throw InputError("--pointcut: " + severity_tag(Severity::kError) + ": " + std::string(to_string(e.code())) +
                       ": " + e.detail());
    }
  }
  std::ostringstream table;
  for (const auto& s : rt->shadows().all()) {
    if (selected && !selected->count(s.id)) continue;
    table << s.id << "\t" << to_string(s.kind) << "\t" << s.signature() << "\t" << s.site() << "\n";
  }
  out << table.str();
  if (!cfg.out_dir.empty()) {
    ensure_out_dir(cfg);
    write_file(fs::path(cfg.out_dir) / "shadows.tsv", table.str());
    write_metadata(cfg, "shadows");
  }
  return kExitOk;
}

int cmd_run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Inputs in = load_inputs(cfg);
  auto rt = build_runtime(in.model, in.aspects);
  if (in.scenarios.empty()) {
    err << severity_tag(Severity::kWarning) << ": NoScenarios: nothing to run\n";
    return kExitOk;
  }
  auto logs = run_all(*rt, in.scenarios, cfg.jobs);
  ensure_out_dir(cfg);
  int failed = 0;
  for (std::size_t i = 0; i < logs.size(); ++i) {
    const auto& sc = in.scenarios[i];
    if (!cfg.out_dir.empty()) write_file(fs::path(cfg.out_dir) / (sc.name + ".trace"), dump_trace(logs[i].trace));
    if (logs[i].error) {
      out << "ERROR\t" << sc.name << "\t" << *logs[i].error << "\n";
    }
    if (!sc.expected) {
      out << "RAN\t" << sc.name << "\t" << logs[i].trace.size() << " events\n";
      continue;
    }
    auto cmp = compare_traces(logs[i].trace, *sc.expected);
    if (cmp.pass) {
      out << "PASS\t" << sc.name << "\n";
    } else {
      ++failed;
      out << "FAIL\t" << sc.name << "\tdivergence at event " << cmp.divergence << ": expected '" << cmp.expected
          << "', got '" << cmp.actual << "'\n";
    }
  }
  if (!cfg.out_dir.empty()) {
    write_file(fs::path(cfg.out_dir) / "runs.jsonl", run_logs_to_jsonl(logs));
    write_metadata(cfg, "run");
  }
  return failed == 0 ? kExitOk : kExitAnalysis;
}

// Obligations are generated against the stub model when one is given.
struct ObligationRun {
  std::unique_ptr<Runtime> runtime;
  ObligationSet set;
};

ObligationRun obligations_for(const RunConfig& cfg, const Inputs& in) {
  ObligationRun r;
  r.runtime = build_runtime(in.stub ? *in.stub : in.model, in.aspects);
  ObligationConfig oc;
  oc.mode = parse_mode(cfg.mode);
  r.set = generate_obligations(*r.runtime, oc);
  return r;
}

void print_obligation_diags(const ObligationSet& set, std::ostream& err) {
  for (const auto& d : set.diagnostics) print_diag(err, "obligations", d);
}

bool has_errors(const Diagnostics& ds) {
  return std::any_of(ds.begin(), ds.end(), [](const Diagnostic& d) { return d.severity == Severity::kError; });
}

std::vector<RunLog> logs_for(const RunConfig& cfg, const Inputs& in, const Runtime& rt) {
  if (!cfg.logs_path.empty()) {
    return load_or_fail(cfg.logs_path, [](const std::string& t) { return run_logs_from_jsonl(t); });
  }
  return run_all(rt, in.scenarios, cfg.jobs);
}

int cmd_obligations(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Inputs in = load_inputs(cfg);
  auto r = obligations_for(cfg, in);
  print_obligation_diags(r.set, err);
  if (has_errors(r.set.diagnostics)) return kExitInput;
  if (!cfg.logs_path.empty()) {
    auto logs = logs_for(cfg, in, *r.runtime);
    check_coverage(r.set.obligations, logs, r.runtime->hash());
  }
  std::string text;
  for (const auto& o : r.set.obligations) text += format_obligation(o) + "\n";
  out << text;
  if (!cfg.out_dir.empty()) {
    ensure_out_dir(cfg);
    write_file(fs::path(cfg.out_dir) / "obligations.tsv", text);
    write_metadata(cfg, "obligations");
  }
  return kExitOk;
}

int cmd_coverage(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Inputs in = load_inputs(cfg);
  auto r = obligations_for(cfg, in);
  print_obligation_diags(r.set, err);
  if (has_errors(r.set.diagnostics)) return kExitInput;
  auto logs = logs_for(cfg, in, *r.runtime);
  CoverageReport report = check_coverage(r.set.obligations, logs, r.runtime->hash());
  for (const auto& w : report.warnings) err << severity_tag(Severity::kWarning) << ": " << w << "\n";
  std::string text = format_report(report, r.set.obligations);
  out << text;
  if (!cfg.out_dir.empty()) {
    ensure_out_dir(cfg);
    write_file(fs::path(cfg.out_dir) / "coverage.txt", text);
    write_metadata(cfg, "coverage");
  }
  return report.overall() + 1e-12 >= cfg.min_coverage ? kExitOk : kExitAnalysis;
}

int cmd_mutate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Inputs in = load_inputs(cfg);
  build_runtime(in.model, in.aspects);
  MutationConfig mc;
  for (const auto& op : cfg.operators) {
    if (!is_operator_id(op)) throw InputError("--operators: unknown operator '" + op + "'");
    mc.operators.insert(op);
  }
  auto mutants = generate_mutants(in.aspects, in.model, mc);
  std::optional<std::vector<RunLog>> recorded;
  if (!cfg.baseline_path.empty()) {
    recorded = load_or_fail(cfg.baseline_path, [](const std::string& t) { return run_logs_from_jsonl(t); });
  }
  AnalysisOptions opts;
  opts.oracle = cfg.oracle == "expected" ? OracleMode::kExpected : OracleMode::kBaseline;
  opts.jobs = cfg.jobs;
  AnalysisResult result =
      run_mutation_analysis(in.model, in.aspects, in.scenarios, std::move(mutants), opts,
                            recorded ? &*recorded : nullptr);
  std::string tsv = format_mutants_tsv(result.mutants);
  const auto& s = result.score;
  std::ostringstream summary;
  summary << "# killed " << s.killed << ", survived " << s.survived << ", stillborn " << s.stillborn
          << ", flagged-equivalent " << s.equivalent << ", score ";
  if (auto sc = s.score()) {
    summary << std::fixed << std::setprecision(4) << *sc;
  } else {
    summary << "n/a";
  }
  summary << "\n";
  if (cfg.out_dir.empty()) {
    out << tsv;
  } else {
    ensure_out_dir(cfg);
    write_file(fs::path(cfg.out_dir) / "mutants.tsv", tsv);
    write_metadata(cfg, "mutate");
  }
  out << summary.str();
  if (!cfg.log_path.empty()) {
    std::string jsonl;
    for (const auto& m : result.mutants) {
      nlohmann::json j = {{"id", m.id},           {"operator", m.op},   {"location", m.location},
                          {"delta", m.delta},     {"status", std::string(to_string(m.status))},
                          {"killer", m.killer},   {"divergence", m.divergence}, {"reason", m.reason}};
      jsonl += j.dump() + "\n";
    }
    write_file(cfg.log_path, jsonl);
  }
  (void)err;
  double score = s.score().value_or(1.0);
  return score + 1e-12 >= cfg.min_score ? kExitOk : kExitAnalysis;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Aspect-oriented program analysis: matching, weaving, adequacy and mutation", "aspectlab"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_inputs = [&](CLI::App* sub, bool need_scenarios) {
    sub->add_option("--model", cfg.model_path, "Program model (.apm)")->required()->check(CLI::ExistingFile);
    sub->add_option("--aspects", cfg.aspect_paths, "Aspect files (.apa)")->check(CLI::ExistingFile);
    auto* sc = sub->add_option("--scenarios", cfg.scenario_paths, "Scenario files (.scn)")->check(CLI::ExistingFile);
    if (need_scenarios) sc->required();
    sub->add_option("--jobs", cfg.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", cfg.out_dir, "Output directory");
  };

  auto* check = app.add_subcommand("check", "Load and cross-validate all inputs");
  add_inputs(check, false);

  auto* shadows = app.add_subcommand("shadows", "List join point shadows of the woven program");
  add_inputs(shadows, false);
  shadows->add_option("--pointcut", cfg.pointcut, "Only shadows this pointcut may match");
  shadows->add_option("--param", cfg.params, "Pointcut variable as '<Type> <name>'");

  auto* run = app.add_subcommand("run", "Execute scenarios and compare expected traces");
  add_inputs(run, false);

  auto* obligations = app.add_subcommand("obligations", "List test obligations");
  add_inputs(obligations, false);
  obligations->add_option("--mode", cfg.mode, "Condition mode")->check(CLI::IsMember({"each", "exhaustive"}));
  obligations->add_option("--logs", cfg.logs_path, "Recorded runs (JSONL) used to mark obligations met")
      ->check(CLI::ExistingFile);
  obligations->add_option("--stub-model", cfg.stub_model_path, "Stub application for abstract aspects")
      ->check(CLI::ExistingFile);

  auto* coverage = app.add_subcommand("coverage", "Report obligation coverage of a scenario suite");
  add_inputs(coverage, false);
  coverage->add_option("--mode", cfg.mode, "Condition mode")->check(CLI::IsMember({"each", "exhaustive"}));
  coverage->add_option("--logs", cfg.logs_path, "Recorded runs (JSONL); scenarios run inline otherwise")
      ->check(CLI::ExistingFile);
  coverage->add_option("--min-coverage", cfg.min_coverage, "Required overall fraction")->check(CLI::Range(0.0, 1.0));
  coverage->add_option("--stub-model", cfg.stub_model_path, "Stub application for abstract aspects")
      ->check(CLI::ExistingFile);

  auto* mutate = app.add_subcommand("mutate", "Mutation analysis of the aspects");
  add_inputs(mutate, true);
  mutate->add_option("--operators", cfg.operators, "Operator ids (default: all)")->delimiter(',');
  mutate->add_option("--oracle", cfg.oracle, "Kill oracle")->check(CLI::IsMember({"baseline", "expected"}));
  mutate->add_option("--baseline", cfg.baseline_path, "Recorded baseline runs (JSONL)")->check(CLI::ExistingFile);
  mutate->add_option("--min-score", cfg.min_score, "Required mutation score")->check(CLI::Range(0.0, 1.0));
  mutate->add_option("--log", cfg.log_path, "Per-mutant JSONL log");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << severity_tag(Severity::kError) << ": " << e.what() << "\n";
    return kExitInput;
  }

  try {
    if (check->parsed()) return cmd_check(cfg, out, err);
    if (shadows->parsed()) return cmd_shadows(cfg, out, err);
    if (run->parsed()) return cmd_run(cfg, out, err);
    if (obligations->parsed()) return cmd_obligations(cfg, out, err);
    if (coverage->parsed()) return cmd_coverage(cfg, out, err);
    if (mutate->parsed()) return cmd_mutate(cfg, out, err);
  } catch (const InputError& e) {
    err << e.what() << "\n";
    return kExitInput;
  } catch (const Error& e) {
    err << severity_tag(Severity::kError) << ": " << to_string(e.code()) << ": " << e.detail() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace aspectlab
