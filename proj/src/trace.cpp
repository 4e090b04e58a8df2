#include "aspectlab/trace.hpp"

#include <algorithm>
#include <sstream>

#include "stmt_parser.hpp"

namespace aspectlab {

TraceEvent TraceEvent::enter(int shadow, std::string this_object) {
  TraceEvent e;
  e.kind = Kind::kEnter;
  e.shadow = shadow;
  e.this_object = std::move(this_object);
  return e;
}

TraceEvent TraceEvent::exit(int shadow) {
  TraceEvent e;
  e.kind = Kind::kExit;
  e.shadow = shadow;
  return e;
}

TraceEvent TraceEvent::emit(std::string label) {
  TraceEvent e;
  e.kind = Kind::kEmit;
  e.label = std::move(label);
  return e;
}

TraceEvent TraceEvent::advice_fired(std::string aspect, int index, AdviceKind kind, int shadow) {
  TraceEvent e;
  e.kind = Kind::kAdviceFired;
  e.aspect = std::move(aspect);
  e.advice_index = index;
  e.advice_kind = kind;
  e.shadow = shadow;
  return e;
}

TraceEvent TraceEvent::pointcut_fired(std::string aspect, std::string pointcut, int shadow) {
  TraceEvent e;
  e.kind = Kind::kPointcutFired;
  e.aspect = std::move(aspect);
  e.pointcut = std::move(pointcut);
  e.shadow = shadow;
  return e;
}

std::string TraceEvent::to_line() const {
  switch (kind) {
    case Kind::kEnter:
      return "Enter\t" + std::to_string(shadow) + "\t" + (this_object.empty() ? "-" : this_object);
    case Kind::kExit: return "Exit\t" + std::to_string(shadow);
    case Kind::kEmit: return "Emit\t" + label;
    case Kind::kAdviceFired:
      return "AdviceFired\t" + aspect + "\t" + std::to_string(advice_index) + "\t" +
             std::string(to_string(advice_kind)) + "\t" + std::to_string(shadow);
    case Kind::kPointcutFired: return "PointcutFired\t" + aspect + "\t" + pointcut + "\t" + std::to_string(shadow);
  }
  return {};
}

std::string dump_trace(const Trace& trace) {
  std::string out;
  for (const auto& e : trace) out += e.to_line() + "\n";
  return out;
}

namespace {

std::vector<std::string> fields_of(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

int to_int(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    int v = std::stoi(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::kSyntax, "expected a number, found '" + s + "'", line);
}

AdviceKind advice_kind_of(const std::string& s, int line) {
  for (AdviceKind k : {AdviceKind::kBefore, AdviceKind::kAfter, AdviceKind::kAfterReturning, AdviceKind::kAround}) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorCode::kSyntax, "unknown advice kind '" + s + "'", line);
}

}  // namespace

Trace parse_trace(std::string_view text) {
  Trace out;
  int n = 0;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    ++n;
    auto f = fields_of(line);
    if (f.empty()) continue;
    auto need = [&](std::size_t k) {
      if (f.size() != k) throw Error(ErrorCode::kSyntax, "malformed " + f[0] + " event", n);
    };
    if (f[0] == "Enter") {
      need(3);
      out.push_back(TraceEvent::enter(to_int(f[1], n), f[2] == "-" ? "" : f[2]));
    } else if (f[0] == "Exit") {
      need(2);
      out.push_back(TraceEvent::exit(to_int(f[1], n)));
    } else if (f[0] == "Emit") {
      need(2);
      out.push_back(TraceEvent::emit(f[1]));
    } else if (f[0] == "AdviceFired") {
      need(5);
      out.push_back(TraceEvent::advice_fired(f[1], to_int(f[2], n), advice_kind_of(f[3], n), to_int(f[4], n)));
    } else if (f[0] == "PointcutFired") {
      need(4);
      out.push_back(TraceEvent::pointcut_fired(f[1], f[2], to_int(f[3], n)));
    } else {
      throw Error(ErrorCode::kSyntax, "unknown trace event '" + f[0] + "'", n);
    }
  }
  return out;
}

TracePattern TracePattern::parse(std::string_view line) {
  TracePattern p;
  p.fields = fields_of(line);
  p.skip = p.fields.size() == 1 && p.fields[0] == "...";
  if (p.skip) p.fields.clear();
  return p;
}

std::string TracePattern::to_string() const {
  if (skip) return "...";
  std::string out;
  for (const auto& f : fields) out += (out.empty() ? "" : "\t") + f;
  return out;
}

bool TracePattern::matches(const TraceEvent& e) const {
  if (skip) return true;
  auto actual = fields_of(e.to_line());
  if (actual.size() != fields.size()) return false;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i] != "*" && fields[i] != actual[i]) return false;
  }
  return true;
}

TraceComparison compare_traces(const Trace& actual, const std::vector<TracePattern>& expected) {
  const std::size_t n = actual.size();
  const std::size_t m = expected.size();
  // reach[i][j]: the first i patterns can consume exactly the first j events.
  std::vector<std::vector<char>> reach(m + 1, std::vector<char>(n + 1, 0));
  reach[0][0] = 1;
  for (std::size_t i = 0; i <= m; ++i) {
    for (std::size_t j = 0; j <= n; ++j) {
      if (!reach[i][j] || i == m) continue;
      const TracePattern& p = expected[i];
      if (p.skip) {
        reach[i + 1][j] = 1;
        if (j < n) reach[i][j + 1] = 1;
      } else if (j < n && p.matches(actual[j])) {
        reach[i + 1][j + 1] = 1;
      }
    }
  }
  TraceComparison out;
  if (reach[m][n]) return out;
  out.pass = false;
  // Furthest event index reached, and the first pattern stuck there.
  std::size_t best_j = 0;
  std::size_t best_i = 0;
  for (std::size_t i = 0; i <= m; ++i) {
    for (std::size_t j = 0; j <= n; ++j) {
      if (reach[i][j] && (j > best_j || (j == best_j && i > best_i))) {
        best_j = j;
        best_i = i;
      }
    }
  }
  out.divergence = static_cast<int>(best_j);
  if (best_i < m) out.expected = expected[best_i].to_string();
  if (best_j < n) out.actual = actual[best_j].to_line();
  return out;
}

TraceComparison compare_exact(const Trace& actual, const Trace& expected) {
  TraceComparison out;
  std::size_t k = 0;
  while (k < actual.size() && k < expected.size() && actual[k] == expected[k]) ++k;
  if (k == actual.size() && k == expected.size()) return out;
  out.pass = false;
  out.divergence = static_cast<int>(k);
  if (k < expected.size()) out.expected = expected[k].to_line();
  if (k < actual.size()) out.actual = actual[k].to_line();
  return out;
}

std::vector<Scenario> load_scenarios(std::string_view text) {
  std::vector<Scenario> out;
  std::istringstream in{std::string(text)};
  int n = 0;
  bool in_expect = false;
  auto syntax = [&](const std::string& msg) { throw Error(ErrorCode::kSyntax, msg, n); };
  for (std::string raw; std::getline(in, raw);) {
    ++n;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::string line = detail::strip_comment(raw);
    std::string_view body = detail::trim(line);
    if (body.empty()) continue;
    int indent = detail::indent_of(line);
    if (indent == 0) {
      auto w = fields_of(body);
      if (w.size() != 2 || w[0] != "scenario") syntax("expected 'scenario <name>'");
      for (const auto& s : out) {
        if (s.name == w[1]) syntax("duplicate scenario '" + w[1] + "'");
      }
      out.push_back(Scenario{w[1], {}, std::nullopt, n});
      in_expect = false;
      continue;
    }
    if (out.empty()) syntax("step outside of a scenario");
    Scenario& sc = out.back();
    if (in_expect && indent > 2) {
      sc.expected->push_back(TracePattern::parse(body));
      continue;
    }
    in_expect = false;
    if (body == "expect:") {
      if (sc.expected) syntax("duplicate expect block");
      sc.expected.emplace();
      in_expect = true;
      continue;
    }
    auto w = fields_of(body);
    ScenarioStep step;
    step.line = n;
    if (w[0] == "new") {
      if (w.size() != 3) syntax("expected 'new <var> <Class>'");
      step.kind = ScenarioStep::Kind::kNew;
      step.variable = w[1];
      step.name = w[2];
    } else if (w[0] == "invoke") {
      std::string call;
      for (std::size_t i = 1; i < w.size(); ++i) call += w[i];
      auto dot = call.find('.');
      auto open = call.find('(');
      if (dot == std::string::npos || open == std::string::npos || open < dot || call.back() != ')') {
        syntax("expected 'invoke <var>.<method>()'");
      }
      step.kind = ScenarioStep::Kind::kInvoke;
      step.variable = call.substr(0, dot);
      step.name = call.substr(dot + 1, open - dot - 1);
      std::string args = call.substr(open + 1, call.size() - open - 2);
      if (!args.empty()) {
        try {
          step.arity = std::stoi(args);
        } catch (const std::exception&) {
          syntax("expected an argument count, found '" + args + "'");
        }
      }
      bool bound = std::any_of(sc.steps.begin(), sc.steps.end(), [&](const ScenarioStep& s) {
        return s.kind == ScenarioStep::Kind::kNew && s.variable == step.variable;
      });
      if (!bound) syntax("variable '" + step.variable + "' is not bound by an earlier 'new'");
    } else {
      syntax("unknown scenario step '" + w[0] + "'");
    }
    sc.steps.push_back(std::move(step));
  }
  return out;
}

std::string dump_scenarios(const std::vector<Scenario>& scenarios) {
  std::string out;
  for (const auto& sc : scenarios) {
    out += "scenario " + sc.name + "\n";
    for (const auto& s : sc.steps) {
      if (s.kind == ScenarioStep::Kind::kNew) {
        out += "  new " + s.variable + " " + s.name + "\n";
      } else {
        out += "  invoke " + s.variable + "." + s.name + "(" + (s.arity ? std::to_string(*s.arity) : "") + ")\n";
      }
    }
    if (sc.expected) {
      out += "  expect:\n";
      for (const auto& p : *sc.expected) out += "    " + p.to_string() + "\n";
    }
  }
  return out;
}

}  // namespace aspectlab
