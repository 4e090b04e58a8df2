#include "aspectlab/log_io.hpp"

#include <json.hpp>
#include <sstream>

namespace aspectlab {

using nlohmann::json;

namespace {

json outcome_json(const MatchOutcome& o) {
  json w = json::array();
  for (const auto& x : o.witnesses) w.push_back({x.owner, x.occurrence, std::string(to_string(x.state))});
  json p = json::array();
  for (const auto& x : o.probes) p.push_back({x.owner, x.pattern, x.subject_type, x.matched});
  json b = json::object();
  for (const auto& [k, v] : o.bindings) b[k] = v.to_string();
  return {{"matched", o.matched}, {"vector", o.condition_vector}, {"witnesses", w}, {"probes", p}, {"bindings", b}};
}

Witness witness_of(const std::string& s) {
  if (s == "empty") return Witness::kEmpty;
  if (s == "nonempty") return Witness::kNonEmpty;
  return Witness::kNoMatch;
}

RuntimeObject object_of(const std::string& s) {
  auto hash = s.rfind('#');
  if (hash == std::string::npos) return RuntimeObject{s, 0};
  return RuntimeObject{s.substr(0, hash), std::stoi(s.substr(hash + 1))};
}

MatchOutcome outcome_of(const json& j) {
  MatchOutcome o;
  o.matched = j.at("matched").get<bool>();
  o.condition_vector = j.at("vector").get<std::vector<bool>>();
  for (const auto& w : j.at("witnesses")) {
    o.witnesses.push_back({w.at(0).get<std::string>(), w.at(1).get<int>(), witness_of(w.at(2).get<std::string>())});
  }
  for (const auto& p : j.at("probes")) {
    o.probes.push_back(
        {p.at(0).get<std::string>(), p.at(1).get<int>(), p.at(2).get<std::string>(), p.at(3).get<bool>()});
  }
  for (const auto& [k, v] : j.at("bindings").items()) o.bindings[k] = object_of(v.get<std::string>());
  return o;
}

}  // namespace

std::string run_logs_to_jsonl(const std::vector<RunLog>& logs) {
  std::string out;
  for (const auto& log : logs) {
    json evals = json::array();
    for (const auto& e : log.evaluations) {
      evals.push_back({{"label", e.label}, {"shadow", e.shadow}, {"event", e.event_index}, {"outcome", outcome_json(e.outcome)}});
    }
    json disp = json::array();
    for (const auto& d : log.dispatches) disp.push_back({d.shadow, d.receiver_class, d.target, d.event_index});
    json br = json::array();
    for (const auto& b : log.branches) br.push_back({b.owner, b.ordinal, b.then_branch, b.event_index});
    json j = {{"scenario", log.scenario},
              {"model_hash", log.model_hash},
              {"trace", dump_trace(log.trace)},
              {"evaluations", evals},
              {"dispatches", disp},
              {"branches", br}};
    if (log.error) j["error"] = *log.error;
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<RunLog> run_logs_from_jsonl(std::string_view text) {
  std::vector<RunLog> out;
  std::istringstream in{std::string(text)};
  int n = 0;
  for (std::string line; std::getline(in, line);) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      json j = json::parse(line);
      RunLog log;
      log.scenario = j.at("scenario").get<std::string>();
      log.model_hash = j.at("model_hash").get<std::string>();
      log.trace = parse_trace(j.at("trace").get<std::string>());
      for (const auto& e : j.at("evaluations")) {
        log.evaluations.push_back({e.at("label").get<std::string>(), e.at("shadow").get<int>(),
                                   e.at("event").get<int>(), outcome_of(e.at("outcome"))});
      }
      for (const auto& d : j.at("dispatches")) {
        log.dispatches.push_back(
            {d.at(0).get<int>(), d.at(1).get<std::string>(), d.at(2).get<std::string>(), d.at(3).get<int>()});
      }
      for (const auto& b : j.at("branches")) {
        log.branches.push_back({b.at(0).get<std::string>(), b.at(1).get<int>(), b.at(2).get<bool>(), b.at(3).get<int>()});
      }
      if (j.contains("error")) log.error = j.at("error").get<std::string>();
      out.push_back(std::move(log));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kSyntax, std::string("malformed log: ") + e.what(), n);
    }
  }
  return out;
}

}  // namespace aspectlab
