#pragma once

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "aspectlab/aspect.hpp"
#include "aspectlab/model.hpp"
#include "aspectlab/trace.hpp"

namespace fixture {

inline std::string path(std::string_view name) { return std::string(ASPECTLAB_FIXTURE_DIR) + "/" + std::string(name); }

inline std::string read(std::string_view name) {
  std::ifstream in(path(name), std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline aspectlab::ProgramModel model(std::string_view name) { return aspectlab::load_model(read(name)); }

inline std::vector<aspectlab::AspectDef> aspects(std::string_view name) {
  return aspectlab::load_aspects(read(name)).aspects;
}

inline std::vector<aspectlab::Scenario> scenarios(std::initializer_list<std::string_view> names) {
  std::vector<aspectlab::Scenario> out;
  for (auto n : names) {
    auto more = aspectlab::load_scenarios(read(n));
    out.insert(out.end(), more.begin(), more.end());
  }
  return out;
}

// The pointcut from the contract-enforcement figure, as the fixture writes it.
inline constexpr std::string_view kCommandExecute =
    "this(aCommand) && execution(void AbstractCommand.execute()) && !within(*..DrawApplication.*)";

inline constexpr std::string_view kPackage = "CH.ifa.draw.";

inline std::string q(std::string_view simple) { return std::string(kPackage) + std::string(simple); }

// Every pointcut in the round-trip corpus, one per non-comment line.
inline std::vector<std::string> pointcut_corpus() {
  std::vector<std::string> out;
  std::istringstream in(read("pointcuts.txt"));
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    out.push_back(line);
  }
  return out;
}

}  // namespace fixture
