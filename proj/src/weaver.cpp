#include <algorithm>

#include "aspectlab/aspect.hpp"
#include "stmt_parser.hpp"

namespace aspectlab {

namespace {

std::string resolve_or_throw(const ProgramModel& model, const std::string& written, int line) {
  auto q = model.resolve(written);
  if (!q) throw Error(ErrorCode::kResolution, "unknown type '" + written + "'", line);
  return *q;
}

}  // namespace

ProgramModel weave_static(const ProgramModel& model, const std::vector<AspectDef>& aspects) {
  ProgramModel woven = model;
  for (const auto& aspect : aspects) {
    if (aspect.is_abstract) continue;
    for (const auto& dp : aspect.declare_parents) {
      std::string iface = resolve_or_throw(woven, dp.interface_name, dp.line);
      const TypeDecl* idecl = woven.find(iface);
      if (idecl == nullptr || !idecl->is_interface()) {
        throw Error(ErrorCode::kResolution, "'" + dp.interface_name + "' is not an interface", dp.line);
      }
      std::vector<std::string> targets;
      for (const auto& t : woven.types()) {
        if (t.name != iface && match_type_pattern(dp.pattern, t.name, woven).matched) targets.push_back(t.name);
      }
      for (const auto& name : targets) {
        TypeDecl* t = woven.find_mutable(name);
        if (t->extends == iface ||
            std::find(t->implements.begin(), t->implements.end(), iface) != t->implements.end()) {
          continue;
        }
        if (t->is_interface() && !t->extends) {
          t->extends = iface;
        } else {
          t->implements.push_back(iface);
        }
      }
    }
    int index = 0;
    for (const auto& intro : aspect.introductions) {
      std::string target = resolve_or_throw(woven, intro.target_type, intro.line);
      TypeDecl* t = woven.find_mutable(target);
      if (t == nullptr) {
        throw Error(ErrorCode::kResolution, "cannot introduce into built-in type '" + target + "'", intro.line);
      }
      MethodDecl m = intro.method;
      m.return_type = resolve_or_throw(woven, m.return_type, intro.line);
      for (auto& p : m.param_types) p = resolve_or_throw(woven, p, intro.line);
      detail::for_each_stmt(m.body, [&](Stmt& s) {
        if (s.kind == Stmt::Kind::kNew || s.kind == Stmt::Kind::kIfType) {
          s.type_name = resolve_or_throw(woven, s.type_name, intro.line);
        }
        if (s.kind == Stmt::Kind::kCall && s.receiver.kind == Receiver::Kind::kNew) {
          s.receiver.name = resolve_or_throw(woven, s.receiver.name, intro.line);
        }
      });
      if (const MethodDecl* existing = t->find_method(m.name, m.arity())) {
        std::string owner = existing->introduced_by ? "an introduction of aspect " + *existing->introduced_by
                                                    : "a native method";
        throw Error(ErrorCode::kIntroductionCollision,
                    "introduced " + target + "." + m.name + "/" + std::to_string(m.arity()) + " collides with " +
                        owner,
                    intro.line);
      }
      m.introduced_by = aspect.name;
      m.introduction_index = index++;
      number_branches(m.body);
      t->methods.push_back(std::move(m));
    }
  }
  validate_model(woven);
  return woven;
}

}  // namespace aspectlab
