#include <doctest.h>

#include "weaving_props.hpp"

using namespace aspectlab;

TEST_CASE("weaving-order properties over random scenarios") {
  for (const auto& f : props::kFixtures) {
    CAPTURE(f.model);
    auto s = props::run_random(f, props::kScenarios, 20240917u);
    CHECK(s.runs == props::kScenarios);
    CHECK(s.bad.before == 0);
    CHECK(s.bad.after == 0);
    CHECK(s.bad.around == 0);
    CHECK(s.bad.cflow == 0);
    CHECK(s.bad.balance == 0);
    // The generators must actually reach the advice under test.
    CHECK(s.suppress_hits > 0);
    CHECK(s.flow_hits > 0);
  }
}

TEST_CASE("precedence is reproducible") {
  auto rt = Runtime::build(fixture::model("undo.apm"), fixture::aspects("undo.apa"));
  for (const auto& sc : fixture::scenarios({"undo.scn"})) {
    auto a = rt->execute(sc);
    auto b = rt->execute(sc);
    CHECK(dump_trace(a.trace) == dump_trace(b.trace));
  }
  auto order = rt->advice_order();
  REQUIRE(order.size() == 3);
  CHECK(rt->aspects()[order[0].aspect].name == "UndoSupport");
}
