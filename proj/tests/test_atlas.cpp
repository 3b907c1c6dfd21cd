#include <gtest/gtest.h>

#include "superstar/models.hpp"

using namespace superstar;

namespace {

GradedPoly P(const ModelSpec& m, const std::string& text) { return parse_expression(text, m.table); }
VarRef V(const ModelSpec& m, const std::string& name) { return m.table.ref(name); }

TEST(BracketTableTest, StoresOneOrientation) {
  VariableTable t;
  const VarRef a = t.add("a", Parity::odd), b = t.add("b", Parity::odd);
  const VarRef x = t.add("x", Parity::even), y = t.add("y", Parity::even);
  BracketTable tab;
  tab.set(a, b, GradedPoly::var(x));
  tab.set(y, x, GradedPoly(2));
  EXPECT_EQ(tab.at(b, a), GradedPoly::var(x));  // odd pair: symmetric
  EXPECT_EQ(tab.at(x, y), GradedPoly(-2));      // even pair: antisymmetric
  BracketTable other;
  other.set(b, a, GradedPoly::var(x));
  other.set(x, y, GradedPoly(-2));
  EXPECT_EQ(tab, other);
  other.set(x, y, GradedPoly(2));
  EXPECT_FALSE(tab == other);
  EXPECT_THROW(tab.set(a, x, GradedPoly::var(a) + 1), MixedParityInput);
}

// Transporting the U+ table through lm = 1/lp, w- = w+/lp, xi- = xi+/lp
// reproduces the U- table with symbolic constants.
TEST(Gluing, TransportBetweenHemispheres) {
  const ModelSpec m = builtin("P3|4");
  for (const auto& [from, to] : {std::pair{"Uplus", "Uminus"}, std::pair{"Uminus", "Uplus"}}) {
    const Chart& a = m.atlas.chart(from);
    const Chart& b = m.atlas.chart(to);
    const TransitionMap& t = m.atlas.transition(from, to);
    EXPECT_EQ(transport_table(t, a.table, a.variables, b.variables, m.table), b.table) << from;
  }
  // Spot values typed from the gluing formulas.
  const Chart& minus = m.atlas.chart("Uminus");
  EXPECT_EQ(minus.table.at(V(m, "xm1"), V(m, "xm2")), P(m, "C12_11*lm^2 + 2*C12_12*lm + C12_22"));
  EXPECT_EQ(minus.table.at(V(m, "wm1"), V(m, "wm2")), P(m, "D11_21*lm^2 + (D11_22 + D12_21)*lm + D12_22"));
}

TEST(Gluing, WeightLawFactorIsLambdaMinusTwo) {
  const ModelSpec m = builtin("P3|4");
  const Chart& plus = m.atlas.chart("Uplus");
  const Chart& minus = m.atlas.chart("Uminus");
  const TransitionMap& t = m.atlas.transition("Uplus", "Uminus");
  WeightLaw law{"Uplus", "Uminus", V(m, "xp1"), V(m, "xp3"), V(m, "xm1"), V(m, "xm3"), P(m, "lp^-2")};
  EXPECT_TRUE(check_weight_law(plus, minus, t, law, m.table));
  for (const char* wrong : {"lp^-1", "lp^-3", "lp^2", "1"}) {
    law.factor = P(m, wrong);
    EXPECT_FALSE(check_weight_law(plus, minus, t, law, m.table)) << wrong;
  }
  law.to_a = V(m, "xp1");
  EXPECT_THROW(check_weight_law(plus, minus, t, law, m.table), UnresolvedPair);
}

TEST(Gluing, TransitionScale) {
  const ModelSpec m = builtin("P3|4");
  const TransitionMap& t = m.atlas.transition("Uplus", "Uminus");
  EXPECT_EQ(*transition_scale(t, V(m, "xp2"), V(m, "xm2")), P(m, "lp^-1"));
  EXPECT_FALSE(transition_scale(t, V(m, "lp"), V(m, "lm")).has_value());
}

TEST(Gluing, CocyclesOnProjectiveCharts) {
  const ModelSpec m = builtin("P3|N");
  ASSERT_EQ(m.atlas.cycles.size(), 8u);
  for (const auto& c : m.atlas.cycles) EXPECT_TRUE(check_cocycle(cycle_maps(m.atlas, c), m.atlas, m.table));
  // Two-chart round trips are cycles as well.
  EXPECT_TRUE(check_cocycle(cycle_maps(m.atlas, {"U1", "U4"}), m.atlas, m.table));
}

TEST(Gluing, BrokenTransitionBreaksCocycle) {
  ModelSpec m = builtin("P3|N");
  for (auto& t : m.atlas.transitions)
    if (t.from == "U1" && t.to == "U2")
      for (auto& [v, r] : t.rules)
        if (m.table.name(v.index) == "xi2_1") r = r * Rational(-1);
  EXPECT_FALSE(check_cocycle(cycle_maps(m.atlas, {"U1", "U2", "U3"}), m.atlas, m.table));
  EXPECT_TRUE(check_cocycle(cycle_maps(m.atlas, {"U1", "U3", "U4"}), m.atlas, m.table));
}

TEST(Gluing, NonComposableCycles) {
  const ModelSpec m = builtin("P3|4");
  EXPECT_THROW(cycle_maps(m.atlas, {"Uplus"}), NonComposableCycle);
  EXPECT_THROW(cycle_maps(m.atlas, {"Uplus", "Nowhere"}), NonComposableCycle);
  const auto& fwd = m.atlas.transition("Uplus", "Uminus");
  EXPECT_THROW(check_cocycle({&fwd, &fwd}, m.atlas, m.table), NonComposableCycle);
}

TEST(Gluing, ProjectiveWeightLawsForEveryChartPair) {
  const ModelSpec m = builtin("P3|N");
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& law : m.atlas.laws) {
    pairs.insert({law.from, law.to});
    const auto& t = m.atlas.transition(law.from, law.to);
    EXPECT_TRUE(check_weight_law(m.atlas.chart(law.from), m.atlas.chart(law.to), t, law, m.table));
  }
  EXPECT_EQ(pairs.size(), 6u);
}

}  // namespace
