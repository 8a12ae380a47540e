#include <gtest/gtest.h>

#include "common.hpp"

using namespace cdo;
using namespace cdo::testing;

namespace {

std::set<Intervention> guards(const Formula& f) {
  std::set<Intervention> out;
  auto walk = [&](auto&& self, const Formula& g) -> void {
    std::visit(overloaded{
                   [&](const NotF& x) { self(self, x.sub); },
                   [&](const AndF& x) { self(self, x.left); self(self, x.right); },
                   [&](const InterveneF& x) { out.insert(x.iv.canonical()); self(self, x.body); },
                   [&](const AtContextF& x) { self(self, x.body); },
                   [](const auto&) {},
               },
               g.node().v);
  };
  walk(walk, f);
  return out;
}

}  // namespace

TEST(Expand, ObligationRangesOverEveryIntervention) {
  const auto m = weightloss();
  const auto& sig = m.signature();
  const Formula f = parse("O{goal: C=1; do: A=1} @ {UA=0,UB=0}", sig);
  const Formula g = expand(f, m);
  EXPECT_TRUE(macro_free(g));
  auto seen = guards(g);
  seen.insert(Intervention{});  // the empty guard is written without brackets
  EXPECT_EQ(seen.size(), 81u);
  EXPECT_EQ(relevant_interventions(g, sig).size(), 81u);
  EXPECT_TRUE(eval(m, g));
  EXPECT_FALSE(eval(m, expand(parse("O{goal: C=1; do: B=1} @ {UA=0,UB=0}", sig), m)));
}

TEST(Expand, MacroFreeIsIdentity) {
  const auto sig = weightloss_signature();
  const Formula f = parse("[A=1](C=1 & !D=1) @ {UA=0,UB=1} | C=0 < C=1", *sig);
  const Formula g = expand(f, *sig);
  EXPECT_EQ(g.get(), f.get());
}

TEST(Expand, ReflexiveComparisonIsATautology) {
  gen::Rng rng(4);
  auto sig = gen::binary_signature(2, 3);
  const auto i = gen::intervention(*sig, rng, 2, 1);
  const auto u = gen::context(*sig, rng);
  const Formula g = expand(mk::leq_post(i, u, i, u), *sig);
  for (int t = 0; t < 100; ++t) {
    auto m = gen::model(sig, rng);
    PriorityOrdering p = m.priority();
    p.domain = sig->all_atoms();
    const CausalDeonticModel full(m.causal(), p);
    EXPECT_TRUE(eval(full, g));
  }
}

TEST(Expand, CapIsEnforced) {
  const auto sig = weightloss_signature();
  const Formula f = parse("O{goal: C=1; do: A=1} @ {UA=0,UB=0}", *sig);
  EXPECT_THROW(expand(f, *sig, 1000), CapExceeded);
}

TEST(Expand, NoMacrosSurvive) {
  gen::Rng rng(9);
  auto sig = gen::binary_signature(1, 3);
  gen::FormulaParams p;
  p.macros = true;
  for (int t = 0; t < 100; ++t) EXPECT_TRUE(macro_free(expand(gen::formula(*sig, rng, 4, p), *sig)));
}

TEST(Expand, PermissionComparesSameVariablesOnly) {
  const auto m = weightloss();
  const auto& sig = m.signature();
  const Formula g = expand(parse("P{goal: C=1; do: A=1,B=0} @ {UA=0,UB=0}", sig), m);
  for (const auto& i : guards(g)) {
    ASSERT_EQ(i.size(), 2u);
    EXPECT_EQ(i.settings[0].var, sig.id("A"));
    EXPECT_EQ(i.settings[1].var, sig.id("B"));
  }
}
