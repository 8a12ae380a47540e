#include <gtest/gtest.h>

#include "common.hpp"

using namespace cdo;
using namespace cdo::testing;

namespace {

PriorityOrdering chain(const Signature& sig, const std::vector<std::string>& atoms) {
  std::vector<std::pair<Atom, Atom>> edges;
  for (std::size_t i = 0; i + 1 < atoms.size(); ++i) edges.emplace_back(atom(sig, atoms[i]), atom(sig, atoms[i + 1]));
  return PriorityOrdering::from_edges(edges);
}

}  // namespace

TEST(Closure, WeightLossChain) {
  const auto sig = weightloss_signature();
  const auto p = closure(chain(*sig, {"D=1", "C=0", "C=1", "D=0"}), sig.get());
  EXPECT_EQ(p.edges.size(), 6u);
  EXPECT_TRUE(p.precedes(atom(*sig, "D=1"), atom(*sig, "C=1")));
  EXPECT_TRUE(p.precedes(atom(*sig, "D=1"), atom(*sig, "D=0")));
  EXPECT_TRUE(p.precedes(atom(*sig, "C=0"), atom(*sig, "D=0")));
  EXPECT_FALSE(p.precedes(atom(*sig, "D=0"), atom(*sig, "D=1")));
}

TEST(Closure, EmptyStaysEmpty) {
  EXPECT_TRUE(closure(PriorityOrdering{}).edges.empty());
}

TEST(Closure, TwoCycleIsRejected) {
  const auto sig = weightloss_signature();
  const Atom p = atom(*sig, "A=1"), q = atom(*sig, "B=1");
  try {
    closure(PriorityOrdering::from_edges({{p, q}, {q, p}}), sig.get());
    FAIL() << "expected a cycle error";
  } catch (const PriorityCycleError& e) {
    EXPECT_NE(std::string(e.what()).find("A=1"), std::string::npos);
  }
}

TEST(Closure, EdgeOutsideDomainIsRejected) {
  const auto sig = weightloss_signature();
  PriorityOrdering p = chain(*sig, {"C=0", "C=1"});
  p.domain = {atom(*sig, "C=0")};
  EXPECT_THROW(closure(p, sig.get()), ModelError);
}

TEST(IdealLeq, WeightLossExamples) {
  const auto m = weightloss();
  const auto& p = m.priority();
  const auto a2 = world(m, "UA=1,UB=0"), a3 = world(m, "UA=0,UB=0");
  const auto a4 = world(m, "UA=1,UB=1"), a5 = world(m, "UA=0,UB=1");
  EXPECT_TRUE(ideal_leq(p, a3, a2));
  EXPECT_FALSE(ideal_leq(p, a2, a3));
  EXPECT_TRUE(ideal_leq(p, a4, a3));
  EXPECT_FALSE(ideal_leq(p, a3, a4));
  EXPECT_TRUE(ideal_leq(p, a4, a5));
  EXPECT_TRUE(ideal_leq(p, a5, a4));
  for (const auto& w : {a2, a3, a4, a5}) EXPECT_TRUE(ideal_leq(p, w, w));
}

TEST(Extrema, WeightLossWorlds) {
  const auto m = weightloss();
  const auto worlds = all_worlds(m.functions());
  const auto a2 = world(m, "UA=1,UB=0"), a4 = world(m, "UA=1,UB=1"), a5 = world(m, "UA=0,UB=1");
  EXPECT_EQ(maxima(m.priority(), worlds), std::vector<Assignment>{a2});
  const auto mins = minima(m.priority(), worlds);
  EXPECT_EQ(std::set<Assignment>(mins.begin(), mins.end()), (std::set<Assignment>{a4, a5}));
}

TEST(Extrema, SingletonAndEmpty) {
  const auto m = weightloss();
  const auto a = m.actual();
  EXPECT_EQ(maxima(m.priority(), {a}), std::vector<Assignment>{a});
  EXPECT_EQ(minima(m.priority(), {a}), std::vector<Assignment>{a});
  EXPECT_THROW(maxima(m.priority(), {}), ModelError);
}

TEST(OrderStructure, WeightLossClasses) {
  const auto m = weightloss();
  const auto worlds = all_worlds(m.functions());  // contexts 00, 01, 10, 11
  const auto s = order_structure(m.priority(), worlds);
  ASSERT_EQ(s.classes.size(), 3u);
  EXPECT_EQ(s.classes[0], std::vector<std::size_t>{2});
  EXPECT_EQ(s.classes[1], std::vector<std::size_t>{0});
  EXPECT_EQ(s.classes[2], (std::vector<std::size_t>{1, 3}));
  EXPECT_EQ(s.covers, (std::vector<std::pair<std::size_t, std::size_t>>{{1, 0}, {2, 1}}));
  EXPECT_EQ(s.max_worlds, std::vector<std::size_t>{2});
  EXPECT_EQ(s.min_worlds, (std::vector<std::size_t>{1, 3}));
}

TEST(OrderStructure, NoEdgesGivesOneClass) {
  const auto m = weightloss();
  const auto s = order_structure(PriorityOrdering{}, all_worlds(m.functions()));
  ASSERT_EQ(s.classes.size(), 1u);
  EXPECT_EQ(s.classes[0].size(), 4u);
  EXPECT_TRUE(s.covers.empty());
  EXPECT_EQ(s.max_worlds.size(), 4u);
}

TEST(OrderStructure, SingleWorld) {
  const auto m = weightloss();
  const auto s = order_structure(m.priority(), {m.actual()});
  ASSERT_EQ(s.classes.size(), 1u);
  EXPECT_EQ(s.max_worlds, s.min_worlds);
}

TEST(PostIntervention, WeightLossComparisons) {
  const auto m = weightloss();
  const auto& sig = m.signature();
  const Context u0 = ctx(sig, "UA=0,UB=0");
  const auto a = iv(sig, {"A=1"}), b = iv(sig, {"B=1"});
  EXPECT_TRUE(post_intervention_leq(m.causal(), m.priority(), b, u0, a, u0));
  EXPECT_FALSE(post_intervention_leq(m.causal(), m.priority(), a, u0, b, u0));
  EXPECT_TRUE(post_intervention_leq(m.causal(), m.priority(), a, u0, a, u0));
}

TEST(PostIntervention, MatchesComparisonOfIntervenedWorlds) {
  gen::Rng rng(11);
  auto sig = gen::binary_signature(2, 3);
  for (int t = 0; t < 100; ++t) {
    const auto m = gen::model(sig, rng);
    const auto i1 = gen::intervention(*sig, rng, 2), i2 = gen::intervention(*sig, rng, 2);
    const auto u1 = gen::context(*sig, rng), u2 = gen::context(*sig, rng);
    const auto w1 = intervene(CausalModel(m.causal().functions_ptr(), u1), i1).actual();
    const auto w2 = intervene(CausalModel(m.causal().functions_ptr(), u2), i2).actual();
    EXPECT_EQ(post_intervention_leq(m.causal(), m.priority(), i1, u1, i2, u2), ideal_leq(m.priority(), w1, w2));
  }
}

// With a total priority the ordering is a preorder and has maximal elements.
TEST(IdealLeq, ChainPrioritiesAreTransitive) {
  gen::Rng rng(5);
  auto sig = gen::binary_signature(0, 4);
  auto atoms = sig->all_atoms();
  for (int t = 0; t < 200; ++t) {
    std::shuffle(atoms.begin(), atoms.end(), rng);
    std::vector<std::pair<Atom, Atom>> edges;
    const std::size_t k = 2 + gen::below(rng, 5);
    for (std::size_t i = 0; i + 1 < k; ++i) edges.emplace_back(atoms[i], atoms[i + 1]);
    const auto p = closure(PriorityOrdering::from_edges(edges));
    std::vector<Assignment> worlds;
    for (int w = 0; w < 6; ++w) {
      Assignment a;
      for (int v = 0; v < 4; ++v) a.values.push_back(static_cast<ValueId>(gen::below(rng, 2)));
      worlds.push_back(a);
    }
    for (const auto& a : worlds)
      for (const auto& b : worlds)
        for (const auto& c : worlds)
          if (ideal_leq(p, a, b) && ideal_leq(p, b, c)) {
            EXPECT_TRUE(ideal_leq(p, a, c));
          }
    EXPECT_FALSE(maxima(p, worlds).empty());
  }
}

// For a genuinely partial priority the ordering need not be transitive.
TEST(IdealLeq, PartialPriorityCanBreakTransitivity) {
  auto sig = gen::binary_signature(0, 4);  // X1=x, X2=a, X3=y1, X4=y2
  const Atom x{0, 1}, a{1, 1}, y1{2, 1}, y2{3, 1};
  auto p = closure(PriorityOrdering::from_edges({{a, y1}, {x, y2}}));
  p.domain = {x, a, y1, y2};
  std::sort(p.domain.begin(), p.domain.end());
  const Assignment wa{{1, 1, 0, 0}}, wb{{1, 0, 1, 0}}, wc{{0, 0, 1, 1}};
  EXPECT_TRUE(ideal_leq(p, wa, wb));
  EXPECT_TRUE(ideal_leq(p, wb, wc));
  EXPECT_FALSE(ideal_leq(p, wa, wc));
}

TEST(IdealLeq, MoreEdgesNeverLoseComparisons) {
  gen::Rng rng(8);
  auto sig = gen::binary_signature(1, 3);
  for (int t = 0; t < 100; ++t) {
    const auto m = gen::model(sig, rng);
    auto p = m.priority();
    if (p.domain.size() < 2) continue;
    auto bigger = p;
    const Atom lo = p.domain[gen::below(rng, p.domain.size())], hi = p.domain[gen::below(rng, p.domain.size())];
    if (lo == hi || p.precedes(hi, lo)) continue;
    bigger.edges.insert({lo, hi});
    bigger = closure(bigger);
    const auto worlds = all_worlds(m.functions());
    for (const auto& a : worlds)
      for (const auto& b : worlds) {
        if (ideal_leq(p, a, b)) {
          EXPECT_TRUE(ideal_leq(bigger, a, b));
        }
      }
  }
}
