#include <gtest/gtest.h>

#include "common.hpp"

using namespace cdo;
using namespace cdo::testing;

namespace {

std::set<std::string> endogenous_names(const ReducedSignature& rs) {
  std::set<std::string> out;
  for (VarId v : rs.reduced->endogenous()) out.insert(rs.reduced->var(v).name);
  return out;
}

/// Certificate read off a concrete model over the full signature.
Certificate certificate_of(const CausalDeonticModel& m, const Formula& core) {
  const Signature& sig = m.signature();
  Certificate c;
  c.order = m.functions().order();
  c.actual = sig.context_id(m.causal().context());
  c.interventions = relevant_interventions(core, sig);
  for (const auto& r : c.interventions) {
    std::vector<Assignment> row;
    for (ContextId u = 0; u < sig.context_count(); ++u) row.push_back(solve(m.functions(), sig.context(u), compose(no_forcing(sig), r)));
    c.solutions.push_back(row);
  }
  const auto atoms = priority_atoms(core);
  for (const auto& [lo, hi] : m.priority().edges)
    if (atoms.count(lo) && atoms.count(hi)) c.priority.emplace_back(lo, hi);
  return c;
}

std::shared_ptr<const Signature> abc_signature() {
  return std::make_shared<const Signature>(
      std::vector<std::pair<std::string, std::vector<std::string>>>{{"U", {"0", "1"}}},
      std::vector<std::pair<std::string, std::vector<std::string>>>{{"A", {"0", "1"}}, {"B", {"0", "1"}}, {"C", {"0", "1"}}});
}

}  // namespace

TEST(Reduce, Examples) {
  const auto sig = weightloss_signature();
  auto rs = reduce(parse("[A=1]C=1", *sig), sig);
  EXPECT_EQ(endogenous_names(rs), (std::set<std::string>{"A", "C"}));
  EXPECT_EQ(rs.reduced->exogenous_count(), 1u);
  EXPECT_EQ(rs.reduced->range_size(rs.u_star()), 4u);
  EXPECT_EQ(rs.reduced->var(rs.u_star()).name, "U_star");
  EXPECT_EQ(rs.reduced->value_name(rs.u_star(), 2), "1_0");

  rs = reduce(parse("C=1", *sig), sig);
  EXPECT_EQ(endogenous_names(rs), std::set<std::string>{"C"});
  EXPECT_EQ(rs.reduced->range_size(rs.u_star()), 4u);

  rs = reduce(parse("O{goal: C=1; do: A=1} @ {UA=0,UB=0} & B=1 & D=0", *sig), sig);
  EXPECT_EQ(endogenous_names(rs), (std::set<std::string>{"UA", "UB", "A", "B", "C", "D"}));
  EXPECT_TRUE(rs.pinned(rs.to_reduced[static_cast<std::size_t>(sig->id("UA"))]));
  EXPECT_FALSE(rs.pinned(rs.to_reduced[static_cast<std::size_t>(sig->id("A"))]));
  EXPECT_EQ(rs.free_variables().size(), 4u);
}

TEST(Reduce, FreshNameForUStar) {
  auto sig = std::make_shared<const Signature>(
      std::vector<std::pair<std::string, std::vector<std::string>>>{{"U_star", {"0", "1"}}},
      std::vector<std::pair<std::string, std::vector<std::string>>>{{"X", {"0", "1"}}});
  const auto rs = reduce(parse("X=1", *sig), sig);
  EXPECT_EQ(rs.reduced->var(rs.u_star()).name, "U_star_");
}

TEST(RelevantInterventions, Examples) {
  const auto sig = weightloss_signature();
  auto names = [&](const std::string& text) {
    std::set<std::string> out;
    for (const auto& i : relevant_interventions(parse(text, *sig), *sig)) out.insert(sig->intervention_string(i));
    return out;
  };
  EXPECT_EQ(names("[A=1]C=1 & [B=1]D=1"), (std::set<std::string>{"[]", "[A=1]", "[B=1]"}));
  EXPECT_EQ(names("C=1"), std::set<std::string>{"[]"});
  EXPECT_EQ(names("[A=1][B=1]C=1"), (std::set<std::string>{"[]", "[A=1]", "[A=1,B=1]"}));
  EXPECT_EQ(names("[A=1][A=0]C=1"), (std::set<std::string>{"[]", "[A=1]", "[A=0]"}));
  EXPECT_EQ(relevant_interventions_expanded(parse("O{goal: C=1; do: A=1} @ {UA=0,UB=0}", *sig), *sig).size(), 81u);
}

TEST(CheckCertificate, FromAnActualModel) {
  const auto m = weightloss();
  const Formula f = parse("[A=1]C=1 @ {UA=0,UB=0}", m.signature());
  const auto space = full_space(weightloss_signature());
  EXPECT_TRUE(check_certificate(f, space, certificate_of(m, f)));
  // and over the reduced signature, via the projected model
  const auto rs = reduce(f, weightloss_signature());
  const auto pm = project(m, rs);
  const Formula g = translate(f, rs);
  auto c = certificate_of(pm, g);
  c.order.clear();
  for (VarId v : pm.functions().order())
    if (!rs.pinned(v)) c.order.push_back(v);
  EXPECT_TRUE(check_certificate(g, reduced_space(rs), c));
}

TEST(CheckCertificate, FunctionalDependenceViolation) {
  const auto m = weightloss();
  const auto& sig = m.signature();
  const Formula f = parse("[B=1]C=1 @ {UA=0,UB=0}", sig);
  const auto space = full_space(weightloss_signature());
  auto c = certificate_of(m, f);
  ASSERT_EQ(c.order.front(), sig.id("A"));
  ASSERT_EQ(c.interventions.size(), 2u);
  // A is first in the order and unforced in both vectors; make them disagree in context 1
  auto& w = c.solutions[1][1];
  w.values[static_cast<std::size_t>(sig.id("A"))] ^= 1;
  EXPECT_FALSE(check_certificate(f, space, c));
}

TEST(CheckCertificate, PriorityTwoCycle) {
  const auto m = weightloss();
  const auto& sig = m.signature();
  const Formula f = parse("C=0 < C=1", sig);
  const auto space = full_space(weightloss_signature());
  auto c = certificate_of(m, f);
  EXPECT_TRUE(check_certificate(f, space, c));
  c.priority.emplace_back(atom(sig, "C=1"), atom(sig, "C=0"));
  EXPECT_FALSE(check_certificate(f, space, c));
}

TEST(CheckCertificate, ForcedValuesMustHold) {
  const auto m = weightloss();
  const auto& sig = m.signature();
  const Formula f = parse("[A=1]C=1", sig);
  auto c = certificate_of(m, f);
  c.solutions[1][0].values[static_cast<std::size_t>(sig.id("A"))] = 0;
  EXPECT_FALSE(check_certificate(f, full_space(weightloss_signature()), c));
}

TEST(CheckCertificate, MalformedCertificatesThrow) {
  const auto m = weightloss();
  const Formula f = parse("[A=1]C=1", m.signature());
  const auto space = full_space(weightloss_signature());
  auto c = certificate_of(m, f);
  c.order.pop_back();
  EXPECT_THROW(check_certificate(f, space, c), ModelError);
  c = certificate_of(m, f);
  c.interventions.pop_back();
  c.solutions.pop_back();
  EXPECT_THROW(check_certificate(f, space, c), ModelError);
}

TEST(Sat, Contradiction) {
  const auto sig = abc_signature();
  EXPECT_EQ(sat(parse("A=1 & !A=1", *sig), sig).status, SatStatus::Unsat);
}

TEST(Sat, InterventionWitness) {
  const auto sig = abc_signature();
  const Formula f = parse("[A=1]C=1 & ![B=1]C=1", *sig);
  const auto r = sat(f, sig);
  ASSERT_EQ(r.status, SatStatus::Sat);
  ASSERT_TRUE(r.witness);
  EXPECT_TRUE(eval(*r.witness, f));
  // the hand-built witness: C copies A, B is idle
  std::vector<StructuralFunction> fns(sig->size());
  fns[1] = StructuralFunction::constant(0);
  fns[2] = StructuralFunction::constant(0);
  fns[3] = {{sig->id("A")}, {0, 1}};
  const CausalDeonticModel hand(CausalModel(std::make_shared<const FunctionSet>(sig, fns), Context{{0}}), PriorityOrdering{});
  EXPECT_TRUE(eval(hand, f));
  EXPECT_EQ(hand.functions().semantic_parents(sig->id("C")), std::vector<VarId>{sig->id("A")});
}

TEST(Sat, PriorityAsymmetry) {
  const auto sig = abc_signature();
  EXPECT_EQ(sat(parse("A=1 < B=1 & B=1 < A=1", *sig), sig).status, SatStatus::Unsat);
  EXPECT_EQ(sat(parse("A=1 < B=1 & B=1 < C=1 & !(A=1 < C=1)", *sig), sig).status, SatStatus::Unsat);
  const auto r = sat(parse("A=1 < B=1 & !(B=1 < C=1)", *sig), sig);
  ASSERT_EQ(r.status, SatStatus::Sat);
  EXPECT_TRUE(r.witness->priority().precedes(atom(*sig, "A=1"), atom(*sig, "B=1")));
}

TEST(Sat, ExogenousVariablesCannotBeMovedByInterventions) {
  const auto sig = weightloss_signature();
  EXPECT_EQ(sat(parse("UA=0 & [A=1]UA=1", *sig), sig).status, SatStatus::Unsat);
  EXPECT_EQ(sat(parse("UA=0 & UA=1 @ {UA=1,UB=0}", *sig), sig).status, SatStatus::Sat);
  EXPECT_EQ(sat(parse("UA=0 & !(UA=0 @ {UA=0,UB=1})", *sig), sig).status, SatStatus::Unsat);
}

TEST(Sat, MacroWitnessUsesAllAtoms) {
  const auto sig = abc_signature();
  const Formula f = parse("O{goal: C=1; do: A=1} @ {U=0}", *sig);
  const auto r = sat(f, sig);
  ASSERT_EQ(r.status, SatStatus::Sat);
  EXPECT_EQ(r.witness->priority().domain.size(), sig->atom_count());
  EXPECT_TRUE(eval(*r.witness, f));
  EXPECT_TRUE(eval(*r.witness, expand(f, *r.witness)));
}

TEST(Sat, BudgetIsNeverReportedAsUnsat) {
  const auto sig = abc_signature();
  SearchOptions o;
  o.budget = 1;
  EXPECT_EQ(sat(parse("[A=1]C=1 & [A=1]C=0", *sig), sig, o).status, SatStatus::Budget);
  EXPECT_EQ(sat(parse("[A=1]C=1 & [A=1]C=0", *sig), sig).status, SatStatus::Unsat);
  o = SearchOptions{};
  o.max_slices = 1;
  EXPECT_EQ(sat(parse("A=1", *sig), sig, o).status, SatStatus::Budget);
}

TEST(Sat, NoExogenousVariables) {
  auto sig = gen::binary_signature(0, 2);
  const auto r = sat(parse("[X1=1]X2=1 & X2=0", *sig), sig);
  ASSERT_EQ(r.status, SatStatus::Sat);
  EXPECT_TRUE(eval(*r.witness, parse("[X1=1]X2=1 & X2=0", *sig)));
}

TEST(Sat, DeterministicAcrossWorkerCounts) {
  gen::Rng rng(17);
  auto sig = gen::binary_signature(2, 3);
  for (int t = 0; t < 40; ++t) {
    const Formula f = gen::formula(*sig, rng, 4);
    SearchOptions one, many;
    many.workers = 4;
    const auto a = sat(f, sig, one), b = sat(f, sig, many);
    ASSERT_EQ(a.status, b.status) << print(f, *sig);
    if (a.status == SatStatus::Sat) {
      EXPECT_EQ(model_to_json(*a.witness), model_to_json(*b.witness));
      EXPECT_TRUE(eval(*a.witness, f));
    }
  }
}

TEST(Sat, SeededOrderStillFindsVerifiedWitnesses) {
  gen::Rng rng(18);
  auto sig = gen::binary_signature(1, 3);
  for (int t = 0; t < 40; ++t) {
    const Formula f = gen::formula(*sig, rng, 4);
    SearchOptions o;
    o.seed = 99;
    const auto a = sat(f, sig), b = sat(f, sig, o);
    ASSERT_EQ(a.status, b.status);
    if (b.status == SatStatus::Sat) EXPECT_TRUE(eval(*b.witness, f));
  }
}

TEST(Valid, Examples) {
  const auto sig = weightloss_signature();
  EXPECT_EQ(valid(parse("[A=1,B=0]B=0", *sig), sig).status, Validity::Valid);
  EXPECT_EQ(valid(parse("[A=1]B=1 -> !([A=1]B=0)", *sig), sig).status, Validity::Valid);
  const auto r = valid(parse("A=1", *sig), sig);
  EXPECT_EQ(r.status, Validity::Invalid);
  ASSERT_TRUE(r.countermodel);
  EXPECT_FALSE(eval(*r.countermodel, parse("A=1", *sig)));
  EXPECT_EQ(valid(parse("UA=0 & UB=1 & [A=1]C=1 -> ([A=1]C=1) @ {UA=0,UB=1}", *sig), sig).status, Validity::Valid);
}

TEST(Project, PreservesTruth) {
  gen::Rng rng(30);
  auto sig = gen::binary_signature(2, 4);
  for (int t = 0; t < 200; ++t) {
    const auto m = gen::model(sig, rng);
    gen::FormulaParams p;
    p.prec_atoms = m.priority().domain;
    p.prec = !p.prec_atoms.empty();
    const Formula f = gen::formula(*sig, rng, 4, p);
    const auto rs = reduce(f, sig);
    EXPECT_EQ(eval(m, f), eval(project(m, rs), translate(f, rs))) << print(f, *sig);
  }
}

TEST(Lift, PreservesTruth) {
  gen::Rng rng(31);
  auto sig = gen::binary_signature(2, 4);
  for (int t = 0; t < 200; ++t) {
    const auto m = gen::model(sig, rng);
    const Formula f = gen::formula(*sig, rng, 4);
    const auto rs = reduce(f, sig);
    const auto pm = project(m, rs);
    EXPECT_EQ(eval(pm, translate(f, rs)), eval(lift(pm, rs), f)) << print(f, *sig);
  }
}
