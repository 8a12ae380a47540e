#include <gtest/gtest.h>

#include <fstream>

#include "common.hpp"

using namespace cdo;
using namespace cdo::testing;

namespace {

std::size_t error_column(const std::string& text) {
  try {
    parse(text, *weightloss_signature());
  } catch (const ParseError& e) {
    return e.column();
  }
  return 0;
}

}  // namespace

TEST(Parse, ContextScopedIntervention) {
  const auto sig = weightloss_signature();
  const Formula f = parse("[A=1]C=1 @ {UA=0,UB=0}", *sig);
  EXPECT_EQ(f, mk::at(ctx(*sig, "UA=0,UB=0"), mk::after(iv(*sig, {"A=1"}), mk::atom(atom(*sig, "C=1")))));
}

TEST(Parse, Obligation) {
  const auto sig = weightloss_signature();
  EXPECT_EQ(parse("O{goal: C=1; do: A=1} @ {UA=0,UB=0}", *sig),
            mk::oblig(atom(*sig, "C=1"), iv(*sig, {"A=1"}), ctx(*sig, "UA=0,UB=0")));
  EXPECT_EQ(parse("P{goal: C=1; do: B=1} @ {UA=0,UB=0}", *sig),
            mk::permit(atom(*sig, "C=1"), iv(*sig, {"B=1"}), ctx(*sig, "UA=0,UB=0")));
}

TEST(Parse, Priority) {
  const auto sig = weightloss_signature();
  EXPECT_EQ(parse("C=0 < C=1", *sig), mk::prec(atom(*sig, "C=0"), atom(*sig, "C=1")));
}

TEST(Parse, Comparisons) {
  const auto sig = weightloss_signature();
  const Context u0 = ctx(*sig, "UA=0,UB=0"), u1 = ctx(*sig, "UA=1,UB=0");
  EXPECT_EQ(parse("leq(@{UA=0,UB=0}, @{UA=1,UB=0})", *sig), mk::leq(u0, u1));
  EXPECT_EQ(parse("leq([B=1] @ {UA=0,UB=0}, [A=1] @ {UA=0,UB=0})", *sig),
            mk::leq_post(iv(*sig, {"B=1"}), u0, iv(*sig, {"A=1"}), u0));
}

TEST(Parse, Precedence) {
  const auto sig = weightloss_signature();
  const Formula a = mk::atom(atom(*sig, "A=1")), b = mk::atom(atom(*sig, "B=1")), c = mk::atom(atom(*sig, "C=1"));
  EXPECT_EQ(parse("A=1 | B=1 & C=1", *sig), mk::disj(a, mk::conj(b, c)));
  EXPECT_EQ(parse("A=1 -> B=1 -> C=1", *sig), mk::implies(a, mk::implies(b, c)));
  EXPECT_EQ(parse("!A=1 & B=1", *sig), mk::conj(mk::neg(a), b));
  EXPECT_EQ(parse("!A=1 @ {UA=0,UB=0}", *sig), mk::at(ctx(*sig, "UA=0,UB=0"), mk::neg(a)));
  EXPECT_EQ(parse("A=1 & B=1 @ {UA=0,UB=0}", *sig), mk::conj(a, mk::at(ctx(*sig, "UA=0,UB=0"), b)));
}

TEST(Parse, ValuesMayBeWordsOrNumbers) {
  auto sig = std::make_shared<const Signature>(
      std::vector<std::pair<std::string, std::vector<std::string>>>{},
      std::vector<std::pair<std::string, std::vector<std::string>>>{{"Light", {"off", "on", "2"}}});
  EXPECT_EQ(print(parse("[Light=2]Light=on", *sig), *sig), "[Light=2]Light=on");
}

TEST(Parse, PositionedErrors) {
  EXPECT_EQ(error_column("A=1 &"), 6u);
  EXPECT_EQ(error_column("Q=1"), 1u);
  EXPECT_EQ(error_column("A=1 & A=7"), 9u);
  EXPECT_EQ(error_column("C=1 @ {UA=0}"), 7u);
  EXPECT_EQ(error_column("[UA=1]C=1"), 2u);
  EXPECT_EQ(error_column("[A=1,A=0]C=1"), 6u);
  EXPECT_EQ(error_column("O{goal: C=1; do: } @ {UA=0,UB=0}"), 18u);
  EXPECT_EQ(error_column("C=1 @ {UA=0,UA=1}"), 13u);
  EXPECT_EQ(error_column("C=1 $"), 5u);
  EXPECT_EQ(error_column("(C=1"), 5u);
}

TEST(Print, Examples) {
  const auto sig = weightloss_signature();
  EXPECT_EQ(print(mk::oblig(atom(*sig, "C=1"), iv(*sig, {"A=1"}), ctx(*sig, "UA=0,UB=0")), *sig),
            "O{goal: C=1; do: A=1} @ {UA=0,UB=0}");
  EXPECT_EQ(print(mk::conj(mk::atom(atom(*sig, "A=1")), mk::neg(mk::atom(atom(*sig, "B=1")))), *sig), "A=1 & !B=1");
  EXPECT_EQ(print(mk::leq(ctx(*sig, "UA=0,UB=0"), ctx(*sig, "UA=1,UB=1")), *sig), "leq(@{UA=0,UB=0}, @{UA=1,UB=1})");
}

TEST(Golden, CanonicalFormsAndIdempotence) {
  const auto sig = weightloss_signature();
  std::ifstream in(std::string(CDO_TEST_DATA) + "/golden_formulas.txt");
  ASSERT_TRUE(in);
  std::string line;
  int checked = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    ASSERT_NE(tab, std::string::npos) << line;
    const std::string input = line.substr(0, tab), canonical = line.substr(tab + 1);
    const std::string once = print(parse(input, *sig), *sig);
    EXPECT_EQ(once, canonical) << input;
    EXPECT_EQ(print(parse(once, *sig), *sig), once) << input;
    EXPECT_EQ(parse(once, *sig), parse(input, *sig)) << input;
    ++checked;
  }
  EXPECT_GE(checked, 40);
}

TEST(RoundTrip, RandomTrees) {
  gen::Rng rng(3);
  auto sig = gen::binary_signature(2, 3);
  gen::FormulaParams p;
  p.macros = true;
  for (int t = 0; t < 500; ++t) {
    const Formula f = gen::formula(*sig, rng, 5, p);
    EXPECT_EQ(parse(print(f, *sig), *sig), f) << print(f, *sig);
  }
}

TEST(Variables, Examples) {
  const auto sig = weightloss_signature();
  auto names = [&](const std::string& text) {
    std::set<std::string> out;
    for (VarId v : variables_of(parse(text, *sig))) out.insert(sig->var(v).name);
    return out;
  };
  EXPECT_EQ(names("[A=1]C=1"), (std::set<std::string>{"A", "C"}));
  EXPECT_EQ(names("O{goal: C=1; do: A=1} @ {UA=0,UB=0}"), (std::set<std::string>{"A", "C", "UA", "UB"}));
  EXPECT_EQ(names("C=0 < C=1"), (std::set<std::string>{"C"}));
}

TEST(Formula, StructuralEquality) {
  const auto sig = weightloss_signature();
  EXPECT_NE(parse("A=1 & B=1", *sig), parse("B=1 & A=1", *sig));
  EXPECT_EQ(parse("(A=1)", *sig), parse("A=1", *sig));
  EXPECT_TRUE(macro_free(parse("[A=1]C=1 @ {UA=0,UB=0}", *sig)));
  EXPECT_FALSE(macro_free(parse("!O{goal: C=1; do: A=1} @ {UA=0,UB=0}", *sig)));
}
