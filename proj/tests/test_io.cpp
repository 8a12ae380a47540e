#include <gtest/gtest.h>

#include "common.hpp"

using namespace cdo;
using namespace cdo::testing;

namespace {

json weightloss_doc() { return read_json_file(std::string(CDO_EXAMPLES) + "/weightloss.json"); }

}  // namespace

TEST(Io, LoadsWeightLoss) {
  const auto m = weightloss();
  EXPECT_EQ(m.signature().exogenous_count(), 2u);
  EXPECT_EQ(m.signature().endogenous_count(), 4u);
  EXPECT_EQ(m.actual(), assignment(m.signature(), "UA=0,UB=0,A=0,B=0,C=0,D=0"));
  EXPECT_EQ(m.priority().domain.size(), 4u);
}

TEST(Io, RejectsUnknownKeys) {
  auto doc = weightloss_doc();
  doc["extra"] = 1;
  EXPECT_THROW(model_from_json(doc), ModelError);
  doc = weightloss_doc();
  doc["functions"]["A"]["note"] = "x";
  EXPECT_THROW(model_from_json(doc), ModelError);
}

TEST(Io, StructuralErrors) {
  auto doc = weightloss_doc();
  doc["functions"].erase("D");
  EXPECT_THROW(model_from_json(doc), ModelError);
  doc = weightloss_doc();
  doc["context"].erase("UB");
  EXPECT_THROW(model_from_json(doc), ModelError);
  doc = weightloss_doc();
  doc["functions"]["A"]["table"].push_back(json::array({json::array({0}), 1}));
  EXPECT_THROW(model_from_json(doc), ModelError);
  doc = weightloss_doc();
  doc["priority"].push_back(json::array({"C=2", "D=0"}));
  EXPECT_THROW(model_from_json(doc), ModelError);
}

TEST(Io, SemanticProblemsGoToTheReport) {
  auto doc = weightloss_doc();
  doc["functions"]["A"] = {{"parents", {"C"}}, {"table", {{{0}, 0}, {{1}, 1}}}};
  auto file = model_from_json(doc);
  EXPECT_FALSE(file.report.ok());
  EXPECT_THROW(file.model(), ModelError);

  doc = weightloss_doc();
  doc["priority"].push_back(json::array({"D=0", "D=1"}));
  file = model_from_json(doc);
  EXPECT_FALSE(file.report.ok());

  doc = weightloss_doc();
  doc["functions"]["C"]["table"].erase(0);
  file = model_from_json(doc);
  EXPECT_FALSE(file.report.ok());
}

TEST(Io, ExplicitDomain) {
  auto doc = weightloss_doc();
  doc["domain"] = {"C=0", "C=1", "D=0", "D=1", "A=1"};
  const auto m = model_from_json(doc).model();
  EXPECT_EQ(m.priority().domain.size(), 5u);
  // A=1 now counts against worlds that lack it
  EXPECT_FALSE(eval(m, parse("leq([A=1] @ {UA=0,UB=0}, [C=1] @ {UA=0,UB=0})", m.signature())));
}

TEST(Io, RoundTrip) {
  gen::Rng rng(2);
  auto sig = gen::binary_signature(2, 3);
  for (int t = 0; t < 50; ++t) {
    const auto m = gen::model(sig, rng);
    const auto back = model_from_json(json::parse(model_to_json(m).dump())).model();
    EXPECT_EQ(back.functions().functions(), m.functions().functions());
    EXPECT_EQ(back.actual(), m.actual());
    EXPECT_EQ(back.priority(), m.priority());
  }
  const auto m = weightloss();
  EXPECT_EQ(model_from_json(model_to_json(m)).model(), m);
}

TEST(Io, SignatureFiles) {
  const json doc = {{"exogenous", {"U"}}, {"endogenous", {"X", "Y"}}, {"ranges", {{"U", {0, 1}}, {"X", {0, 1}}, {"Y", {"lo", "hi"}}}}};
  const auto sig = signature_from_json(doc);
  EXPECT_EQ(sig->size(), 3u);
  EXPECT_EQ(sig->value_name(sig->id("Y"), 1), "hi");
  EXPECT_EQ(signature_to_json(*sig)["endogenous"], doc["endogenous"]);
  EXPECT_THROW(signature_from_json({{"exogenous", {"U"}}, {"endogenous", {"X"}}, {"ranges", {{"U", {0, 1}}}}}), ModelError);
  EXPECT_EQ(signature_from_json(weightloss_doc())->size(), 6u);
}
