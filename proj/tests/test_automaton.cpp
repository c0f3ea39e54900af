#include "generators.hpp"

#include "ltlshape/automaton.hpp"

#include <gtest/gtest.h>

using namespace ltlshape;
using namespace ltlshape::automaton;
using ltl::LassoWord;
using ltl::parse;

namespace {

BuchiAutomaton compile(const char *text, std::vector<std::string> aps = {}) {
  const ltl::Formula f = parse(text);
  if (aps.empty())
    aps = ltl::atomic_props(f);
  return translate(ltl::to_nnf(f), aps);
}

} // namespace

TEST(Guard, EvaluationAndHoaText) {
  const Guard g = Guard::conj(Guard::ap(0), Guard::negate(Guard::ap(1)));
  EXPECT_TRUE(g.satisfied_by(0b01));
  EXPECT_FALSE(g.satisfied_by(0b11));
  EXPECT_EQ(g.to_hoa(), "0&!1");
  EXPECT_EQ(Guard::truth().to_hoa(), "t");
  EXPECT_EQ(*g.max_ap(), 1U);
  EXPECT_FALSE(Guard::truth().max_ap().has_value());
}

TEST(Guard, ParseRoundTrip) {
  for (const char *text : {"t", "f", "0", "!1", "0&!1", "(0&1)|2", "!(0|1)&2"}) {
    const Guard g = parse_guard(text);
    EXPECT_TRUE(equivalent(g, parse_guard(g.to_hoa()), 3)) << text;
  }
  EXPECT_TRUE(equivalent(parse_guard("!(0&1)"), parse_guard("!0|!1"), 2));
  EXPECT_FALSE(equivalent(parse_guard("0"), parse_guard("1"), 2));
}

TEST(Automaton, RejectsOutOfRangeConstruction) {
  EXPECT_THROW(BuchiAutomaton({"a"}, 1, 1, {}, {true}), std::invalid_argument);
  EXPECT_THROW(BuchiAutomaton({"a"}, 1, 0, {{0, Guard::ap(1), 0}}, {true}), std::invalid_argument);
  EXPECT_THROW(BuchiAutomaton({"a"}, 1, 0, {{0, Guard::truth(), 2}}, {true}), std::invalid_argument);
}

TEST(Translate, True) {
  const BuchiAutomaton a = compile("true");
  ASSERT_EQ(a.num_states(), 1U);
  EXPECT_TRUE(a.is_accepting(0));
  EXPECT_EQ(a.successors(0, ApMask{0}), std::vector<StateId>{0});
  const std::string hoa = serialize_hoa(a);
  EXPECT_NE(hoa.find("States: 1"), std::string::npos);
  EXPECT_NE(hoa.find("Acceptance: 1 Inf(0)"), std::string::npos);
  EXPECT_NE(hoa.find("[t] 0"), std::string::npos);
}

TEST(Translate, FinallySuccessors) {
  const BuchiAutomaton a = compile("F a");
  const StateId q0 = a.initial();
  EXPECT_EQ(a.successors(q0, ltl::Label{}), std::vector<StateId>{q0});
  bool hits_accepting = false;
  for (StateId q : a.successors(q0, ltl::Label{"a"}))
    hits_accepting = hits_accepting || a.is_accepting(q);
  EXPECT_TRUE(hits_accepting);
}

TEST(Translate, LabelsOutsideUniverseAreIgnored) {
  const BuchiAutomaton a = compile("F a & G ! b");
  for (StateId q = 0; q < a.num_states(); ++q) {
    EXPECT_EQ(a.successors(q, ltl::Label{"a", "zzz"}), a.successors(q, ltl::Label{"a"}));
    EXPECT_EQ(a.successors(q, ltl::Label{"other"}), a.successors(q, ltl::Label{}));
  }
}

TEST(Translate, SafetyRejectsObstacleWords) {
  const BuchiAutomaton a = compile("G ! o");
  EXPECT_FALSE(accepts_lasso(a, LassoWord{{{}, {"o"}}, {{}}}));
  EXPECT_FALSE(accepts_lasso(a, LassoWord{{}, {{}, {"o"}}}));
  EXPECT_TRUE(accepts_lasso(a, LassoWord{{{}}, {{}}}));
}

TEST(Translate, ReachAvoid) {
  const BuchiAutomaton a = compile("G ! o & F g");
  EXPECT_TRUE(accepts_lasso(a, LassoWord{{{}}, {{"g"}}}));
  EXPECT_FALSE(accepts_lasso(a, LassoWord{{{"o"}}, {{"g"}}}));
  EXPECT_FALSE(accepts_lasso(a, LassoWord{{}, {{}}}));
}

TEST(Translate, UnknownStateIsRejected) {
  const BuchiAutomaton a = compile("F a");
  EXPECT_THROW(a.successors(static_cast<StateId>(a.num_states()), ApMask{0}), std::out_of_range);
}

TEST(Translate, RequiresNnfAndKnownPropositions) {
  EXPECT_THROW(translate(parse("! F a"), {"a"}), std::invalid_argument);
  EXPECT_THROW(translate(parse("F a"), {"b"}), std::invalid_argument);
}

TEST(Property, TranslationAgreesWithSemantics) {
  gen::Rng rng(3);
  const std::vector<std::string> props{"a", "b", "c"};
  for (int i = 0; i < 120; ++i) {
    const ltl::Formula f = gen::random_nnf(rng, 3, props);
    const BuchiAutomaton a = translate(f, props);
    const GeneralizedBuchi g = translate_generalized(f, props);
    for (int j = 0; j < 60; ++j) {
      const LassoWord w = gen::random_lasso(rng, props);
      const bool truth = ltl::eval_lasso(f, w);
      ASSERT_EQ(accepts_lasso(g, w), truth) << ltl::to_string(f);
      ASSERT_EQ(accepts_lasso(a, w), truth) << ltl::to_string(f);
    }
  }
}

TEST(Property, SuccessorsAreSortedAndUnique) {
  gen::Rng rng(5);
  const std::vector<std::string> props{"a", "b"};
  for (int i = 0; i < 50; ++i) {
    const BuchiAutomaton a = translate(gen::random_nnf(rng, 3, props), props);
    for (StateId q = 0; q < a.num_states(); ++q)
      for (ApMask m = 0; m < 4; ++m) {
        const auto s = a.successors(q, m);
        for (std::size_t k = 1; k < s.size(); ++k)
          EXPECT_LT(s[k - 1], s[k]);
      }
  }
}

TEST(Hoa, RoundTripOnTranslations) {
  gen::Rng rng(17);
  const std::vector<std::string> props{"a", "b", "c"};
  for (int i = 0; i < 60; ++i) {
    const BuchiAutomaton a = translate(gen::random_nnf(rng, 3, props), props);
    const BuchiAutomaton back = parse_hoa(serialize_hoa(a));
    EXPECT_TRUE(structurally_equal(a, back));
    EXPECT_EQ(back.ap_universe(), props);
  }
}

TEST(Hoa, RoundTripOnRandomAutomata) {
  gen::Rng rng(19);
  const std::vector<std::string> aps{"x", "y"};
  for (int i = 0; i < 40; ++i) {
    const BuchiAutomaton a = gen::random_automaton(rng, 1 + gen::pick(rng, 6), 12, aps);
    EXPECT_TRUE(structurally_equal(a, parse_hoa(serialize_hoa(a))));
  }
}

TEST(Hoa, MalformedInput) {
  EXPECT_THROW(parse_hoa(""), HoaError);
  EXPECT_THROW(parse_hoa("HOA: v1\nStates: 1\n--BODY--\n--END--\n"), HoaError);
  std::string hoa = serialize_hoa(compile("F a"));
  hoa.replace(hoa.find("Inf(0)"), 6, "Fin(0)");
  EXPECT_THROW(parse_hoa(hoa), HoaError);
}

TEST(Hoa, StructuralEqualityDetectsDifferences) {
  const BuchiAutomaton a = compile("F a");
  const BuchiAutomaton b = compile("G a", {"a"});
  EXPECT_FALSE(structurally_equal(a, b));
  EXPECT_TRUE(structurally_equal(a, a));
}
