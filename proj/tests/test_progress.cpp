#include "generators.hpp"

#include "ltlshape/graph.hpp"
#include "ltlshape/progress.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace ltlshape;
using namespace ltlshape::progress;
using automaton::BuchiAutomaton;
using automaton::Guard;

namespace {

BuchiAutomaton compile(const char *text) {
  const ltl::Formula f = ltl::parse(text);
  return automaton::translate(ltl::to_nnf(f), ltl::atomic_props(f));
}

BuchiAutomaton raw(std::size_t n, std::vector<std::pair<automaton::StateId, automaton::StateId>> edges) {
  std::vector<automaton::Edge> es;
  for (auto [s, d] : edges)
    es.push_back({s, Guard::truth(), d});
  return BuchiAutomaton({}, n, 0, std::move(es), std::vector<bool>(n, false));
}

} // namespace

TEST(Graph, ReachabilityAndComponents) {
  const graph::Adjacency g{{1}, {2}, {1}, {0}};
  const auto r = graph::reachable_from(g, 0);
  EXPECT_EQ(r, (std::vector<char>{1, 1, 1, 0}));
  const auto c = graph::strongly_connected_components(g);
  EXPECT_EQ(c.count, 3U);
  EXPECT_EQ(c.component[1], c.component[2]);
}

TEST(Graph, DeepChainDoesNotOverflow) {
  graph::Adjacency g(200000);
  for (graph::Vertex v = 0; v + 1 < g.size(); ++v)
    g[v].push_back(v + 1);
  EXPECT_EQ(graph::strongly_connected_components(g).count, 200000U);
}

TEST(Tarjan, Singleton) {
  const auto d = tarjan_scc(raw(1, {}));
  EXPECT_EQ(d.count, 1U);
  EXPECT_TRUE(d.condensation.empty());
}

TEST(Tarjan, TwoCycle) { EXPECT_EQ(tarjan_scc(raw(2, {{0, 1}, {1, 0}})).count, 1U); }

TEST(Tarjan, FinallyHasTwoComponents) {
  const auto d = tarjan_scc(compile("F a"));
  EXPECT_EQ(d.count, 2U);
  EXPECT_EQ(d.condensation.size(), 1U);
}

TEST(Annotate, True) {
  const auto ann = annotate_progress(compile("true"));
  EXPECT_EQ(ann.num_levels, 1);
  for (int l : ann.level)
    EXPECT_EQ(l, 0);
}

TEST(Annotate, Finally) {
  const BuchiAutomaton a = compile("F a");
  const auto ann = annotate_progress(a);
  EXPECT_EQ(ann.num_levels, 2);
  for (automaton::StateId q = 0; q < a.num_states(); ++q)
    EXPECT_EQ(ann.level_of(q), a.is_accepting(q) ? 1 : 0);
}

TEST(Annotate, TwoEventualitiesShareOneLevel) {
  // The initial state has a direct edge on a & b into the accepting sink,
  // so the sink and both half-way states sit one BFS step from level 0.
  const BuchiAutomaton a = compile("F a & F b");
  const auto ann = annotate_progress(a);
  ASSERT_EQ(a.num_states(), 4U);
  EXPECT_EQ(ann.num_levels, 2);
  EXPECT_EQ(ann.level_of(a.initial()), 0);
  for (automaton::StateId q = 0; q < a.num_states(); ++q)
    if (q != a.initial())
      EXPECT_EQ(ann.level_of(q), 1);
}

TEST(Annotate, ChainGivesGradation) {
  const BuchiAutomaton a = raw(3, {{0, 0}, {0, 1}, {1, 1}, {1, 2}, {2, 2}});
  const auto ann = annotate_progress(a);
  EXPECT_EQ(ann.level, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(ann.max_level(), 2);
}

TEST(Annotate, UnreachableStates) {
  const auto ann = annotate_progress(raw(3, {{0, 1}, {2, 0}}));
  EXPECT_EQ(ann.level[2], kUnreachable);
  EXPECT_EQ(ann.unreachable, std::vector<automaton::StateId>{2});
  EXPECT_EQ(ann.num_levels, 2);
}

TEST(Property, LevelsRespectCondensationOrder) {
  gen::Rng rng(23);
  const std::vector<std::string> aps{"a", "b"};
  for (int i = 0; i < 200; ++i) {
    const BuchiAutomaton a = gen::random_automaton(rng, 1 + gen::pick(rng, 8), 14, aps);
    const auto ann = annotate_progress(a);
    const auto d = tarjan_scc(a);
    EXPECT_EQ(ann.level_of(a.initial()), 0);
    for (const auto &e : a.edges()) {
      EXPECT_LE(d.scc_id[e.src], d.scc_id[e.dst]);
      if (ann.level[e.src] != kUnreachable) {
        ASSERT_NE(ann.level[e.dst], kUnreachable);
        EXPECT_LE(ann.level[e.dst], ann.level[e.src] + 1);
        if (d.scc_id[e.src] == d.scc_id[e.dst])
          EXPECT_EQ(ann.level[e.dst], ann.level[e.src]);
      }
    }
    for (std::size_t k = 1; k < d.condensation.size(); ++k)
      EXPECT_LT(d.condensation[k - 1], d.condensation[k]);
    for (auto [x, y] : d.condensation)
      EXPECT_LT(x, y);
  }
}

TEST(Dump, RoundTrip) {
  gen::Rng rng(29);
  for (int i = 0; i < 50; ++i) {
    const auto ann = annotate_progress(gen::random_automaton(rng, 1 + gen::pick(rng, 7), 10, {"a"}));
    const auto back = parse_dump(dump(ann));
    EXPECT_EQ(back.level, ann.level);
    EXPECT_EQ(back.scc_id, ann.scc_id);
    EXPECT_EQ(back.condensation, ann.condensation);
    EXPECT_EQ(back.num_levels, ann.num_levels);
    EXPECT_EQ(back.unreachable, ann.unreachable);
  }
}

TEST(Shaping, Examples) {
  ProgressAnnotation ann;
  ann.level = {0, 1, 2};
  ann.num_levels = 3;
  ShapingConfig prop;
  EXPECT_DOUBLE_EQ(shaped_reward(2, ann, prop, 1), 100.0);
  EXPECT_DOUBLE_EQ(shaped_reward(0, ann, prop, 0), 0.0);
  ShapingConfig pot{50.0, ShapingMode::Potential, 0.9};
  EXPECT_DOUBLE_EQ(shaped_reward(0, ann, pot, 0), 0.0);
  EXPECT_DOUBLE_EQ(shaped_reward(1, ann, pot, 0), 45.0);
  ShapingConfig none{50.0, ShapingMode::None, 0.9};
  EXPECT_DOUBLE_EQ(shaped_reward(2, ann, none, 0), 0.0);
}

TEST(Shaping, PotentialTelescopesOnCycles) {
  // With gamma = 1 the potential terms around any closed walk cancel.
  ProgressAnnotation ann;
  ann.level = {0, 3, 1, 2};
  ann.num_levels = 4;
  const ShapingConfig cfg{50.0, ShapingMode::Potential, 1.0};
  const std::vector<automaton::StateId> walk{0, 2, 1, 3, 3, 2, 0};
  double total = 0.0;
  for (std::size_t k = 1; k < walk.size(); ++k)
    total += shaped_reward(walk[k], ann, cfg, walk[k - 1]);
  EXPECT_DOUBLE_EQ(total, 0.0);
}

TEST(Shaping, ConfigValidation) {
  EXPECT_THROW((ShapingConfig{0.0, ShapingMode::Proportional, 0.9}.validate()), std::invalid_argument);
  EXPECT_THROW((ShapingConfig{50.0, ShapingMode::Proportional, 0.0}.validate()), std::invalid_argument);
  EXPECT_NO_THROW((ShapingConfig{50.0, ShapingMode::Potential, 1.0}.validate()));
  EXPECT_EQ(parse_shaping_mode("potential"), ShapingMode::Potential);
  EXPECT_EQ(to_string(ShapingMode::None), "none");
  EXPECT_THROW(parse_shaping_mode("linear"), std::invalid_argument);
}
