#include "ltlshape/scenario.hpp"
#include "ltlshape/world.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace ltlshape;
using namespace ltlshape::world;

namespace {

GridSpec canonical(bool options = false) { return scenario::canonical_scenario(options).grid; }

JointState at(std::initializer_list<Cell> cells) { return JointState{std::vector<Cell>(cells)}; }

JointOption fresh(std::vector<std::size_t> options) {
  const std::size_t n = options.size();
  return JointOption{std::move(options), std::vector<char>(n, 0), std::vector<int>(n, 0)};
}

} // namespace

TEST(Grid, CanonicalLayout) {
  const GridSpec g = canonical();
  EXPECT_EQ(g.width(), 5);
  EXPECT_EQ(g.num_agents(), 2U);
  EXPECT_TRUE(g.is_obstacle({2, 2}));
  EXPECT_EQ(g.starts()[0], (Cell{0, 0}));
  EXPECT_EQ(g.starts()[1], (Cell{4, 0}));
  EXPECT_EQ(g.propositions(), (std::vector<std::string>{"col", "g1", "g2", "o"}));
  EXPECT_EQ(scenario::canonical_scenario().task, "F g1 & F g2 & G ! o & G ! col");
}

TEST(Grid, ConstructionErrors) {
  const auto menu = std::vector<std::vector<OptionDef>>{standard_menu(false, std::nullopt)};
  EXPECT_THROW(GridSpec(3, 3, {}, {}, {{3, 0}}, {std::nullopt}, menu), std::invalid_argument);
  EXPECT_THROW(GridSpec(3, 3, {{0, 0}}, {}, {{0, 0}}, {std::nullopt}, menu), std::invalid_argument);
  EXPECT_THROW(GridSpec(3, 3, {}, {{"o", std::nullopt, {{1, 1}}}}, {{0, 0}}, {std::nullopt}, menu),
               std::invalid_argument);
  EXPECT_THROW(GridSpec(3, 3, {}, {}, {{0, 0}}, {std::nullopt}, {{}}), std::invalid_argument);
  EXPECT_THROW(standard_menu(true, std::nullopt), std::invalid_argument);
}

TEST(Label, Examples) {
  const GridSpec g = canonical();
  EXPECT_EQ(label(g, at({{1, 0}, {3, 0}})), ltl::Label{});
  EXPECT_EQ(label(g, at({{4, 4}, {3, 0}})), ltl::Label{"g1"});
  EXPECT_EQ(label(g, at({{2, 2}, {2, 2}})), (ltl::Label{"col", "o"}));
  // g2 is bound to agent 1 only.
  EXPECT_EQ(label(g, at({{0, 4}, {3, 0}})), ltl::Label{});
  EXPECT_EQ(label(g, at({{1, 1}, {0, 4}})), ltl::Label{"g2"});
  EXPECT_THROW(validate(g, at({{5, 0}, {0, 0}})), std::invalid_argument);
  EXPECT_THROW(validate(g, at({{0, 0}})), std::invalid_argument);
}

TEST(Label, GlobalBindingMatchesAnyAgent) {
  const GridSpec g(3, 1, {}, {{"p", std::nullopt, {{2, 0}}}}, {{0, 0}, {1, 0}}, {std::nullopt, std::nullopt},
                   {standard_menu(false, std::nullopt), standard_menu(false, std::nullopt)});
  EXPECT_EQ(label(g, at({{2, 0}, {1, 0}})), ltl::Label{"p"});
  EXPECT_EQ(label(g, at({{0, 0}, {2, 0}})), ltl::Label{"p"});
}

TEST(Options, Executability) {
  const GridSpec g = canonical(true);
  ASSERT_EQ(g.options(0).size(), 7U);
  // At its goal: no go-to-goal; far from the obstacle and the other agent.
  EXPECT_EQ(executable_options(g, at({{4, 4}, {0, 0}}), 0), (std::vector<std::size_t>{0, 1, 2, 3, 4}));
  // Open space, not at goal: avoidance unavailable.
  EXPECT_EQ(executable_options(g, at({{0, 0}, {4, 0}}), 0), (std::vector<std::size_t>{0, 1, 2, 3, 4, 5}));
  // Adjacent to the obstacle: everything.
  EXPECT_EQ(executable_options(g, at({{1, 2}, {4, 0}}), 0).size(), 7U);
}

TEST(Options, GoToGoalPolicyAndTermination) {
  const GridSpec g = canonical(true);
  const OptionDef go = g.options(0)[5];
  ASSERT_EQ(go.kind, OptionKind::GoToGoal);
  const JointState s = at({{0, 0}, {4, 0}});
  EXPECT_EQ(option_policy(g, s, 0, go), Move::Up);
  EXPECT_FALSE(option_terminates(g, s, 0, go, 1));
  EXPECT_TRUE(option_terminates(g, at({{4, 4}, {4, 0}}), 0, go, 3));
}

TEST(Options, AvoidanceIncreasesClearance) {
  const GridSpec g = canonical(true);
  const OptionDef avoid = g.options(0)[6];
  const JointState s = at({{1, 2}, {4, 0}});
  EXPECT_EQ(clearance(g, s, 0), 1);
  const StepResult r = step(g, s, fresh({6, 4}));
  EXPECT_GT(clearance(g, r.next, 0), 1);
  EXPECT_TRUE(r.terminated[0]);
  EXPECT_TRUE(option_terminates(g, r.next, 0, avoid, 1));
}

TEST(JointOptions, Counts) {
  const GridSpec g = canonical();
  const JointState s = g.start_state();
  EXPECT_EQ(num_joint_options(g), 25U);
  EXPECT_EQ(permissible_joint_options(g, s, nullptr).size(), 25U);

  const GridSpec full = canonical(true);
  JointOption one_active = fresh({5, 0});
  one_active.active[0] = 1;
  const auto some = permissible_joint_options(full, s, &one_active);
  ASSERT_EQ(some.size(), 6U); // agent 1 at (4,0): 5 primitives + go-to-goal
  for (const auto &jo : some) {
    EXPECT_EQ(jo.options[0], 5U);
    EXPECT_TRUE(jo.active[0]);
  }
  JointOption both = fresh({5, 5});
  both.active = {1, 1};
  EXPECT_EQ(permissible_joint_options(full, s, &both).size(), 1U);
}

TEST(JointOptions, IdsRoundTripAndOrder) {
  const GridSpec g = canonical(true);
  for (std::uint32_t id = 0; id < num_joint_options(g); ++id)
    EXPECT_EQ(joint_option_id(g, decode_joint_option(g, id)), id);
  EXPECT_EQ(joint_option_id(g, {1, 0}), 1U);
  EXPECT_EQ(joint_option_id(g, {0, 1}), 7U);
  const auto all = permissible_joint_options(g, at({{1, 2}, {3, 2}}), nullptr);
  for (std::size_t k = 1; k < all.size(); ++k)
    EXPECT_LT(joint_option_id(g, all[k - 1].options), joint_option_id(g, all[k].options));
}

TEST(Step, PrimitiveMovesAndBoundaries) {
  const GridSpec g = canonical();
  auto r = step(g, at({{0, 0}, {4, 0}}), fresh({0, 4}));
  EXPECT_EQ(r.next.positions[0], (Cell{0, 1}));
  EXPECT_EQ(r.next.positions[1], (Cell{4, 0}));
  EXPECT_TRUE(r.terminated[0] && r.terminated[1]);

  r = step(g, at({{0, 4}, {4, 0}}), fresh({0, 1}));
  EXPECT_EQ(r.next.positions[0], (Cell{0, 4}));
  EXPECT_EQ(r.moves[0], Move::Stay);
  EXPECT_EQ(r.next.positions[1], (Cell{4, 0}));

  // Moving into the obstacle resolves to Stay.
  r = step(g, at({{1, 2}, {4, 0}}), fresh({3, 4}));
  EXPECT_EQ(r.next.positions[0], (Cell{1, 2}));
}

TEST(Step, CollisionsAreAllowedAndLabelled) {
  const GridSpec g = canonical();
  const auto r = step(g, at({{1, 0}, {3, 0}}), fresh({3, 2}));
  EXPECT_EQ(r.next.positions[0], r.next.positions[1]);
  EXPECT_TRUE(label(g, r.next).count("col"));
}

TEST(Step, UninitiatedOptionIsAContractViolation) {
  const GridSpec g = canonical(true);
  EXPECT_THROW(step(g, at({{4, 4}, {4, 0}}), fresh({5, 4})), ContractViolation);
  EXPECT_THROW(step(g, at({{0, 0}, {4, 0}}), fresh({6, 4})), ContractViolation);
  JointOption ok = fresh({5, 4});
  ok.active[0] = 1;
  EXPECT_NO_THROW(step(g, at({{4, 4}, {4, 0}}), ok));
}

TEST(Scenario, JsonRoundTrip) {
  for (bool options : {false, true}) {
    const scenario::Scenario s = scenario::grid_scenario(6, options);
    const scenario::Scenario back = scenario::parse_scenario(scenario::to_json(s));
    EXPECT_EQ(back.name, s.name);
    EXPECT_EQ(back.task, s.task);
    EXPECT_EQ(back.grid.obstacles(), s.grid.obstacles());
    EXPECT_EQ(back.grid.starts(), s.grid.starts());
    EXPECT_EQ(back.grid.goals(), s.grid.goals());
    EXPECT_EQ(back.grid.menus(), s.grid.menus());
    EXPECT_EQ(back.grid.propositions(), s.grid.propositions());
  }
}

TEST(Scenario, GeneratedLayouts) {
  EXPECT_EQ(scenario::grid_scenario(3, false).grid.obstacles(), (std::vector<Cell>{{1, 1}}));
  EXPECT_EQ(scenario::grid_scenario(12, false).grid.obstacles().size(), 4U);
  EXPECT_EQ(scenario::grid_scenario(12, true).grid.options(1).size(), 7U);
}

TEST(Scenario, ShippedFilesLoad) {
  const std::filesystem::path dir = LTLSHAPE_SCENARIO_DIR;
  std::size_t n = 0;
  for (const auto &entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".json")
      continue;
    EXPECT_NO_THROW(scenario::load_scenario(entry.path())) << entry.path();
    ++n;
  }
  EXPECT_GE(n, 4U);
  const auto canon = scenario::load_scenario(dir / "canonical_5x5.json");
  EXPECT_EQ(canon.grid.starts(), scenario::canonical_scenario().grid.starts());
  EXPECT_EQ(canon.task, scenario::canonical_scenario().task);
}

TEST(Scenario, MalformedInput) {
  EXPECT_THROW(scenario::parse_scenario("{"), std::invalid_argument);
  EXPECT_THROW(scenario::parse_scenario(R"({"width": 3})"), std::invalid_argument);
  EXPECT_THROW(scenario::parse_scenario(
                   R"({"width":3,"height":3,"agents":[{"start":[0,0]}],"options":"full","task":"true"})"),
               std::invalid_argument);
  EXPECT_THROW(scenario::load_scenario("/nonexistent/scenario.json"), std::invalid_argument);
}
