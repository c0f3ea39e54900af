// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "generators.hpp"

#include "ltlshape/cli.hpp"
#include "ltlshape/learner.hpp"
#include "ltlshape/oracle.hpp"
#include "ltlshape/progress.hpp"
#include "ltlshape/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace ltlshape;
using namespace ltlshape::learner;
namespace fs = std::filesystem;

namespace {

// Pinned parameters and tolerances.
constexpr int kFormulas = 500;
constexpr int kLassosPerFormula = 200;
constexpr int kFormulaDepth = 3;
constexpr int kRandomAutomata = 500;

constexpr int kOracleSeeds = 10;
constexpr int kOracleSeedsRequired = 8;
constexpr double kOracleValueTolerance = 0.05;
constexpr double kOracleEpsilon = 0.5;
constexpr std::size_t kOracleSteps = 30000;

constexpr int kShapingSeeds = 10;
constexpr double kShapingRatio = 0.5;

constexpr int kOptionSeeds = 5;
constexpr double kOptionRatioLarge = 0.6;
constexpr double kOptionRatioSmall = 1.3;
constexpr std::size_t kOptionBudget = 40000;
constexpr std::size_t kOptionEvalEvery = 100;

constexpr int kDiscountSeeds = 10;

struct Outcome {
  bool pass;
  std::string detail;
};

std::vector<std::string> g_failed;

void report(int n, const char *name, const Outcome &o) {
  std::printf("criterion %d %s: %s  %s\n", n, name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass)
    g_failed.push_back(std::to_string(n));
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string fmt(const char *f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

Problem from_scenario(const scenario::Scenario &sc) { return make_problem(sc.grid, sc.task); }

// Plans produced anywhere in the run, checked by the safety criterion.
std::vector<std::pair<std::string, Plan>> g_plans;

void keep_plan(std::string tag, const Problem &p, const TrainResult &r) {
  g_plans.emplace_back(std::move(tag), extract_plan(r.q, p, 100));
}

// --- 1 ----------------------------------------------------------------------

std::vector<automaton::BuchiAutomaton> g_automata;

Outcome automaton_correctness() {
  gen::Rng rng(20261016);
  const std::vector<std::string> props{"a", "b", "c"};
  long disagreements = 0;
  std::string example;
  for (int i = 0; i < kFormulas; ++i) {
    const std::size_t np = 1 + gen::pick(rng, props.size());
    const std::vector<std::string> used(props.begin(), props.begin() + static_cast<long>(np));
    const ltl::Formula f = gen::random_nnf(rng, kFormulaDepth, used);
    const auto a = automaton::translate(f, used);
    for (int j = 0; j < kLassosPerFormula; ++j) {
      const ltl::LassoWord w = gen::random_lasso(rng, used);
      if (automaton::accepts_lasso(a, w) != ltl::eval_lasso(f, w)) {
        ++disagreements;
        if (example.empty())
          example = " e.g. " + ltl::to_string(f);
      }
    }
    g_automata.push_back(a);
  }
  return {disagreements == 0, std::to_string(kFormulas) + " formulas x " + std::to_string(kLassosPerFormula) +
                                  " words, disagreements=" + std::to_string(disagreements) + example};
}

// --- 2 ----------------------------------------------------------------------

// Levels recomputed from mutual reachability rather than from Tarjan.
std::vector<int> reference_levels(const automaton::BuchiAutomaton &a) {
  const std::size_t n = a.num_states();
  std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
  for (std::size_t q = 0; q < n; ++q)
    reach[q][q] = 1;
  for (const auto &e : a.edges())
    reach[e.src][e.dst] = 1;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (reach[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (reach[k][j])
            reach[i][j] = 1;
  auto same = [&](std::size_t x, std::size_t y) { return reach[x][y] && reach[y][x]; };

  // BFS over components: a component is adjacent to another when some edge
  // joins them.
  std::vector<int> level(n, progress::kUnreachable);
  std::deque<std::size_t> frontier;
  for (std::size_t q = 0; q < n; ++q)
    if (same(q, a.initial())) {
      level[q] = 0;
      frontier.push_back(q);
    }
  while (!frontier.empty()) {
    const std::size_t q = frontier.front();
    frontier.pop_front();
    for (std::size_t e : a.out_edges(static_cast<StateId>(q))) {
      const std::size_t d = a.edges()[e].dst;
      if (level[d] != progress::kUnreachable)
        continue;
      for (std::size_t r = 0; r < n; ++r)
        if (same(r, d)) {
          level[r] = level[q] + 1;
          frontier.push_back(r);
        }
    }
  }
  return level;
}

Outcome progress_annotation() {
  gen::Rng rng(7);
  for (int i = 0; i < kRandomAutomata; ++i)
    g_automata.push_back(gen::random_automaton(rng, 1 + gen::pick(rng, 10), 4 + gen::pick(rng, 16),
                                                   {"a", "b"}));
  long bad = 0;
  for (const auto &a : g_automata) {
    const auto ann = progress::annotate_progress(a);
    bool ok = ann.level_of(a.initial()) == 0 && ann.level == reference_levels(a);
    for (const auto &e : a.edges())
      if (ann.scc_id[e.src] == ann.scc_id[e.dst] && ann.level[e.src] != ann.level[e.dst])
        ok = false;
    bad += ok ? 0 : 1;
  }
  return {bad == 0, std::to_string(g_automata.size()) + " automata, mismatches=" + std::to_string(bad)};
}

// --- 3 ----------------------------------------------------------------------

Outcome oracle_equivalence() {
  const Problem p = from_scenario(scenario::grid_scenario(3, false));
  Hyperparams hp;
  hp.epsilon = kOracleEpsilon;
  hp.total_steps = kOracleSteps;
  const OracleResult o = value_iteration_oracle(p, make_reward_model(p, hp, {}), hp.gamma, 1e-10);
  if (!o.plan_length)
    return {false, "oracle policy never reaches the goal"};
  int passed = 0;
  std::string rows;
  for (int seed = 1; seed <= kOracleSeeds; ++seed) {
    hp.seed = static_cast<std::uint64_t>(seed);
    const TrainResult r = train(p, hp, {});
    const Plan plan = extract_plan(r.q, p, 100);
    const double v = initial_value(r.q, p);
    const double rel = std::abs(v - o.initial_value) / std::abs(o.initial_value);
    const bool ok = rel <= kOracleValueTolerance && plan.status == PlanStatus::Satisfied &&
                    plan.steps.size() == *o.plan_length;
    passed += ok ? 1 : 0;
    rows += " " + std::to_string(plan.steps.size()) + (ok ? "+" : "-");
    g_plans.emplace_back("oracle seed " + std::to_string(seed), plan);
  }
  return {passed >= kOracleSeedsRequired,
          fmt("oracle V0=%.2f length=%.0f", o.initial_value, static_cast<double>(*o.plan_length)) +
              " seeds passing=" + std::to_string(passed) + "/" + std::to_string(kOracleSeeds) + " lengths:" + rows};
}

// --- 5 ----------------------------------------------------------------------

Outcome shaping_benefit() {
  const Problem p = from_scenario(scenario::canonical_scenario(false));
  auto episodes_to_success = [&](progress::ShapingMode mode, const char *tag) {
    std::vector<double> out;
    for (int seed = 1; seed <= kShapingSeeds; ++seed) {
      Hyperparams hp;
      hp.seed = static_cast<std::uint64_t>(seed);
      const TrainResult r = train(p, hp, {50.0, mode, hp.gamma});
      // Never succeeding counts as the number of episodes run (a lower bound).
      out.push_back(static_cast<double>(r.first_success_episode ? *r.first_success_episode : r.episodes.size()));
      keep_plan(std::string(tag) + " seed " + std::to_string(seed), p, r);
    }
    return out;
  };
  const auto shaped = episodes_to_success(progress::ShapingMode::Proportional, "shaped");
  const auto bare = episodes_to_success(progress::ShapingMode::None, "terminal-only");
  const double ms = median(shaped);
  const double mb = median(bare);
  return {ms <= kShapingRatio * mb, fmt("median episodes to first success: shaped=%.1f terminal-only=%.1f", ms, mb) +
                                        fmt(" ratio=%.3f (limit %.2f)", ms / mb, kShapingRatio)};
}

// --- 6 ----------------------------------------------------------------------

double median_convergence(int n, bool options) {
  const Problem p = from_scenario(scenario::grid_scenario(n, options));
  std::vector<double> steps;
  for (int seed = 1; seed <= kOptionSeeds; ++seed) {
    Hyperparams hp;
    hp.seed = static_cast<std::uint64_t>(seed);
    hp.total_steps = kOptionBudget;
    hp.eval_every = kOptionEvalEvery;
    hp.stop_on_convergence = true;
    const TrainResult r = train(p, hp, {});
    // Unconverged runs count as the full budget (a lower bound).
    steps.push_back(static_cast<double>(r.converged_step ? *r.converged_step : kOptionBudget));
    keep_plan(std::to_string(n) + "x" + std::to_string(n) + (options ? " options" : " primitives") + " seed " +
                  std::to_string(seed),
              p, r);
  }
  return median(steps);
}

Outcome options_benefit() {
  const double large_opt = median_convergence(12, true);
  const double large_prim = median_convergence(12, false);
  const double small_opt = median_convergence(3, true);
  const double small_prim = median_convergence(3, false);
  const bool large_ok = large_opt <= kOptionRatioLarge * large_prim;
  const bool small_ok = small_opt >= small_prim || small_prim <= kOptionRatioSmall * small_opt;
  return {large_ok && small_ok,
          fmt("12x12 median steps options=%.0f primitives=%.0f", large_opt, large_prim) +
              fmt(" ratio=%.3f (limit %.2f)", large_opt / large_prim, kOptionRatioLarge) + (large_ok ? " ok" : " no") +
              fmt("; 3x3 options=%.0f primitives=%.0f", small_opt, small_prim) +
              fmt(" primitives/options=%.3f (limit %.2f)", small_prim / small_opt, kOptionRatioSmall) +
              (small_ok ? " ok" : " no")};
}

// --- 4 ----------------------------------------------------------------------

Outcome safety_exactness() {
  // One more task with a nested eventuality and both safety conjuncts.
  const auto sc = scenario::load_scenario(fs::path(LTLSHAPE_SCENARIO_DIR) / "sequenced_5x5.json");
  const Problem p = from_scenario(sc);
  for (int seed = 1; seed <= 3; ++seed) {
    Hyperparams hp;
    hp.seed = static_cast<std::uint64_t>(seed);
    keep_plan("sequenced seed " + std::to_string(seed), p, train(p, hp, {}));
  }
  long bad = 0;
  std::string first;
  for (const auto &[tag, plan] : g_plans)
    for (const auto &st : plan.steps)
      if (st.label.count("o") || st.label.count("col")) {
        ++bad;
        if (first.empty())
          first = " first: " + tag;
        break;
      }
  return {bad == 0, std::to_string(g_plans.size()) + " trained plans, plans entering o/col=" + std::to_string(bad) + first};
}

// --- 7 ----------------------------------------------------------------------

Outcome discount_pathology() {
  const Problem p = from_scenario(scenario::canonical_scenario(false));
  auto levels = [&](double gamma) {
    std::vector<double> out;
    for (int seed = 1; seed <= kDiscountSeeds; ++seed) {
      Hyperparams hp;
      hp.seed = static_cast<std::uint64_t>(seed);
      hp.gamma = gamma;
      const TrainResult r = train(p, hp, {});
      const Plan plan = extract_plan(r.q, p, 100);
      out.push_back(plan.max_progress_level);
      g_plans.emplace_back(fmt("gamma %.1f seed %.0f", gamma, static_cast<double>(seed)), plan);
    }
    return out;
  };
  const double low = median(levels(0.1));
  const double high = median(levels(0.9));
  return {low < high, fmt("median greedy max progress level: gamma 0.1 -> %.1f, gamma 0.9 -> %.1f", low, high)};
}

// --- 8 ----------------------------------------------------------------------

std::string without_wall_clock(const fs::path &csv) {
  std::ifstream in(csv);
  std::string line, out;
  while (std::getline(in, line))
    out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

std::string bytes(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome seeded_determinism() {
  const fs::path root = fs::temp_directory_path() / "ltlshape_acceptance_determinism";
  fs::remove_all(root);
  cli::RunConfig cfg;
  cfg.scenario = fs::path(LTLSHAPE_SCENARIO_DIR) / "canonical_5x5.json";
  cfg.seeds = {1, 2, 3};
  cfg.hp.total_steps = 4000;
  std::ostringstream log;
  for (const char *run : {"a", "b"}) {
    cfg.out = root / run;
    cli::run_train(cfg, log);
  }
  long differing = 0;
  for (auto seed : cfg.seeds) {
    const std::string s = std::to_string(seed);
    differing += without_wall_clock(root / "a" / ("metrics_seed" + s + ".csv")) !=
                 without_wall_clock(root / "b" / ("metrics_seed" + s + ".csv"));
    differing += bytes(root / "a" / ("q_seed" + s + ".csv")) != bytes(root / "b" / ("q_seed" + s + ".csv"));
    differing += bytes(root / "a" / ("plan_seed" + s + ".json")) != bytes(root / "b" / ("plan_seed" + s + ".json"));
  }
  const bool seeds_differ = bytes(root / "a" / "q_seed1.csv") != bytes(root / "a" / "q_seed2.csv");
  fs::remove_all(root);
  return {differing == 0 && seeds_differ,
          "3 seeds x 2 repeats, differing files=" + std::to_string(differing) +
              (seeds_differ ? "" : " (distinct seeds produced identical output)")};
}

template <typename F> Outcome timed(F &&f, double &seconds) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o = f();
  seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  char buf[32];
  std::snprintf(buf, sizeof buf, " [%.1fs]", seconds);
  o.detail += buf;
  return o;
}

} // namespace

int main() {
  double s = 0;
  report(1, "automaton correctness", timed(automaton_correctness, s));
  report(2, "progress annotation", timed(progress_annotation, s));
  report(3, "oracle equivalence", timed(oracle_equivalence, s));
  // Criterion 4 inspects every plan produced by 3, 5, 6 and 7, so it runs last
  // but prints in order.
  const Outcome c5 = timed(shaping_benefit, s);
  const Outcome c6 = timed(options_benefit, s);
  const Outcome c7 = timed(discount_pathology, s);
  const Outcome c8 = timed(seeded_determinism, s);
  report(4, "safety exactness", timed(safety_exactness, s));
  report(5, "shaping benefit", c5);
  report(6, "options benefit", c6);
  report(7, "discount pathology", c7);
  report(8, "seeded determinism", c8);
  if (g_failed.empty()) {
    std::printf("all criteria passed\n");
    return 0;
  }
  std::string list;
  for (const auto &f : g_failed)
    list += (list.empty() ? "" : ",") + f;
  std::printf("failed criteria: %s\n", list.c_str());
  return 1;
}
