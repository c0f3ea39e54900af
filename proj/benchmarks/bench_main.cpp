#include "ltlshape/learner.hpp"
#include "ltlshape/progress.hpp"
#include "ltlshape/scenario.hpp"

#include <benchmark/benchmark.h>

using namespace ltlshape;

namespace {

const char *const kTasks[] = {
    "F a & F b & G ! c",
    "F (a & F (b & F c))",
    "G F a & G F b",
    "(a U b) & G (b -> X ! a) & F c",
};

void BM_Translate(benchmark::State &state) {
  const ltl::Formula f = ltl::to_nnf(ltl::parse(kTasks[state.range(0)]));
  const std::vector<std::string> aps = ltl::atomic_props(f);
  std::size_t states = 0;
  for (auto _ : state) {
    auto a = automaton::translate(f, aps);
    states = a.num_states();
    benchmark::DoNotOptimize(a);
  }
  state.counters["states"] = static_cast<double>(states);
}
BENCHMARK(BM_Translate)->DenseRange(0, 3);

void BM_Annotate(benchmark::State &state) {
  const ltl::Formula f = ltl::to_nnf(ltl::parse(kTasks[state.range(0)]));
  const auto a = automaton::translate(f, ltl::atomic_props(f));
  for (auto _ : state)
    benchmark::DoNotOptimize(progress::annotate_progress(a));
}
BENCHMARK(BM_Annotate)->DenseRange(0, 3);

void BM_AcceptsLasso(benchmark::State &state) {
  const ltl::Formula f = ltl::to_nnf(ltl::parse(kTasks[1]));
  const auto a = automaton::translate(f, ltl::atomic_props(f));
  const ltl::LassoWord w{{{}, {"a"}, {}, {"b"}}, {{"c"}, {}}};
  for (auto _ : state)
    benchmark::DoNotOptimize(automaton::accepts_lasso(a, w));
}
BENCHMARK(BM_AcceptsLasso);

// Environment steps per second, replay included.
void BM_Train(benchmark::State &state) {
  const auto sc = scenario::grid_scenario(static_cast<int>(state.range(0)), state.range(1) != 0);
  const auto p = learner::make_problem(sc.grid, sc.task);
  learner::Hyperparams hp;
  hp.total_steps = 2000;
  hp.eval_every = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(learner::train(p, hp, {}));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * hp.total_steps));
}
BENCHMARK(BM_Train)->Args({5, 0})->Args({5, 1})->Args({12, 0})->Args({12, 1})->Unit(benchmark::kMillisecond);

void BM_ExtractPlan(benchmark::State &state) {
  const auto sc = scenario::canonical_scenario(false);
  const auto p = learner::make_problem(sc.grid, sc.task);
  learner::Hyperparams hp;
  hp.total_steps = 3000;
  const auto r = learner::train(p, hp, {});
  for (auto _ : state)
    benchmark::DoNotOptimize(learner::extract_plan(r.q, p, 100));
}
BENCHMARK(BM_ExtractPlan);

} // namespace
BENCHMARK_MAIN();
