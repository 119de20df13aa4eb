#include <benchmark/benchmark.h>

#include <random>

#include "outage/io.hpp"
#include "outage/planner.hpp"
#include "outage/scheduler.hpp"
#include "outage/search.hpp"

using namespace outage;

namespace {

GeneratedInstance desk_instance(int plants) {
  GeneratorParams gp;
  gp.I = plants;
  gp.K = 2;
  gp.H = 20;
  gp.S = 3;
  gp.seed = 7;
  return generate_instance(gp);
}

std::vector<PwlCost> exact_costs(const Instance& inst) {
  std::vector<PwlCost> exact;
  for (int t = 0; t < inst.steps(); ++t) exact.push_back(build_type1_cost(inst, t));
  return exact;
}

}  // namespace

static void BM_ApproxEval(benchmark::State& state) {
  const auto g = desk_instance(4);
  const ApproxCost approx(exact_costs(g.instance), default_breakpoints(g.instance), type2_reach(g.instance));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 2000.0);
  const int T = g.instance.steps();
  int t = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(approx(t, u(rng)));
    t = (t + 1) % T;
  }
}
BENCHMARK(BM_ApproxEval);

static void BM_ExactEval(benchmark::State& state) {
  const auto g = desk_instance(4);
  const auto exact = exact_costs(g.instance);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 2000.0);
  int t = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(exact[t](u(rng)));
    t = (t + 1) % static_cast<int>(exact.size());
  }
}
BENCHMARK(BM_ExactEval);

static void BM_Scheduler(benchmark::State& state) {
  const auto g = desk_instance(static_cast<int>(state.range(0)));
  SchedulerConfig sc;
  sc.node_limit = 20000;
  sc.hard_node_limit = 1000000;
  for (auto _ : state) benchmark::DoNotOptimize(solve_schedule(g.instance, sc).status);
}
BENCHMARK(BM_Scheduler)->Arg(2)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

static void BM_DeltaEvaluate(benchmark::State& state) {
  const auto g = desk_instance(static_cast<int>(state.range(0)));
  const Instance& inst = g.instance;
  const SearchModel model(inst, ApproxCost(exact_costs(inst), default_breakpoints(inst), type2_reach(inst)));
  SchedulerConfig sc;
  sc.node_limit = 20000;
  sc.hard_node_limit = 1000000;
  const auto sr = solve_schedule(inst, sc);
  std::vector<PlannerResult> plans;
  for (int i = 0; i < inst.type2_count(); ++i) plans.push_back(plan_and_raise(inst, sr.schedule, i, {}));
  const SearchState st = model.make_state(sr.schedule, plans);
  const MoveSampler sampler(inst, st.schedule, 20);
  if (sampler.empty()) {
    state.SkipWithError("no moves");
    return;
  }
  std::mt19937_64 rng(3);
  for (auto _ : state) {
    const Move mv = sampler.sample(rng);
    if (model.check_move_feasible(st, mv)) benchmark::DoNotOptimize(model.delta_evaluate(st, mv));
  }
}
BENCHMARK(BM_DeltaEvaluate)->Arg(2)->Arg(4)->Arg(6);

static void BM_FullCost(benchmark::State& state) {
  const auto g = desk_instance(4);
  const Instance& inst = g.instance;
  const SearchModel model(inst, ApproxCost(exact_costs(inst), default_breakpoints(inst), type2_reach(inst)));
  std::vector<PlannerResult> plans;
  for (int i = 0; i < inst.type2_count(); ++i) plans.push_back(plan_and_raise(inst, g.witness, i, {}));
  const SearchState st = model.make_state(g.witness, plans);
  for (auto _ : state) benchmark::DoNotOptimize(model.full_cost(st));
}
BENCHMARK(BM_FullCost);
BENCHMARK_MAIN();
