#include "outage/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <string>
#include <ostream>

#include "outage/modulation.hpp"
#include "outage/planner.hpp"

namespace outage {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

namespace {

struct Attempt {
  bool scheduled = false;
  ScheduleStatus status = ScheduleStatus::kTimeout;
  bool planned = false;
  Schedule schedule;
  std::vector<PlannerResult> plans;
};

// Phase 1 plus the first plan; reruns with tighter fuel bounds while the planner rejects the schedule.
Attempt schedule_and_plan(const Instance& inst, SchedulerConfig sc, int attempts, PhaseTimings& timings,
                          const std::function<void(const std::string&)>& log) {
  Attempt a;
  for (int attempt = 0; attempt < std::max(1, attempts) && !a.planned; ++attempt) {
    sc.fuel_margin = attempt == 0 ? 0.0 : 0.05 * (1 << (attempt - 1));
    auto t0 = Clock::now();
    SchedulerResult sr = solve_schedule(inst, sc);
    timings.scheduler += seconds_since(t0);
    a.status = sr.status;
    log("scheduler: seed " + std::to_string(sc.rng_seed) + " margin " + std::to_string(sc.fuel_margin) +
        " status " + std::to_string(static_cast<int>(sr.status)) + " nodes " + std::to_string(sr.nodes));
    if (sr.status != ScheduleStatus::kFeasible) break;
    a.scheduled = true;
    t0 = Clock::now();
    a.schedule = sr.schedule;
    a.plans.clear();
    a.planned = true;
    for (int i = 0; i < inst.type2_count(); ++i) {
      a.plans.push_back(plan_and_raise(inst, a.schedule, i, {}));
      a.planned = a.planned && a.plans.back().feasible;
    }
    timings.planner += seconds_since(t0);
    if (!a.planned) log("planner: schedule rejected, tightening fuel bounds");
  }
  return a;
}

}  // namespace

PipelineResult run_pipeline(const Instance& inst, const PipelineConfig& cfg) {
  const auto start = Clock::now();
  PipelineResult out;
  const std::function<void(const std::string&)> log = [&](const std::string& line) {
    if (cfg.log) *cfg.log << line << '\n';
  };

  std::vector<PwlCost> exact;
  for (int t = 0; t < inst.steps(); ++t) exact.push_back(build_type1_cost(inst, t));
  const int breakpoints = cfg.breakpoints > 0 ? cfg.breakpoints : std::max(2, default_breakpoints(inst));
  const SearchModel model(inst, ApproxCost(exact, breakpoints, type2_reach(inst)), cfg.mode);

  ModulationConfig mc;
  mc.mode = cfg.mode;
  mc.refuel_quantum = cfg.refuel_quantum;
  auto modulate = [&](const SearchState& state) {
    const auto t0 = Clock::now();
    ModulationOutcome mo = run_modulation(inst, state.schedule, state.plans, mc);
    out.timings.modulation += seconds_since(t0);
    log("modulation: overproduced steps " + std::to_string(mo.overproduced_before) + " feasible " +
        std::to_string(mo.feasible));
    return mo;
  };
  auto finish = [&](ModulationOutcome mo) {
    out.overproduced_steps = mo.overproduced_before;
    out.solution = std::move(mo.solution);
    out.violations = check_feasibility(inst, out.solution);
    out.objective = compute_objective(inst, out.solution, cfg.mode);
    out.status = out.violations.empty() ? PipelineStatus::kFeasible : PipelineStatus::kInfeasible;
  };

  // Restarts with a new scheduler seed when phase 3 cannot clear the overproduction.
  const int restarts = std::max(1, cfg.pipeline_restarts);
  for (int round = 0; round < restarts; ++round) {
    if (round > 0 && !cfg.iteration_mode && seconds_since(start) >= 0.9 * cfg.time_budget) break;
    SchedulerConfig sc;
    sc.refuel_quantum = cfg.refuel_quantum;
    sc.rng_seed = cfg.seed + static_cast<std::uint64_t>(round) * 7919;
    if (cfg.iteration_mode) {
      sc.node_limit = cfg.scheduler_nodes;
      sc.hard_node_limit = cfg.scheduler_nodes * 50;
    } else {
      const double left = cfg.time_budget - seconds_since(start);
      sc.time_budget = std::max(1e-3, std::min(left, cfg.time_budget * cfg.scheduler_share));
      sc.hard_time_budget = std::max(sc.time_budget, left);
    }
    Attempt a = schedule_and_plan(inst, sc, cfg.schedule_attempts, out.timings, log);
    if (round == 0) out.scheduler_status = a.status;
    if (!a.scheduled) {
      if (round == 0) {
        out.status = PipelineStatus::kSchedulerFailed;
        return out;
      }
      continue;
    }

    // Phase 2.
    const auto t_search = Clock::now();
    SearchState initial = model.make_state(a.schedule, a.plans);
    SearchState state = initial;
    if (round == 0) out.search_initial = initial.cost;
    double final_cost = initial.cost;
    std::uint64_t iterations = 0;
    if (a.planned) {
      SaParams sa = cfg.sa;
      sa.seed = cfg.seed + static_cast<std::uint64_t>(round);
      sa.telemetry = cfg.log;
      if (cfg.iteration_mode) {
        sa.use_clock = false;
        sa.max_iterations = cfg.search_iterations;
      } else {
        // Leave a small reserve for phase 3.
        sa.time_budget = 0.95 * cfg.time_budget - seconds_since(start);
      }
      AnnealResult ar = anneal(model, initial, sa);
      state = std::move(ar.best);
      final_cost = state.cost;
      iterations = ar.iterations;
      log("search: iterations " + std::to_string(ar.iterations) + " accepted " + std::to_string(ar.accepted) +
          " restarts " + std::to_string(ar.restarts));
    }
    out.timings.search += seconds_since(t_search);

    // Phase 3, falling back to the pre-search state.
    ModulationOutcome mo = modulate(state);
    if (!mo.feasible && a.planned) {
      ModulationOutcome again = modulate(initial);
      if (again.feasible) {
        mo = std::move(again);
        final_cost = initial.cost;
      }
    }
    // Later rounds replace the first result only when they succeed.
    if (round == 0 || mo.feasible) {
      out.search_initial = initial.cost;
      out.search_final = final_cost;
      out.search_iterations = iterations;
      finish(std::move(mo));
    }
    if (out.status == PipelineStatus::kFeasible) break;
  }
  return out;
}

}  // namespace outage
