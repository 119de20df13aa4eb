#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "outage/evaluator.hpp"
#include "outage/model.hpp"
#include "outage/scheduler.hpp"
#include "outage/search.hpp"

namespace outage {

struct PipelineConfig {
  double time_budget = 60.0;  // seconds, all phases
  double scheduler_share = 1.0 / 6.0;
  std::uint64_t seed = 1;
  double refuel_quantum = 1000.0;
  int breakpoints = 0;  // 0 = 3 per type-2 plant
  SaParams sa;          // seed, budget and telemetry are set by the pipeline
  ObjectiveMode mode = ObjectiveMode::kAsPrinted;
  // Node and iteration limits replace the clock, so equal inputs give equal output.
  bool iteration_mode = false;
  std::uint64_t scheduler_nodes = 20000;
  std::uint64_t search_iterations = 2000;
  int schedule_attempts = 4;  // scheduler reruns with tighter fuel bounds if planning fails
  int pipeline_restarts = 4;  // fresh scheduler seeds if phase 3 fails
  std::ostream* log = nullptr;
};

struct PhaseTimings {
  double scheduler = 0.0;
  double planner = 0.0;
  double search = 0.0;
  double modulation = 0.0;
};

enum class PipelineStatus { kFeasible, kInfeasible, kSchedulerFailed };

struct PipelineResult {
  PipelineStatus status = PipelineStatus::kSchedulerFailed;
  ScheduleStatus scheduler_status = ScheduleStatus::kTimeout;
  Solution solution;  // empty production when the scheduler failed
  std::vector<Violation> violations;
  double objective = 0.0;
  double search_initial = 0.0;  // approximate objective after the first plan
  double search_final = 0.0;    // best approximate objective found by the search
  std::uint64_t search_iterations = 0;
  int overproduced_steps = 0;   // before modulation, minimum scenario
  PhaseTimings timings;
};

PipelineResult run_pipeline(const Instance& instance, const PipelineConfig& config = {});

}  // namespace outage
