#pragma once

#include <vector>

#include "outage/evaluator.hpp"
#include "outage/model.hpp"
#include "outage/planner.hpp"

namespace outage {

struct ModulationConfig {
  ObjectiveMode mode = ObjectiveMode::kAsPrinted;
  double refuel_quantum = 1000.0;  // step of the refuel-cut fallback
  int passes = 4;
  int fallback_rounds = 64;
};

// Steps where the summed type-2 output exceeds `ceiling`.
std::vector<int> overproduced_steps(const std::vector<PlannerResult>& plans, const std::vector<double>& ceiling);

struct MinScenarioResult {
  bool feasible = false;
  Schedule schedule;                       // refuels after repair, frozen from here on
  std::vector<PlannerResult> plans;        // [i]
  std::vector<std::vector<double>> caps;   // [i][t], +inf where unmodulated
};

// Lowers full-power plants step by step, in time order, until the total fits
// the minimum-scenario ceiling. Refuels may be repaired downwards.
MinScenarioResult modulate_min_scenario(const Instance& instance, const Schedule& schedule,
                                        std::vector<PlannerResult> plans, const ModulationConfig& config = {});

struct ScenarioResult {
  bool feasible = false;
  ScenarioProduction production;
  bool from_min_plan = false;  // kept the minimum-scenario modulation
};

// Scenario s with refuels frozen: modulates the unmodulated plan against the
// scenario's own demand, falls back to the minimum-scenario plan when that is
// cheaper or fails, then dispatches type-1 plants exactly.
ScenarioResult modulate_per_scenario(const Instance& instance, const MinScenarioResult& base, int scenario,
                                     const ModulationConfig& config = {});

struct ModulationOutcome {
  bool feasible = false;
  Solution solution;
  int overproduced_before = 0;  // minimum-scenario steps over the ceiling on entry
};

ModulationOutcome run_modulation(const Instance& instance, const Schedule& schedule,
                                 std::vector<PlannerResult> plans, const ModulationConfig& config = {});

}  // namespace outage
