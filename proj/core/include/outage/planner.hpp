#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "outage/model.hpp"

namespace outage {

// Elementwise minimum of the demand over scenarios.
std::vector<double> min_demand_scenario(const ScenarioSet& scenarios);

// Largest total type-2 output per step that leaves every scenario's type-1
// minimum production room: min_s (DEM[t][s] - sum_j pmin_j[t][s]).
std::vector<double> type2_ceiling(const Instance& instance);

// Convex piecewise-linear map from total type-2 production to the type-1 cost
// of covering the remaining demand, averaged over scenarios. Defined for
// production >= 0 and constant past the last breakpoint.
class PwlCost {
 public:
  PwlCost() = default;
  explicit PwlCost(std::vector<std::pair<double, double>> points);

  double operator()(double p2) const;
  const std::vector<std::pair<double, double>>& points() const { return points_; }
  double last_x() const { return points_.back().first; }

 private:
  std::vector<std::pair<double, double>> points_{{0.0, 0.0}};
};

inline constexpr double kDefaultPenaltyFactor = 10.0;

// Exact cost function at step t. Demand beyond the type-1 capacity is priced at
// penalty_factor times the dearest type-1 cost of that step and scenario.
PwlCost build_type1_cost(const Instance& instance, int t,
                         double penalty_factor = kDefaultPenaltyFactor);

// Equidistant tabulation of the exact function of every step over
// [0, min(last breakpoint, reach[t])]. Evaluation is constant time. Past the
// range the value is held, which stays an upper bound since costs never rise.
class ApproxCost {
 public:
  ApproxCost() = default;
  ApproxCost(const std::vector<PwlCost>& exact, int breakpoints, std::span<const double> reach = {});

  double operator()(int t, double p2) const;
  double interval(int t) const { return interval_[t]; }
  int breakpoint_count() const { return count_; }
  double value(int t, int index) const { return table_[t * count_ + index]; }

 private:
  std::vector<double> interval_;  // [t]
  int count_ = 0;
  std::vector<double> table_;  // [t][index]
};

// Summed type-2 pmax per step: no plan produces more.
std::vector<double> type2_reach(const Instance& instance);

inline int default_breakpoints(const Instance& instance) { return 3 * instance.type2_count(); }

// Greedy single-plant plan for the minimum-demand scenario (or any scenario
// when caps are supplied).
struct PlannerResult {
  std::vector<double> p;       // [t]
  std::vector<double> x;       // [t], T + 1 entries
  std::vector<double> refuel;  // [k], zero for unscheduled outages
  bool feasible = false;
};

enum class FuelIssueKind { kAmax, kSmax, kModulation };

struct FuelIssue {
  FuelIssueKind kind;
  int cycle;  // campaign index for kModulation (-1 initial)
  double excess;
};

// Optional per-step production ceilings used by modulation. Empty means none;
// +infinity entries leave a step uncapped.
using Caps = std::span<const double>;

// Forward simulation of the greedy rule without repair. Steps before
// `from_step` are kept from `out` and must come from an identical prefix.
void simulate_greedy(const Instance& instance, int plant, const StepRoles& roles,
                     std::span<const double> refuel, Caps caps, PlannerResult& out,
                     int from_step = 0);

// First fuel-level or modulation-budget breach in time order, using the
// evaluator's comparisons.
std::optional<FuelIssue> first_issue(const Instance& instance, int plant,
                                     const PlantTimeline& timeline, const PlannerResult& plan);

// Greedy plan with refuel repair. `refuels` are starting amounts; they are
// clamped into their bounds and only ever reduced.
PlannerResult plan_production(const Instance& instance, const Schedule& schedule, int plant,
                              std::span<const double> refuels, Caps caps = {});

// Raise refuels in 2% steps of the remaining headroom, last campaign first.
// Requires a feasible `result`; keeps it feasible.
void increase_refuels(const Instance& instance, const Schedule& schedule, int plant,
                      PlannerResult& result, Caps caps = {});

// plan_production followed by increase_refuels when feasible.
PlannerResult plan_and_raise(const Instance& instance, const Schedule& schedule, int plant,
                             std::span<const double> refuels, Caps caps = {});

// Cheapest-first type-1 dispatch of `residual` at (t, s). Writes J values and
// returns false if the residual falls outside the summed [pmin, pmax] band.
bool dispatch_type1(const Instance& instance, int t, int s, double residual, std::span<double> out);

// Exact type-1 cost of a dispatch (currency, including D).
double type1_cost(const Instance& instance, int t, int s, std::span<const double> dispatch);

}  // namespace outage
