#pragma once

#include <span>
#include <string_view>
#include <tuple>
#include <vector>

#include "outage/model.hpp"

namespace outage {

enum class ViolationKind {
  kOutageBounds,
  kReloadBounds,
  kDemand,
  kType1Bounds,
  kType2Upper,
  kMaxModulation,
  kPowerProfile,
  kFuelNonneg,
  kAmax,
  kSmax,
  kSeparation,
  kMaxOffline,
  kResource,
  kOfflineCapacity,
  kOutageOrder,
};

std::string_view to_string(ViolationKind kind);
bool is_scheduling_kind(ViolationKind kind);

// One broken constraint instance. Location fields that do not apply are -1.
struct Violation {
  ViolationKind kind = ViolationKind::kOutageBounds;
  int plant = -1;
  int cycle = -1;
  int step = -1;
  int scenario = -1;
  int week = -1;
  int constraint = -1;  // index into the matching coupling list
  double magnitude = 0.0;

  auto sort_key() const { return std::tie(kind, plant, cycle, step, scenario, week, constraint); }
  bool operator==(const Violation&) const = default;
};

// How the residual-fuel term is weighted. The printed objective sums it over
// scenarios without averaging; kAveragedResidual divides it by S as well.
enum class ObjectiveMode { kAsPrinted, kAveragedResidual };

// Weight of one unit of residual fuel value relative to the refuel term.
double residual_weight(const Instance& instance, ObjectiveMode mode);

// Fuel trajectory of one plant, T + 1 entries; entry T is the residual fuel.
std::vector<double> simulate_plant_fuel(const Instance& instance, const Schedule& schedule, int plant,
                                        std::span<const double> power);

// Fuel trajectories [i][t] of all type-2 plants for one scenario.
Table<double> simulate_fuel(const Instance& instance, const Schedule& schedule,
                            const Table<double>& type2_power);

// Outage bounds, reload bounds, ordering and the four coupling families.
std::vector<Violation> check_schedule(const Instance& instance, const Schedule& schedule);

// Every constraint of the model, sorted canonically. Empty iff feasible.
std::vector<Violation> check_feasibility(const Instance& instance, const Solution& solution);

struct ObjectiveTerms {
  double refuel = 0.0;
  double type1 = 0.0;
  double residual = 0.0;  // already weighted; subtracted from the total
  double total() const { return refuel + type1 - residual; }
};

ObjectiveTerms objective_terms(const Instance& instance, const Solution& solution,
                               ObjectiveMode mode = ObjectiveMode::kAsPrinted);
double compute_objective(const Instance& instance, const Solution& solution,
                         ObjectiveMode mode = ObjectiveMode::kAsPrinted);

}  // namespace outage
