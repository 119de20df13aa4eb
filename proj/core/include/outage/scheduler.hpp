#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "outage/model.hpp"

namespace outage {

// beta[h]: fuel burnt at full power over weeks [0, h). H + 1 entries.
std::vector<double> accumulate_beta(const Type2Plant& plant, const TimeGrid& grid);

// Pre-outage fuel corrected for the declining profile below bo. Identity for
// fi >= bo, zero at fi = -bo.
double profile_adjusted_fuel(double fi, double bo);

// Approximate fuel chain of one plant. Entries of unscheduled cycles are 0.
struct ChainEstimate {
  std::vector<double> fu;
  std::vector<double> fi;
  std::vector<double> fb;
  std::vector<double> fa;
};

ChainEstimate estimate_fuel_chain(const Type2Plant& plant, std::span<const std::optional<int>> starts,
                                  std::span<const double> refuels, std::span<const double> beta);

struct FuelEstimate {
  std::vector<std::vector<double>> beta;  // [i][h]
  std::vector<ChainEstimate> chain;       // [i]
  std::vector<double> alpha;              // [i] average weekly full-power output
  std::vector<int> k_last;                // [i] last scheduled cycle, -1 if none
};

FuelEstimate estimate_fuel(const Instance& instance, const Schedule& schedule);

// Estimated offline capacity summed over plants.
double surrogate_objective(const Instance& instance, const Schedule& schedule,
                           const FuelEstimate& estimate);

struct SchedulerConfig {
  double refuel_quantum = 1000.0;
  double time_budget = 10.0;  // seconds, soft
  // Keep searching past the soft budget until a first schedule is found,
  // bounded by the hard limits.
  bool until_first_feasible = true;
  std::optional<double> hard_time_budget;
  std::uint64_t node_limit = 0;       // 0 = none; replaces the clock when set
  std::uint64_t hard_node_limit = 0;  // 0 = none
  std::uint64_t rng_seed = 1;
  bool bnb = true;
  // Shrinks the approximate amax and smax bounds by this fraction.
  double fuel_margin = 0.0;
};

enum class ScheduleStatus { kFeasible, kTimeout, kInfeasible };

struct SchedulerResult {
  ScheduleStatus status = ScheduleStatus::kTimeout;
  Schedule schedule;
  double surrogate = 0.0;
  bool exhausted = false;  // tree fully explored
  std::uint64_t nodes = 0;
  std::vector<double> incumbents;  // surrogate of each accepted incumbent
};

SchedulerResult solve_schedule(const Instance& instance, const SchedulerConfig& config = {});

}  // namespace outage
