#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "outage/numeric.hpp"

namespace outage {

// Dense row-major 2-D array.
template <class T>
class Table {
 public:
  Table() = default;
  Table(std::size_t rows, std::size_t cols, T value = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, value) {}

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool operator==(const Table&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

// Half-open range of time steps [begin, end).
struct StepRange {
  int begin = 0;
  int end = 0;

  int size() const { return end - begin; }
  bool empty() const { return end <= begin; }
  bool contains(int t) const { return t >= begin && t < end; }
  bool operator==(const StepRange&) const = default;
};

// Weekly and per-step discretizations of the horizon. Each week owns a
// contiguous block of steps; all steps last `hours_per_step` hours.
class TimeGrid {
 public:
  TimeGrid() = default;
  TimeGrid(std::vector<int> steps_per_week, double hours_per_step);

  static TimeGrid uniform(int weeks, int steps_per_week, double hours_per_step);

  int steps() const { return static_cast<int>(week_of_step_.size()); }
  int weeks() const { return static_cast<int>(week_start_.size()) - 1; }
  double hours_per_step() const { return hours_; }

  int week_of_step(int t) const { return week_of_step_[t]; }
  StepRange steps_of_week(int h) const { return {week_start_[h], week_start_[h + 1]}; }
  // Steps of weeks [first, last), clamped to the horizon.
  StepRange steps_of_weeks(int first, int last) const;
  std::vector<int> steps_per_week() const;

  bool operator==(const TimeGrid&) const = default;

 private:
  std::vector<int> week_start_{0};  // H + 1 entries
  std::vector<int> week_of_step_;
  double hours_ = 1.0;
};

struct Type1Plant {
  Table<double> pmin;  // [t][s]
  Table<double> pmax;  // [t][s]
  Table<double> cost;  // [t][s], currency per power-hour

  bool operator==(const Type1Plant&) const = default;
};

// Fraction of maximum power available below the profile threshold, as a
// piecewise-linear function of the fuel level. Clamped outside its breakpoints.
class ProfileCurve {
 public:
  ProfileCurve() : points_{{0.0, 1.0}} {}
  explicit ProfileCurve(std::vector<std::pair<double, double>> points);

  double operator()(double fuel) const;
  const std::vector<std::pair<double, double>>& points() const { return points_; }

  bool operator==(const ProfileCurve&) const = default;

 private:
  std::vector<std::pair<double, double>> points_;
};

// Per-campaign production rules: profile threshold, modulation budget and
// the profile itself.
struct CampaignParams {
  double bo = 0.0;
  double mmax = 0.0;  // power-hours
  ProfileCurve pb;

  bool operator==(const CampaignParams&) const = default;
};

// Weeks, relative to the outage start, during which the outage holds maintenance resources.
struct ResourceWindow {
  int offset = 0;
  int duration = 1;

  bool operator==(const ResourceWindow&) const = default;
};

// Outage k followed by campaign k.
struct Cycle {
  int da = 1;
  std::optional<int> to;
  std::optional<int> ta;
  double rmin = 0.0;
  double rmax = 0.0;
  double q = 0.0;
  double qprime = 0.0;
  double amax = 0.0;
  double smax = 0.0;
  double c_refuel = 0.0;
  CampaignParams campaign;
  std::vector<ResourceWindow> resource_windows;

  bool mandatory() const { return ta.has_value(); }
  bool operator==(const Cycle&) const = default;
};

struct Type2Plant {
  std::vector<double> pmax;  // [t]
  double xi = 0.0;
  double c_final = 0.0;
  CampaignParams initial_campaign;  // campaign before the first outage
  std::vector<Cycle> cycles;

  int cycle_count() const { return static_cast<int>(cycles.size()); }
  // Campaign rules for cycle k; k = -1 is the initial campaign.
  const CampaignParams& campaign(int k) const {
    return k < 0 ? initial_campaign : cycles[k].campaign;
  }
  bool operator==(const Type2Plant&) const = default;
};

struct ScenarioSet {
  Table<double> demand;  // [t][s]
  double epsilon = 0.0;

  int count() const { return static_cast<int>(demand.cols()); }
  bool operator==(const ScenarioSet&) const = default;
};

struct OutageRef {
  int plant = 0;
  int cycle = 0;

  auto operator<=>(const OutageRef&) const = default;
};

// Both outages intersect [week_lo, week_hi] =>
//   ha(first) - ha(second) >= se  or  ha(second) - ha(first) >= se_prime.
struct Separation {
  OutageRef first;
  OutageRef second;
  int se = 0;
  int se_prime = 0;
  int week_lo = 0;
  int week_hi = 0;

  bool operator==(const Separation&) const = default;
};

// At most `limit` of `outages` active in `week`.
struct MaxOffline {
  int week = 0;
  std::vector<OutageRef> outages;
  int limit = 0;

  bool operator==(const MaxOffline&) const = default;
};

// In every week at most `capacity` of `outages` hold resources.
struct ResourceLimit {
  std::vector<OutageRef> outages;
  int capacity = 0;

  bool operator==(const ResourceLimit&) const = default;
};

// For each step of each listed week, the summed pmax of offline plants is at most imax.
struct OfflineCapacity {
  std::vector<int> plants;
  double imax = 0.0;
  std::vector<int> weeks;

  bool operator==(const OfflineCapacity&) const = default;
};

struct CouplingConstraints {
  std::vector<Separation> separations;
  std::vector<MaxOffline> max_offline;
  std::vector<ResourceLimit> resources;
  std::vector<OfflineCapacity> offline_capacity;

  std::size_t size() const {
    return separations.size() + max_offline.size() + resources.size() +
           offline_capacity.size();
  }
  bool operator==(const CouplingConstraints&) const = default;
};

struct Instance {
  TimeGrid grid;
  std::vector<Type1Plant> type1;
  std::vector<Type2Plant> type2;
  ScenarioSet scenarios;
  CouplingConstraints coupling;

  int steps() const { return grid.steps(); }
  int weeks() const { return grid.weeks(); }
  int scenario_count() const { return scenarios.count(); }
  int type1_count() const { return static_cast<int>(type1.size()); }
  int type2_count() const { return static_cast<int>(type2.size()); }
  const Cycle& cycle(OutageRef o) const { return type2[o.plant].cycles[o.cycle]; }

  bool operator==(const Instance&) const = default;
};

// Throws ValidationError naming the first broken invariant.
void validate(const Instance& instance);

// Shared outage decisions. An absent start week means the outage is not scheduled.
struct Schedule {
  std::vector<std::vector<std::optional<int>>> start;
  std::vector<std::vector<double>> refuel;

  static Schedule unscheduled(const Instance& instance);

  bool scheduled(int i, int k) const { return start[i][k].has_value(); }
  int week(int i, int k) const { return *start[i][k]; }
  int scheduled_count(int i) const;

  bool operator==(const Schedule&) const = default;
};

// Production of one scenario: type-1 rows [j][t], type-2 rows [i][t].
struct ScenarioProduction {
  Table<double> type1;
  Table<double> type2;

  bool operator==(const ScenarioProduction&) const = default;
};

struct Solution {
  Schedule schedule;
  std::vector<ScenarioProduction> production;

  bool operator==(const Solution&) const = default;
};

// Outage k and the production campaign that follows it.
struct CycleSpan {
  int cycle = 0;
  StepRange outage;
  StepRange campaign;

  bool operator==(const CycleSpan&) const = default;
};

// Step intervals of one plant. The initial campaign belongs to cycle -1.
struct PlantTimeline {
  StepRange initial_campaign;
  std::vector<CycleSpan> cycles;  // scheduled cycles only, in order

  bool operator==(const PlantTimeline&) const = default;
};

// Outages and campaigns of one plant. Throws StructuralError if the plant's
// outages overlap, leave the horizon, or resume after an unscheduled one.
PlantTimeline derive_timeline(const Instance& instance, const Schedule& schedule, int plant);
std::vector<PlantTimeline> derive_campaigns(const Instance& instance, const Schedule& schedule);

// Per-step view of a timeline, for simulation loops.
struct StepRoles {
  std::vector<int> campaign;      // cycle index owning the campaign step (-1 initial), or kOutage
  std::vector<int> outage_start;  // cycle index if the step begins an outage, else -1
  static constexpr int kOutage = -2;
};
StepRoles step_roles(const PlantTimeline& timeline, int steps);

// Fuel transitions shared by every simulator so that trajectories agree bit for bit.
inline double fuel_after_production(double fuel, double power, double hours) {
  return fuel - power * hours;
}
inline double fuel_after_reload(double fuel, double refuel, const Cycle& cycle) {
  return cycle.q * fuel + refuel + cycle.qprime;
}

}  // namespace outage
