#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <vector>

#include "outage/evaluator.hpp"
#include "outage/model.hpp"
#include "outage/planner.hpp"

namespace outage {

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct Move {
  int plant = 0;
  int cycle = 0;
  int week = 0;

  bool operator==(const Move&) const = default;
};

struct SaParams {
  double cooling = 0.995;
  double start_accept_ratio = 0.5;
  int stop_idle = 125;
  int n_plateau = 100;
  double k_restart = 2.0;
  int m_idle = 50;
  int radius = 20;
  std::uint64_t seed = 1;
  int probes = 1000;  // neighbours sampled to calibrate the first temperature
  std::uint64_t max_iterations = 0;  // 0 = no limit
  double time_budget = 60.0;         // seconds; <= 0 returns the initial state
  bool use_clock = true;             // false: only max_iterations bounds the run
  std::ostream* telemetry = nullptr;  // one line per plateau when set
};

// Schedule plus per-plant minimum-scenario plans and their per-step totals.
struct SearchState {
  Schedule schedule;
  std::vector<PlannerResult> plans;  // [i]
  std::vector<double> total;         // [t] sum of plans[i].p[t]
  double cost = 0.0;
};

// Replanned plant and the cost change of a move.
struct Candidate {
  Move move;
  PlannerResult plan;
  std::vector<int> changed;  // steps where the plant's production changed
  double delta = 0.0;
};

// Immutable data shared by all moves: cost tables, residual weight and the
// outage-to-constraint map.
class SearchModel {
 public:
  SearchModel(const Instance& instance, ApproxCost approx, ObjectiveMode mode = ObjectiveMode::kAsPrinted);

  const Instance& instance() const { return inst_; }
  const ApproxCost& approx() const { return approx_; }
  double residual_weight() const { return weight_; }

  // Full approximate objective: refuel cost + sum_t F(t, total) - w * sum_i C_i x_i(T).
  double full_cost(const SearchState& state) const;
  SearchState make_state(Schedule schedule, std::vector<PlannerResult> plans) const;

  bool check_move_feasible(const SearchState& state, const Move& move) const;
  // Replans the moved plant from its current refuels. nullopt if planning fails.
  std::optional<Candidate> delta_evaluate(const SearchState& state, const Move& move) const;
  void apply(SearchState& state, Candidate candidate) const;

 private:
  const Instance& inst_;
  ApproxCost approx_;
  double weight_;
  // [i][k] -> indices into each coupling list
  std::vector<std::vector<std::vector<int>>> seps_, maxoff_, res_, caps_;
};

// Uniform sampler over (scheduled outage, target week) pairs within the
// radius and the outage's week bounds, excluding the current week.
class MoveSampler {
 public:
  MoveSampler(const Instance& instance, const Schedule& schedule, int radius);

  bool empty() const { return cumulative_.empty() || cumulative_.back() == 0; }
  std::int64_t size() const { return cumulative_.empty() ? 0 : cumulative_.back(); }
  Move sample(std::mt19937_64& rng) const;
  // Candidate weeks of one outage, ascending; empty if unscheduled.
  std::vector<int> targets(int plant, int cycle) const;

 private:
  struct Range {
    OutageRef outage;
    int current;
    int lo;
    int hi;
  };
  std::vector<Range> ranges_;
  std::vector<std::int64_t> cumulative_;
};

MoveSampler enumerate_moves(const Instance& instance, const SearchState& state, const SaParams& params);

bool sa_accept(double delta, double tau, std::mt19937_64& rng);

// Temperature at which the mean acceptance probability over `deltas` equals
// `target`, found by bisection on log(tau).
double calibrate_temperature(const std::vector<double>& deltas, double target);

struct AnnealResult {
  SearchState best;
  double initial_cost = 0.0;
  std::uint64_t iterations = 0;
  std::uint64_t accepted = 0;
  int restarts = 0;
  double start_tau = 0.0;
  std::vector<double> best_trace;  // best cost after each improvement, starting with the initial cost
};

AnnealResult anneal(const SearchModel& model, SearchState initial, const SaParams& params);

}  // namespace outage
