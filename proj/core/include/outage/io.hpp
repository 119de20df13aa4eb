#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "outage/evaluator.hpp"
#include "outage/model.hpp"

namespace outage {

// Instance text: a JSON object with keys grid, type1, type2, scenarios,
// coupling. Throws ParseError (with field path) or ValidationError.
Instance parse_instance(std::string_view text);
std::string write_instance(const Instance& instance);

struct ParsedSolution {
  Solution solution;
  std::optional<double> objective;  // as recorded in the file
};

// Solution text: ha (-1 = unscheduled), r, production [s][row][t] with the J
// type-1 rows first, objective.
ParsedSolution parse_solution(const Instance& instance, std::string_view text);
std::string write_solution(const Instance& instance, const Solution& solution,
                           ObjectiveMode mode = ObjectiveMode::kAsPrinted);

std::string write_report(const std::vector<Violation>& violations);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view text);

struct DemandProfile {
  double base = 400.0;       // mean type-1 share of demand
  double amplitude = 100.0;  // seasonal swing over the horizon
  double noise = 50.0;       // scenario and step noise scale
};

struct GeneratorParams {
  int I = 4;
  int J = 3;
  int K = 2;
  int H = 20;
  int steps_per_week = 7;
  int S = 3;
  DemandProfile demand_profile;
  double constraint_density = 0.5;
  std::uint64_t seed = 1;
  // Steps where the witness modulates and demand equals its type-2 output, so
  // that an unmodulated plan overshoots the minimum demand.
  int overproduction_steps = 0;
};

struct GeneratedInstance {
  Instance instance;
  Schedule witness;
  Solution witness_solution;
};

// Builds a feasible witness first and derives bounds and coupling
// constraints that it satisfies. Throws GenerationError on impossible params.
GeneratedInstance generate_instance(const GeneratorParams& params);

}  // namespace outage
