#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "outage/model.hpp"

namespace outage {

// Literals are signed variable numbers, DIMACS style: 3 means x3, -3 means not x3.
struct Formula {
  int n = 0;
  std::vector<std::array<int, 3>> clauses;
};

// Truth values indexed 1..n; entry 0 unused.
using Assignment = std::vector<bool>;

// Throws ParseError unless every clause line has exactly 3 literals.
Formula parse_dimacs(std::string_view text);
std::string write_dimacs(const Formula& formula);

// Week of a literal: x_v -> 2(v-1), not x_v -> 2(v-1)+1.
inline int literal_week(int literal) { return 2 * ((literal < 0 ? -literal : literal) - 1) + (literal < 0 ? 1 : 0); }

// One plant per clause with a single one-week outage that must fall on a week
// whose literal can be the clause's only true one; separations forbid pairs
// of weeks whose implied assignments clash.
Instance encode_1in3sat(const Formula& formula);

// Throws StructuralError if an outage is missing or the implied values clash.
Assignment decode_assignment(const Formula& formula, const Schedule& schedule);

bool satisfies_1in3(const Formula& formula, const Assignment& assignment);
std::optional<Assignment> brute_force_1in3(const Formula& formula);

Formula random_formula(int n, int clauses, std::uint64_t seed);

}  // namespace outage
