#include <gtest/gtest.h>

#include "outage/errors.hpp"
#include "outage/evaluator.hpp"
#include "outage/satgen.hpp"
#include "outage/scheduler.hpp"

using namespace outage;

namespace {

// (x1 v x2 v -x3) & (-x1 v x2 v x4)
Formula two_clauses() { return {4, {{1, 2, -3}, {-1, 2, 4}}}; }

std::vector<int> blocked_weeks(const Instance& inst, int plant) {
  for (const auto& oc : inst.coupling.offline_capacity) {
    if (oc.plants == std::vector<int>{plant}) return oc.weeks;
  }
  return {};
}

}  // namespace

TEST(LiteralWeek, VariablePairsAreAdjacent) {
  EXPECT_EQ(literal_week(1), 0);
  EXPECT_EQ(literal_week(-1), 1);
  EXPECT_EQ(literal_week(4), 6);
  EXPECT_EQ(literal_week(-4), 7);
}

TEST(Encode, TwoClauseLayout) {
  const Formula f = two_clauses();
  const Instance inst = encode_1in3sat(f);
  EXPECT_EQ(inst.type2_count(), 2);
  EXPECT_EQ(inst.weeks(), 8);
  EXPECT_EQ(inst.scenario_count(), 1);
  for (const auto& p : inst.type2) {
    ASSERT_EQ(p.cycle_count(), 1);
    EXPECT_EQ(p.cycles[0].da, 1);
    EXPECT_EQ(p.cycles[0].to, 0);
    EXPECT_EQ(p.cycles[0].ta, 7);
  }
  EXPECT_EQ(blocked_weeks(inst, 0), (std::vector<int>{1, 3, 4, 6, 7}));
  EXPECT_EQ(blocked_weeks(inst, 1), (std::vector<int>{0, 3, 4, 5, 7}));
  const auto c = static_cast<int>(f.clauses.size());
  const auto constraints =
      static_cast<int>(inst.coupling.separations.size() + inst.coupling.offline_capacity.size());
  EXPECT_LE(constraints, 3 * c * c);
}

TEST(Encode, ClashingPairIsSeparated) {
  // x1 in clause 0 (week 0) against -x1 in clause 1 (week 1).
  const Instance inst = encode_1in3sat(two_clauses());
  Schedule s = Schedule::unscheduled(inst);
  s.start[0][0] = 0;
  s.start[1][0] = 1;
  bool separation = false;
  for (const auto& v : check_schedule(inst, s)) separation = separation || v.kind == ViolationKind::kSeparation;
  EXPECT_TRUE(separation);
}

TEST(Encode, SingleClauseHasThreeFeasibleWeeks) {
  const Formula f{3, {{1, -2, 3}}};
  const Instance inst = encode_1in3sat(f);
  int feasible = 0;
  for (int w = 0; w < inst.weeks(); ++w) {
    Schedule s = Schedule::unscheduled(inst);
    s.start[0][0] = w;
    bool clean = true;
    for (const auto& v : check_schedule(inst, s)) clean = clean && !is_scheduling_kind(v.kind);
    feasible += clean ? 1 : 0;
  }
  EXPECT_EQ(feasible, 3);
}

TEST(Encode, RejectsLiteralOutsideRange) { EXPECT_THROW(encode_1in3sat({2, {{1, 2, 3}}}), ValidationError); }

TEST(Solve, TwoClauseFormulaDecodes) {
  const Formula f = two_clauses();
  const Instance inst = encode_1in3sat(f);
  const auto r = solve_schedule(inst);
  ASSERT_EQ(r.status, ScheduleStatus::kFeasible);
  const Assignment a = decode_assignment(f, r.schedule);
  EXPECT_TRUE(satisfies_1in3(f, a));
}

TEST(Solve, ContradictionProvedInfeasible) {
  const Formula f{1, {{1, 1, 1}, {-1, -1, -1}}};
  ASSERT_FALSE(brute_force_1in3(f));
  const auto r = solve_schedule(encode_1in3sat(f));
  EXPECT_EQ(r.status, ScheduleStatus::kInfeasible);
}

TEST(Solve, AgreesWithBruteForce) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Formula f = random_formula(2 + static_cast<int>(seed % 6), 1 + static_cast<int>(seed % 8), seed);
    const auto truth = brute_force_1in3(f);
    const auto r = solve_schedule(encode_1in3sat(f));
    ASSERT_NE(r.status, ScheduleStatus::kTimeout) << "seed " << seed;
    EXPECT_EQ(r.status == ScheduleStatus::kFeasible, truth.has_value()) << "seed " << seed;
    if (r.status == ScheduleStatus::kFeasible) EXPECT_TRUE(satisfies_1in3(f, decode_assignment(f, r.schedule)));
  }
}

TEST(Decode, ReadsLiteralWeeks) {
  const Formula f = two_clauses();
  const Instance inst = encode_1in3sat(f);
  Schedule s = Schedule::unscheduled(inst);
  s.start[0][0] = 5;  // -x3 alone in clause 0
  s.start[1][0] = 1;  // -x1 alone in clause 1
  const Assignment a = decode_assignment(f, s);
  for (int v = 1; v <= 4; ++v) EXPECT_FALSE(a[v]) << "x" << v;
  EXPECT_TRUE(satisfies_1in3(f, a));
}

TEST(Decode, ClashIsStructuralError) {
  const Formula f = two_clauses();
  const Instance inst = encode_1in3sat(f);
  Schedule s = Schedule::unscheduled(inst);
  s.start[0][0] = 0;
  s.start[1][0] = 1;
  EXPECT_THROW(decode_assignment(f, s), StructuralError);
  s.start[1][0].reset();
  EXPECT_THROW(decode_assignment(f, s), StructuralError);
}

TEST(Dimacs, RoundTrip) {
  const Formula f = random_formula(6, 9, 4);
  const Formula back = parse_dimacs(write_dimacs(f));
  EXPECT_EQ(back.n, f.n);
  EXPECT_EQ(back.clauses, f.clauses);
}

TEST(Dimacs, CommentsAndHeader) {
  const Formula f = parse_dimacs("c hello\np cnf 5 1\n1 -2 3 0\n");
  EXPECT_EQ(f.n, 5);
  ASSERT_EQ(f.clauses.size(), 1u);
  EXPECT_EQ(f.clauses[0], (std::array<int, 3>{1, -2, 3}));
}

TEST(Dimacs, RejectsMalformedClauses) {
  EXPECT_THROW(parse_dimacs("1 2 0\n"), ParseError);
  EXPECT_THROW(parse_dimacs("1 2 3 4 0\n"), ParseError);
  EXPECT_THROW(parse_dimacs("1 x 3 0\n"), ParseError);
  EXPECT_THROW(parse_dimacs("p cnf 2 1\n1 2 3 0\n"), ParseError);
}

TEST(RandomFormula, DeterministicAndInRange) {
  const Formula a = random_formula(5, 7, 11);
  EXPECT_EQ(a.clauses, random_formula(5, 7, 11).clauses);
  EXPECT_EQ(a.n, 5);
  EXPECT_EQ(a.clauses.size(), 7u);
  for (const auto& c : a.clauses) {
    for (int lit : c) {
      EXPECT_NE(lit, 0);
      EXPECT_LE(std::abs(lit), 5);
    }
  }
}
