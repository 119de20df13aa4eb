#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "outage/evaluator.hpp"
#include "outage/io.hpp"

using namespace outage;

namespace {

bool has_kind(const std::vector<Violation>& v, ViolationKind kind) {
  return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.kind == kind; });
}

Solution zero_solution(const Instance& inst) {
  Solution sol;
  sol.schedule = Schedule::unscheduled(inst);
  for (int s = 0; s < inst.scenario_count(); ++s) {
    sol.production.push_back({Table<double>(inst.type1_count(), inst.steps(), 0.0),
                              Table<double>(inst.type2_count(), inst.steps(), 0.0)});
  }
  return sol;
}

}  // namespace

TEST(SimulateFuel, ReloadTransform) {
  Instance inst = oracle::blank(3);
  inst.type2.push_back(oracle::plant(inst, 10.0, 100.0, 1));
  auto& c = inst.type2[0].cycles[0];
  c.q = 0.9;
  c.qprime = 5.0;
  Schedule s = Schedule::unscheduled(inst);
  s.start[0][0] = 0;
  s.refuel[0][0] = 50.0;
  const auto x = simulate_plant_fuel(inst, s, 0, std::vector<double>(3, 0.0));
  EXPECT_DOUBLE_EQ(x[1], 145.0);
}

TEST(SimulateFuel, ProductionDrawsDown) {
  Instance inst = oracle::blank(3);
  inst.type2.push_back(oracle::plant(inst, 10.0, 100.0));
  const auto x = simulate_plant_fuel(inst, Schedule::unscheduled(inst), 0, std::vector<double>(3, 10.0));
  EXPECT_EQ(x, (std::vector<double>{100.0, 90.0, 80.0, 70.0}));
}

TEST(SimulateFuel, WitnessMatchesWeekByWeekOracle) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto g = generate_instance(oracle::family(seed));
    const auto& sp = g.witness_solution.production[0];
    const auto table = simulate_fuel(g.instance, g.witness, sp.type2);
    for (int i = 0; i < g.instance.type2_count(); ++i) {
      const auto row = sp.type2.row(i);
      const auto ref = oracle::fuel(g.instance, g.witness, i, {row.begin(), row.end()});
      for (int t = 0; t <= g.instance.steps(); ++t) {
        ASSERT_NEAR(table(i, t), ref[t], 1e-9 * std::max(1.0, std::fabs(ref[t])));
      }
    }
  }
}

TEST(SimulateFuel, IndependentOfPlantOrder) {
  const auto g = generate_instance(oracle::family(11));
  const auto& sp = g.witness_solution.production[0];
  const auto all = simulate_fuel(g.instance, g.witness, sp.type2);
  for (int i = g.instance.type2_count() - 1; i >= 0; --i) {
    const auto x = simulate_plant_fuel(g.instance, g.witness, i, sp.type2.row(i));
    for (int t = 0; t <= g.instance.steps(); ++t) EXPECT_EQ(all(i, t), x[t]);
  }
}

TEST(CheckFeasibility, WitnessHasNoViolations) {
  const auto g = generate_instance(oracle::family(7));
  EXPECT_TRUE(check_feasibility(g.instance, g.witness_solution).empty());
}

TEST(CheckFeasibility, SeparationBothDisjunctsFail) {
  Instance inst = oracle::blank(8);
  inst.type2.push_back(oracle::plant(inst, 0.0, 0.0, 1));
  inst.type2.push_back(oracle::plant(inst, 0.0, 0.0, 1));
  inst.coupling.separations.push_back({{0, 0}, {1, 0}, 4, 2, 0, 7});
  Schedule s = Schedule::unscheduled(inst);
  s.start[0][0] = 5;
  s.start[1][0] = 2;
  const auto v = check_schedule(inst, s);
  ASSERT_TRUE(has_kind(v, ViolationKind::kSeparation));
  s.start[0][0] = 6;  // 6 - 2 = 4 >= Se
  EXPECT_FALSE(has_kind(check_schedule(inst, s), ViolationKind::kSeparation));
}

TEST(CheckFeasibility, ModulationBudgetExceededByOne) {
  Instance inst = oracle::blank(4, 1, 1.0, 1, 10.0);
  inst.type2.push_back(oracle::plant(inst, 5.0, 1000.0));
  inst.type2[0].initial_campaign.mmax = 3.0;
  Solution sol = zero_solution(inst);
  // 4 power-hours below pmax in total: budget 3 + 1.
  const double p2[4] = {5.0, 3.0, 5.0, 3.0};
  for (int t = 0; t < 4; ++t) {
    sol.production[0].type2(0, t) = p2[t];
    sol.production[0].type1(0, t) = 10.0 - p2[t];
  }
  const auto v = check_feasibility(inst, sol);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, ViolationKind::kMaxModulation);
  EXPECT_NEAR(v[0].magnitude, 1.0, 1e-12);
}

TEST(CheckFeasibility, DemandReportedBothWays) {
  Instance inst = oracle::blank(2, 1, 1.0, 1, 10.0);
  Solution sol = zero_solution(inst);
  sol.production[0].type1(0, 0) = 12.0;
  sol.production[0].type1(0, 1) = 8.0;
  const auto v = check_feasibility(inst, sol);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].kind, ViolationKind::kDemand);
  EXPECT_EQ(v[1].kind, ViolationKind::kDemand);
  EXPECT_NEAR(v[0].magnitude, 2.0, 1e-12);
  EXPECT_NEAR(v[1].magnitude, 2.0, 1e-12);
}

TEST(CheckFeasibility, ProfileBand) {
  Instance inst = oracle::blank(1, 1, 1.0, 1, 100.0);
  inst.scenarios.epsilon = 0.1;
  inst.type2.push_back(oracle::plant(inst, 10.0, 50.0));
  auto& cp = inst.type2[0].initial_campaign;
  cp.bo = 100.0;
  cp.pb = ProfileCurve({{0.0, 0.5}, {100.0, 1.0}});
  Solution sol = zero_solution(inst);
  // x = 50: target 0.75 * 10 = 7.5, band [6.75, 8.25].
  sol.production[0].type2(0, 0) = 8.0;
  sol.production[0].type1(0, 0) = 92.0;
  EXPECT_FALSE(has_kind(check_feasibility(inst, sol), ViolationKind::kPowerProfile));
  sol.production[0].type2(0, 0) = 9.0;
  sol.production[0].type1(0, 0) = 91.0;
  EXPECT_TRUE(has_kind(check_feasibility(inst, sol), ViolationKind::kPowerProfile));
}

TEST(CheckFeasibility, RunDryForcesZero) {
  Instance inst = oracle::blank(1, 1, 1.0, 1, 100.0);
  inst.type2.push_back(oracle::plant(inst, 10.0, 2.0));
  auto& cp = inst.type2[0].initial_campaign;
  cp.bo = 100.0;
  cp.pb = ProfileCurve({{0.0, 0.5}, {100.0, 1.0}});
  Solution sol = zero_solution(inst);
  // x = 2 cannot sustain the 5.1 target for an hour, so only zero is allowed.
  sol.production[0].type1(0, 0) = 100.0;
  EXPECT_TRUE(check_feasibility(inst, sol).empty());
  sol.production[0].type2(0, 0) = 1.0;
  sol.production[0].type1(0, 0) = 99.0;
  EXPECT_TRUE(has_kind(check_feasibility(inst, sol), ViolationKind::kPowerProfile));
}

TEST(CheckFeasibility, ViolationsSortedAndDeterministic) {
  const auto g = generate_instance(oracle::family(13));
  Solution sol = g.witness_solution;
  for (auto& sp : sol.production) {
    for (double& v : sp.type2.data()) v *= 1.3;
  }
  const auto a = check_feasibility(g.instance, sol);
  const auto b = check_feasibility(g.instance, sol);
  ASSERT_FALSE(a.empty());
  EXPECT_EQ(a, b);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end(),
                             [](const Violation& x, const Violation& y) { return x.sort_key() < y.sort_key(); }));
  for (const auto& v : a) EXPECT_GT(v.magnitude, kTolerance);
}

TEST(Objective, AllZeroIsZero) {
  Instance inst = oracle::blank(3);
  inst.type2.push_back(oracle::plant(inst, 0.0, 0.0));
  EXPECT_DOUBLE_EQ(compute_objective(inst, zero_solution(inst)), 0.0);
}

TEST(Objective, HandSubstitution) {
  Instance inst = oracle::blank(3, 1, 1.0, 1, 2.0);
  inst.type1[0].cost = Table<double>(3, 1, 5.0);
  inst.type2.push_back(oracle::plant(inst, 0.0, 4.0));
  Solution sol = zero_solution(inst);
  for (int t = 0; t < 3; ++t) sol.production[0].type1(0, t) = 2.0;
  const auto terms = objective_terms(inst, sol);
  EXPECT_DOUBLE_EQ(terms.type1, 30.0);
  EXPECT_DOUBLE_EQ(terms.residual, 4.0);
  EXPECT_DOUBLE_EQ(compute_objective(inst, sol), 26.0);
}

TEST(Objective, ResidualTermNotAveragedAsPrinted) {
  Instance inst = oracle::blank(1, 1, 1.0, 4, 0.0);
  inst.type2.push_back(oracle::plant(inst, 0.0, 10.0));
  const Solution sol = zero_solution(inst);
  EXPECT_DOUBLE_EQ(compute_objective(inst, sol, ObjectiveMode::kAsPrinted), -40.0);
  EXPECT_DOUBLE_EQ(compute_objective(inst, sol, ObjectiveMode::kAveragedResidual), -10.0);
}

TEST(Objective, MatchesSpreadsheetOracleOnPerturbedSolutions) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> scale(0.5, 1.0);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto g = generate_instance(oracle::family(seed));
    Solution sol = g.witness_solution;
    for (auto& sp : sol.production) {
      for (double& v : sp.type2.data()) v *= scale(rng);
      for (double& v : sp.type1.data()) v *= scale(rng);
    }
    for (bool averaged : {false, true}) {
      const double got = compute_objective(
          g.instance, sol, averaged ? ObjectiveMode::kAveragedResidual : ObjectiveMode::kAsPrinted);
      const double want = oracle::objective(g.instance, sol, averaged);
      EXPECT_NEAR(got, want, 1e-9 * std::max(1.0, std::fabs(want))) << "seed " << seed;
    }
  }
}
