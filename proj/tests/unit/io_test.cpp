#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "outage/errors.hpp"
#include "outage/evaluator.hpp"
#include "outage/io.hpp"

using namespace outage;

namespace {

const char* kMinimal = R"({
  "grid": {"steps_per_week": [1], "hours_per_step": 1},
  "type1": [{"pmin": [[0]], "pmax": [[10]], "cost": [[2]]}],
  "type2": [{
    "pmax": [5], "xi": 100, "c_final": 1,
    "initial_campaign": {"bo": 0, "mmax": 0, "pb": [[0, 1]]},
    "cycles": []
  }],
  "scenarios": {"epsilon": 0, "demand": [[7]]},
  "coupling": {"separations": [], "max_offline": [], "resources": [], "offline_capacity": []}
})";

}  // namespace

TEST(ParseInstance, MinimalFile) {
  const Instance inst = parse_instance(kMinimal);
  EXPECT_EQ(inst.steps(), 1);
  EXPECT_EQ(inst.weeks(), 1);
  EXPECT_EQ(inst.type1_count(), 1);
  EXPECT_EQ(inst.type2_count(), 1);
  EXPECT_EQ(inst.scenario_count(), 1);
  EXPECT_DOUBLE_EQ(inst.scenarios.demand(0, 0), 7.0);
}

TEST(ParseInstance, ReloadBoundsOutOfOrder) {
  std::string text = write_instance(generate_instance(oracle::family(3)).instance);
  Instance inst = parse_instance(text);
  inst.type2[0].cycles[0].rmin = inst.type2[0].cycles[0].rmax + 1.0;
  // Serialization does not validate; parsing must.
  text = write_instance(inst);
  try {
    parse_instance(text);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("rmin"), std::string::npos) << e.what();
  }
}

TEST(ParseInstance, SyntaxErrorIsParseError) {
  EXPECT_THROW(parse_instance("{\"grid\": "), ParseError);
}

TEST(ParseInstance, WrongTypeNamesFieldPath) {
  std::string text(kMinimal);
  text.replace(text.find("\"xi\": 100"), 9, "\"xi\": \"many\"");
  try {
    parse_instance(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("xi"), std::string::npos) << e.what();
  }
}

TEST(ParseInstance, RoundTripOverSeededInstances) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto g = generate_instance(oracle::family(seed));
    const std::string once = write_instance(g.instance);
    const Instance back = parse_instance(once);
    ASSERT_EQ(back, g.instance) << "seed " << seed;
    ASSERT_EQ(write_instance(back), once) << "seed " << seed;
  }
}

TEST(WriteSolution, UnscheduledRendersMinusOne) {
  const auto g = generate_instance(oracle::family(4));
  Solution sol = g.witness_solution;
  sol.schedule = Schedule::unscheduled(g.instance);
  const std::string text = write_solution(g.instance, sol);
  const auto back = parse_solution(g.instance, text);
  for (const auto& row : back.solution.schedule.start) {
    for (const auto& ha : row) EXPECT_FALSE(ha.has_value());
  }
  EXPECT_NE(text.find("-1"), std::string::npos);
}

TEST(WriteSolution, WitnessRoundTripScoresIdentically) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto g = generate_instance(oracle::family(seed));
    const auto back = parse_solution(g.instance, write_solution(g.instance, g.witness_solution));
    EXPECT_EQ(back.solution, g.witness_solution) << "seed " << seed;
    EXPECT_EQ(compute_objective(g.instance, back.solution), compute_objective(g.instance, g.witness_solution));
  }
}

TEST(WriteSolution, RejectsNaNProduction) {
  const auto g = generate_instance(oracle::family(5));
  Solution sol = g.witness_solution;
  sol.production[0].type2(0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(write_solution(g.instance, sol), Error);
}

TEST(WriteSolution, DimensionMismatchIsStructural) {
  const auto g = generate_instance(oracle::family(5));
  Solution sol = g.witness_solution;
  sol.production.pop_back();
  EXPECT_THROW(write_solution(g.instance, sol), StructuralError);
}

TEST(Generator, SameSeedGivesIdenticalBytes) {
  GeneratorParams gp;
  gp.seed = 1;
  EXPECT_EQ(write_instance(generate_instance(gp).instance), write_instance(generate_instance(gp).instance));
  gp.seed = 2;
  GeneratorParams other;
  other.seed = 1;
  EXPECT_NE(write_instance(generate_instance(gp).instance), write_instance(generate_instance(other).instance));
}

TEST(Generator, WitnessFeasibleOnSeededFamily) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto g = generate_instance(oracle::family(seed));
    const auto v = check_feasibility(g.instance, g.witness_solution);
    ASSERT_TRUE(v.empty()) << "seed " << seed << ": " << to_string(v.front().kind);
  }
}

TEST(Generator, DefaultScaleMatchesDeskSize) {
  GeneratorParams gp;
  gp.I = 4;
  gp.K = 2;
  gp.H = 20;
  gp.S = 3;
  const auto g = generate_instance(gp);
  EXPECT_EQ(g.instance.steps(), 140);
  EXPECT_EQ(g.instance.type2_count(), 4);
  EXPECT_EQ(g.instance.scenario_count(), 3);
}

TEST(Generator, ImpossibleParamsThrow) {
  GeneratorParams gp;
  gp.K = 5;
  gp.H = 4;
  EXPECT_THROW(generate_instance(gp), GenerationError);
  gp = {};
  gp.S = 0;
  EXPECT_THROW(generate_instance(gp), GenerationError);
  gp = {};
  gp.constraint_density = 1.5;
  EXPECT_THROW(generate_instance(gp), GenerationError);
}
