// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "outage/errors.hpp"
#include "outage/evaluator.hpp"
#include "outage/io.hpp"
#include "outage/modulation.hpp"
#include "outage/pipeline.hpp"
#include "outage/planner.hpp"
#include "outage/satgen.hpp"
#include "outage/scheduler.hpp"
#include "outage/search.hpp"

using namespace outage;

namespace {

// Pinned tolerances.
constexpr double kRunSeconds = 30.0;
constexpr double kPwlMeanRelError = 1e-4;
constexpr double kPwlSlack = 100.0;
constexpr double kDeltaRel = 1e-6;
constexpr double kFuelRel = 1e-9;
constexpr double kDemandRel = 1e-6;
constexpr double kSigmas = 3.0;
constexpr double kSaSeconds = 10.0;  // wall budget per annealing run; other parameters stay at their defaults

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = true;
  std::string detail;
};

ApproxCost approx_for(const Instance& inst, int breakpoints) {
  std::vector<PwlCost> exact;
  for (int t = 0; t < inst.steps(); ++t) exact.push_back(build_type1_cost(inst, t));
  return ApproxCost(exact, breakpoints, type2_reach(inst));
}

std::optional<SearchState> start_state(const Instance& inst, const SearchModel& model, std::uint64_t seed) {
  SchedulerConfig sc;
  sc.node_limit = 20000;
  sc.hard_node_limit = 1000000;
  sc.rng_seed = seed;
  const auto sr = solve_schedule(inst, sc);
  if (sr.status != ScheduleStatus::kFeasible) return std::nullopt;
  std::vector<PlannerResult> plans;
  for (int i = 0; i < inst.type2_count(); ++i) {
    plans.push_back(plan_and_raise(inst, sr.schedule, i, {}));
    if (!plans.back().feasible) return std::nullopt;
  }
  return model.make_state(sr.schedule, std::move(plans));
}

// Independent checks of a solution: demand balance, fuel never negative and
// modulation budgets, all through the test oracles.
std::string oracle_problems(const Instance& inst, const Solution& sol) {
  for (int s = 0; s < inst.scenario_count(); ++s) {
    const auto& sp = sol.production[s];
    for (int t = 0; t < inst.steps(); ++t) {
      double sum = 0.0;
      for (int j = 0; j < inst.type1_count(); ++j) sum += sp.type1(j, t);
      for (int i = 0; i < inst.type2_count(); ++i) sum += sp.type2(i, t);
      const double dem = inst.scenarios.demand(t, s);
      if (std::fabs(sum - dem) > kDemandRel * std::max(1.0, dem)) return "demand s" + std::to_string(s);
    }
    for (int i = 0; i < inst.type2_count(); ++i) {
      const auto row = sp.type2.row(i);
      const auto x = oracle::fuel(inst, sol.schedule, i, {row.begin(), row.end()});
      for (double v : x) {
        if (v < -kTolerance) return "fuel plant " + std::to_string(i);
      }
      const auto used = oracle::modulation_used(inst, sol, s, i);
      const auto& p = inst.type2[i];
      if (used[0] > p.initial_campaign.mmax + kTolerance) return "mmax plant " + std::to_string(i);
      for (int k = 0; k < p.cycle_count(); ++k) {
        if (used[k + 1] > p.cycles[k].campaign.mmax + kTolerance) return "mmax plant " + std::to_string(i);
      }
    }
  }
  return {};
}

Verdict oracle_feasibility() {
  int ok = 0;
  double worst = 0.0;
  std::string first_fail;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto g = generate_instance(oracle::family(seed));
    PipelineConfig cfg;
    cfg.seed = seed;
    cfg.iteration_mode = true;
    const auto t0 = Clock::now();
    const auto r = run_pipeline(g.instance, cfg);
    const double dt = seconds_since(t0);
    worst = std::max(worst, dt);
    std::string why;
    if (r.status != PipelineStatus::kFeasible) {
      why = "status";
    } else if (!check_feasibility(g.instance, r.solution).empty()) {
      why = "evaluator";
    } else {
      why = oracle_problems(g.instance, r.solution);
    }
    if (why.empty() && dt > kRunSeconds) why = "time";
    if (why.empty()) {
      ++ok;
    } else if (first_fail.empty()) {
      first_fail = " first failure seed " + std::to_string(seed) + " (" + why + ")";
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d/100 feasible, slowest %.2f s", ok, worst);
  return {ok == 100, buf + first_fail};
}

Verdict sat_equivalence() {
  int agree = 0;
  int satisfiable = 0;
  std::string first_fail;
  auto check = [&](const Formula& f, const std::string& name) {
    const auto truth = brute_force_1in3(f);
    const auto r = solve_schedule(encode_1in3sat(f));
    bool good = r.status != ScheduleStatus::kTimeout && (r.status == ScheduleStatus::kFeasible) == truth.has_value();
    if (good && r.status == ScheduleStatus::kFeasible) {
      try {
        good = satisfies_1in3(f, decode_assignment(f, r.schedule));
      } catch (const Error&) {
        good = false;
      }
    }
    if (truth) ++satisfiable;
    if (good) {
      ++agree;
    } else if (first_fail.empty()) {
      first_fail = " first failure " + name;
    }
  };
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const int n = 1 + static_cast<int>(seed % 8);
    const int c = 1 + static_cast<int>((seed * 7) % 10);
    check(random_formula(n, c, seed), "seed " + std::to_string(seed));
  }
  check({4, {{1, 2, -3}, {-1, 2, 4}}}, "two-clause regression");
  return {agree == 51, std::to_string(agree) + "/51 agree, " + std::to_string(satisfiable) + " satisfiable" + first_fail};
}

Verdict pwl_quality() {
  double worst_mean = 0.0;
  long below = 0;
  long samples = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto g = generate_instance(oracle::family(seed));
    const Instance& inst = g.instance;
    std::vector<PwlCost> exact;
    for (int t = 0; t < inst.steps(); ++t) exact.push_back(build_type1_cost(inst, t));
    const auto reach = type2_reach(inst);
    const ApproxCost approx(exact, 3 * inst.type2_count(), reach);
    const auto dmin = min_demand_scenario(inst.scenarios);
    std::mt19937_64 rng(seed);
    double sum = 0.0;
    long n = 0;
    for (int t = 0; t < inst.steps(); ++t) {
      const double hi = std::min(reach[t], dmin[t] - kPwlSlack);
      if (hi <= 0.0) continue;
      std::uniform_real_distribution<double> u(0.0, hi);
      for (int k = 0; k < 1000; ++k) {
        const double x = u(rng);
        const double e = exact[t](x);
        const double a = approx(t, x);
        if (a < e - 1e-9 * std::max(1.0, e)) ++below;
        sum += (a - e) / e;
        ++n;
      }
    }
    samples += n;
    if (n > 0) worst_mean = std::max(worst_mean, sum / n);
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "worst mean relative error %.3g over %ld samples, %ld below exact", worst_mean, samples,
                below);
  return {worst_mean <= kPwlMeanRelError && below == 0 && samples > 0, buf};
}

Verdict delta_consistency() {
  long delta_checked = 0;
  long delta_bad = 0;
  long feas_checked = 0;
  long feas_bad = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 200 && (delta_checked < 10000 || feas_checked < 10000); ++seed) {
    GeneratorParams gp = oracle::family(seed);
    gp.constraint_density = std::max(gp.constraint_density, 0.5);
    const auto g = generate_instance(gp);
    const Instance& inst = g.instance;
    const SearchModel model(inst, approx_for(inst, std::max(2, default_breakpoints(inst))));
    auto st = start_state(inst, model, seed);
    if (!st) continue;
    std::mt19937_64 rng(seed);
    for (int n = 0; n < 400; ++n) {
      const MoveSampler sampler(inst, st->schedule, inst.weeks());
      if (sampler.empty()) break;
      const Move mv = sampler.sample(rng);
      const bool fast = model.check_move_feasible(*st, mv);
      if (feas_checked < 10000) {
        Schedule moved = st->schedule;
        moved.start[mv.plant][mv.cycle] = mv.week;
        bool full = true;
        try {
          for (const auto& v : check_schedule(inst, moved)) full = full && !is_scheduling_kind(v.kind);
        } catch (const StructuralError&) {
          full = false;
        }
        ++feas_checked;
        feas_bad += fast != full ? 1 : 0;
      }
      if (!fast || delta_checked >= 10000) continue;
      auto cand = model.delta_evaluate(*st, mv);
      if (!cand) continue;
      const double before = st->cost;
      const double delta = cand->delta;
      model.apply(*st, std::move(*cand));
      const double full = model.full_cost(*st);
      const double err = std::fabs(before + delta - full) / std::max({1.0, std::fabs(before), std::fabs(full)});
      worst = std::max(worst, err);
      delta_bad += err > kDeltaRel ? 1 : 0;
      ++delta_checked;
      st->cost = full;
    }
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "delta %ld moves, %ld off (worst %.2g); feasibility %ld moves, %ld disagree",
                delta_checked, delta_bad, worst, feas_checked, feas_bad);
  return {delta_checked >= 10000 && feas_checked >= 10000 && delta_bad == 0 && feas_bad == 0, buf};
}

Verdict sa_behavior() {
  std::string detail;
  bool pass = true;
  std::mt19937_64 rng(2024);
  const int trials = 100000;
  for (double ratio : {0.5, 1.0, 2.0}) {
    int hits = 0;
    for (int k = 0; k < trials; ++k) hits += sa_accept(ratio * 3.0, 3.0, rng) ? 1 : 0;
    const double p = std::exp(-ratio);
    const double sigma = std::sqrt(p * (1.0 - p) / trials);
    const double freq = static_cast<double>(hits) / trials;
    const bool ok = std::fabs(freq - p) <= kSigmas * sigma;
    pass = pass && ok;
    char buf[80];
    std::snprintf(buf, sizeof buf, "ratio %.1f: %.4f vs %.4f; ", ratio, freq, p);
    detail += buf;
  }

  GeneratorParams gp;
  gp.I = 4;
  gp.K = 2;
  gp.H = 20;
  gp.S = 2;
  gp.overproduction_steps = 3;
  int improved = 0;
  int strict = 0;
  bool monotone = true;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    gp.seed = seed;
    const auto g = generate_instance(gp);
    const SearchModel model(g.instance, approx_for(g.instance, default_breakpoints(g.instance)));
    auto st = start_state(g.instance, model, seed);
    if (!st) continue;
    SaParams sa;
    sa.seed = seed;
    sa.time_budget = kSaSeconds;
    const auto r = anneal(model, *st, sa);
    for (std::size_t n = 1; n < r.best_trace.size(); ++n) monotone = monotone && r.best_trace[n] <= r.best_trace[n - 1];
    improved += r.best.cost <= st->cost ? 1 : 0;
    strict += r.best.cost < st->cost ? 1 : 0;
  }
  pass = pass && monotone && improved == 10;
  detail += "best non-increasing " + std::string(monotone ? "yes" : "no") + ", final <= initial in " +
            std::to_string(improved) + "/10 (strictly lower in " + std::to_string(strict) + ")";
  return {pass, detail};
}

Verdict fuel_exactness() {
  int trajectories = 0;
  double worst = 0.0;
  std::mt19937_64 rng(77);
  for (std::uint64_t seed = 1; trajectories < 1000; ++seed) {
    const auto g = generate_instance(oracle::family(seed));
    const Instance& inst = g.instance;
    for (int i = 0; i < inst.type2_count() && trajectories < 1000; ++i) {
      for (int rep = 0; rep < 5 && trajectories < 1000; ++rep) {
        std::vector<double> power(inst.steps());
        for (int t = 0; t < inst.steps(); ++t) {
          std::uniform_real_distribution<double> u(0.0, inst.type2[i].pmax[t]);
          power[t] = u(rng);
        }
        const auto got = simulate_plant_fuel(inst, g.witness, i, power);
        const auto want = oracle::fuel(inst, g.witness, i, power);
        for (std::size_t t = 0; t < want.size(); ++t) {
          worst = std::max(worst, std::fabs(got[t] - want[t]) / std::max(1.0, std::fabs(want[t])));
        }
        ++trajectories;
      }
    }
  }
  bool fb_ok = true;
  for (double bo : {1.0, 50.0, 1234.5}) {
    for (double fi : {bo, 1.5 * bo, 10.0 * bo}) fb_ok = fb_ok && profile_adjusted_fuel(fi, bo) == fi;
    fb_ok = fb_ok && profile_adjusted_fuel(-bo, bo) == 0.0;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d trajectories, worst relative gap %.2g; FB identities %s", trajectories, worst,
                fb_ok ? "hold" : "broken");
  return {worst <= kFuelRel && fb_ok, buf};
}

Verdict modulation_completeness() {
  int instances = 0;
  int clean = 0;
  std::string first_fail;
  for (std::uint64_t seed = 1; seed <= 200 && instances < 30; ++seed) {
    GeneratorParams gp = oracle::family(seed);
    gp.overproduction_steps = 5 + static_cast<int>(seed % 4);
    const auto g = generate_instance(gp);
    PipelineConfig cfg;
    cfg.seed = seed;
    cfg.iteration_mode = true;
    const auto r = run_pipeline(g.instance, cfg);
    if (r.overproduced_steps < 5) continue;
    ++instances;
    std::string why;
    if (r.status != PipelineStatus::kFeasible) {
      why = "status";
    } else {
      for (int s = 0; s < g.instance.scenario_count() && why.empty(); ++s) {
        for (int t = 0; t < g.instance.steps(); ++t) {
          double room = g.instance.scenarios.demand(t, s);
          for (const auto& p : g.instance.type1) room -= p.pmin(t, s);
          double p2 = 0.0;
          for (int j = 0; j < g.instance.type2_count(); ++j) p2 += r.solution.production[s].type2(j, t);
          if (p2 > room + kTolerance) why = "overproduction";
        }
      }
      if (why.empty()) why = oracle_problems(g.instance, r.solution);
    }
    if (why.empty()) {
      ++clean;
    } else if (first_fail.empty()) {
      first_fail = " first failure seed " + std::to_string(seed) + " (" + why + ")";
    }
  }
  return {instances >= 20 && clean == instances,
          std::to_string(clean) + "/" + std::to_string(instances) + " instances cleared" + first_fail};
}

Verdict determinism() {
  int identical = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto g = generate_instance(oracle::family(seed + 40));
    PipelineConfig cfg;
    cfg.seed = seed;
    cfg.iteration_mode = true;
    std::vector<std::string> files;
    for (int run = 0; run < 3; ++run) files.push_back(write_solution(g.instance, run_pipeline(g.instance, cfg).solution));
    identical += (files[0] == files[1] && files[1] == files[2]) ? 1 : 0;
  }
  return {identical == 5, std::to_string(identical) + "/5 instances byte-identical over 3 runs"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"1 oracle feasibility", oracle_feasibility},
      {"2 SAT equivalence", sat_equivalence},
      {"3 PWL quality", pwl_quality},
      {"4 delta consistency", delta_consistency},
      {"5 SA behavior", sa_behavior},
      {"6 fuel exactness", fuel_exactness},
      {"7 modulation completeness", modulation_completeness},
      {"8 determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s  criterion %s: %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
    failed += v.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
