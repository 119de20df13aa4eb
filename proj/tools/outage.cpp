#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include "outage/errors.hpp"
#include "outage/io.hpp"
#include "outage/pipeline.hpp"
#include "outage/satgen.hpp"

namespace {

using Clock = std::chrono::steady_clock;

constexpr int kExitFeasible = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitSchedulerFailed = 3;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    outage::write_file(path, text);
  }
}

outage::ObjectiveMode parse_mode(const std::string& name) {
  if (name == "averaged") return outage::ObjectiveMode::kAveragedResidual;
  return outage::ObjectiveMode::kAsPrinted;
}

// Every long option also reads OUTAGE_<NAME> from the environment.
void bind_environment(CLI::App& app) {
  for (CLI::Option* opt : app.get_options()) {
    std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || opt->get_positional()) continue;
    std::string env = "OUTAGE_";
    for (char ch : name) env += ch == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    opt->envname(env);
  }
}

struct SolveArgs {
  std::string instance;
  std::string output = "-";
  std::string mode = "printed";
  std::string log_path;
  outage::PipelineConfig cfg;
  bool verbose = false;
};

int run_solve(SolveArgs& a) {
  using namespace outage;
  double io_time = 0.0;
  auto t0 = Clock::now();
  const Instance inst = parse_instance(read_file(a.instance));
  io_time += seconds_since(t0);

  a.cfg.mode = parse_mode(a.mode);
  std::ostringstream log;
  if (a.verbose) a.cfg.log = &log;
  const PipelineResult r = run_pipeline(inst, a.cfg);
  if (a.verbose) std::cerr << log.str();

  if (r.status != PipelineStatus::kSchedulerFailed) {
    t0 = Clock::now();
    emit(a.output, write_solution(inst, r.solution, a.cfg.mode));
    io_time += seconds_since(t0);
  }

  const auto& tm = r.timings;
  std::fprintf(stderr, "status      %s\n",
               r.status == PipelineStatus::kFeasible     ? "feasible"
               : r.status == PipelineStatus::kInfeasible ? "infeasible"
                                                         : "scheduler-failed");
  if (r.status != PipelineStatus::kSchedulerFailed) {
    std::fprintf(stderr, "objective   %.6f\n", r.objective);
    std::fprintf(stderr, "violations  %zu\n", r.violations.size());
    std::fprintf(stderr, "search      %.6f -> %.6f (%llu iterations)\n", r.search_initial, r.search_final,
                 static_cast<unsigned long long>(r.search_iterations));
    std::fprintf(stderr, "overproduced steps before modulation %d\n", r.overproduced_steps);
  }
  std::fprintf(stderr, "time cp          %.3f s\n", tm.scheduler + tm.planner);
  std::fprintf(stderr, "time delta-eval  %.3f s\n", tm.search);
  std::fprintf(stderr, "time modulation  %.3f s\n", tm.modulation);
  std::fprintf(stderr, "time io          %.3f s\n", io_time);

  switch (r.status) {
    case PipelineStatus::kFeasible:
      return kExitFeasible;
    case PipelineStatus::kInfeasible:
      return kExitInfeasible;
    case PipelineStatus::kSchedulerFailed:
      std::fprintf(stderr, "scheduler found no schedule (%s)\n",
                   r.scheduler_status == ScheduleStatus::kInfeasible ? "proved infeasible" : "budget exhausted");
      return kExitSchedulerFailed;
  }
  return kExitError;
}

int run_validate(const std::string& instance_path, const std::string& solution_path, const std::string& mode) {
  using namespace outage;
  const Instance inst = parse_instance(read_file(instance_path));
  const ParsedSolution ps = parse_solution(inst, read_file(solution_path));
  const auto violations = check_feasibility(inst, ps.solution);
  std::cout << write_report(violations);
  const double objective = compute_objective(inst, ps.solution, parse_mode(mode));
  std::fprintf(stderr, "objective %.6f", objective);
  if (ps.objective) std::fprintf(stderr, " (file says %.6f)", *ps.objective);
  std::fprintf(stderr, "\nviolations %zu\n", violations.size());
  return violations.empty() ? kExitFeasible : kExitInfeasible;
}

int run_stats(const std::string& instance_path) {
  using namespace outage;
  const Instance inst = parse_instance(read_file(instance_path));
  int cycles = 0;
  for (const auto& p : inst.type2) cycles += static_cast<int>(p.cycles.size());
  const auto& c = inst.coupling;
  std::cout << "weeks " << inst.weeks() << "\nsteps " << inst.steps() << "\nscenarios " << inst.scenario_count()
            << "\ntype1 " << inst.type1_count() << "\ntype2 " << inst.type2_count() << "\ncycles " << cycles
            << "\nseparations " << c.separations.size() << "\nmax_offline " << c.max_offline.size()
            << "\nresources " << c.resources.size() << "\noffline_capacity " << c.offline_capacity.size() << '\n';
  return kExitFeasible;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Outage scheduling and refueling solver"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Schedule, search and modulate; write a solution");
  s->add_option("instance", solve.instance, "Instance file")->required()->check(CLI::ExistingFile);
  s->add_option("-o,--output", solve.output, "Solution file, - for stdout");
  s->add_option("--time-budget", solve.cfg.time_budget, "Seconds for all phases")->check(CLI::PositiveNumber);
  s->add_option("--scheduler-share", solve.cfg.scheduler_share, "Budget fraction for the scheduler")
      ->check(CLI::Range(0.0, 1.0));
  s->add_option("--seed", solve.cfg.seed, "Random seed");
  s->add_option("--refuel-quantum", solve.cfg.refuel_quantum, "Refuel step in fuel units")->check(CLI::PositiveNumber);
  s->add_option("--breakpoints", solve.cfg.breakpoints, "Cost breakpoints, 0 = 3 per type-2 plant")
      ->check(CLI::NonNegativeNumber);
  s->add_option("--mode", solve.mode, "Objective residual weighting")->check(CLI::IsMember({"printed", "averaged"}));
  s->add_flag("--iteration-mode", solve.cfg.iteration_mode, "Bound phases by node and iteration counts, not time");
  s->add_option("--scheduler-nodes", solve.cfg.scheduler_nodes, "Scheduler nodes in iteration mode");
  s->add_option("--search-iterations", solve.cfg.search_iterations, "Search iterations in iteration mode");
  s->add_option("--sa-cooling", solve.cfg.sa.cooling, "Temperature factor per plateau")->check(CLI::Range(0.0, 1.0));
  s->add_option("--sa-start-accept-ratio", solve.cfg.sa.start_accept_ratio, "Initial acceptance ratio")
      ->check(CLI::Range(0.0, 1.0));
  s->add_option("--sa-stop-idle", solve.cfg.sa.stop_idle, "Idle iterations before stopping");
  s->add_option("--sa-n-plateau", solve.cfg.sa.n_plateau, "Iterations per plateau")->check(CLI::PositiveNumber);
  s->add_option("--sa-k-restart", solve.cfg.sa.k_restart, "Temperature factor on restart");
  s->add_option("--sa-m-idle", solve.cfg.sa.m_idle, "Idle iterations before restarting");
  s->add_option("--sa-radius", solve.cfg.sa.radius, "Move radius in weeks")->check(CLI::PositiveNumber);
  s->add_option("--sa-probes", solve.cfg.sa.probes, "Moves sampled to set the first temperature");
  s->add_option("--sa-max-iterations", solve.cfg.sa.max_iterations, "Iteration cap, 0 = none");
  s->add_flag("-v,--verbose", solve.verbose, "Phase log on stderr");
  bind_environment(*s);

  std::string v_instance, v_solution, v_mode = "printed";
  auto* v = app.add_subcommand("validate", "Check a solution against an instance");
  v->add_option("instance", v_instance, "Instance file")->required()->check(CLI::ExistingFile);
  v->add_option("solution", v_solution, "Solution file")->required()->check(CLI::ExistingFile);
  v->add_option("--mode", v_mode, "Objective residual weighting")->check(CLI::IsMember({"printed", "averaged"}));
  bind_environment(*v);

  outage::GeneratorParams gp;
  std::string g_output = "-", g_witness;
  auto* g = app.add_subcommand("generate", "Generate a random instance with a feasible witness");
  g->add_option("-o,--output", g_output, "Instance file, - for stdout");
  g->add_option("--witness", g_witness, "Also write the witness solution here");
  g->add_option("--seed", gp.seed, "Random seed");
  g->add_option("--plants", gp.I, "Type-2 plants")->check(CLI::PositiveNumber);
  g->add_option("--type1", gp.J, "Type-1 plants")->check(CLI::PositiveNumber);
  g->add_option("--cycles", gp.K, "Cycles per plant")->check(CLI::PositiveNumber);
  g->add_option("--weeks", gp.H, "Horizon in weeks")->check(CLI::PositiveNumber);
  g->add_option("--steps-per-week", gp.steps_per_week, "Time steps per week")->check(CLI::PositiveNumber);
  g->add_option("--scenarios", gp.S, "Demand scenarios")->check(CLI::PositiveNumber);
  g->add_option("--density", gp.constraint_density, "Coupling constraint density")->check(CLI::Range(0.0, 1.0));
  g->add_option("--overproduction-steps", gp.overproduction_steps, "Steps with zero demand slack")
      ->check(CLI::NonNegativeNumber);
  bind_environment(*g);

  std::string e_input, e_output = "-";
  auto* e = app.add_subcommand("encode-sat", "Encode a 1-in-3-SAT formula as an instance");
  e->add_option("formula", e_input, "DIMACS-like file, 3 literals per clause")->required()->check(CLI::ExistingFile);
  e->add_option("-o,--output", e_output, "Instance file, - for stdout");
  bind_environment(*e);

  std::string st_instance;
  auto* st = app.add_subcommand("stats", "Print instance dimensions");
  st->add_option("instance", st_instance, "Instance file")->required()->check(CLI::ExistingFile);
  bind_environment(*st);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*s) return run_solve(solve);
    if (*v) return run_validate(v_instance, v_solution, v_mode);
    if (*g) {
      const auto generated = outage::generate_instance(gp);
      emit(g_output, outage::write_instance(generated.instance));
      if (!g_witness.empty()) {
        outage::write_file(g_witness, outage::write_solution(generated.instance, generated.witness_solution));
      }
      return kExitFeasible;
    }
    if (*e) {
      const auto formula = outage::parse_dimacs(outage::read_file(e_input));
      emit(e_output, outage::write_instance(outage::encode_1in3sat(formula)));
      return kExitFeasible;
    }
    if (*st) return run_stats(st_instance);
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return kExitError;
  }
  return kExitError;
}
