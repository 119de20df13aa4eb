#include "outage/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace outage {

namespace {

constexpr double kOverTolerance = 1e-9;

double step_total(const std::vector<PlannerResult>& plans, int t) {
  double total = 0.0;
  for (const auto& plan : plans) total += plan.p[t];
  return total;
}

class Modulator {
 public:
  Modulator(const Instance& inst, Schedule schedule, std::vector<PlannerResult> plans,
            std::vector<std::vector<double>> caps, std::vector<double> ceiling, bool allow_repair)
      : inst_(inst),
        schedule_(std::move(schedule)),
        plans_(std::move(plans)),
        caps_(std::move(caps)),
        ceiling_(std::move(ceiling)),
        repair_(allow_repair) {
    const int T = inst.steps();
    for (int i = 0; i < inst.type2_count(); ++i) {
      schedule_.refuel[i] = plans_[i].refuel;
      timelines_.push_back(derive_timeline(inst, schedule_, i));
      roles_.push_back(step_roles(timelines_.back(), T));
      std::vector<int> end(T, 0);
      for (int t = timelines_[i].initial_campaign.begin; t < timelines_[i].initial_campaign.end; ++t) {
        end[t] = timelines_[i].initial_campaign.end;
      }
      for (const auto& span : timelines_[i].cycles) {
        for (int t = span.campaign.begin; t < span.campaign.end; ++t) end[t] = span.campaign.end;
      }
      campaign_end_.push_back(std::move(end));
    }
  }

  // Forward passes over time; true once no step exceeds the ceiling.
  bool run(const ModulationConfig& cfg) {
    for (int pass = 0; pass < cfg.passes; ++pass) {
      if (sweep()) return true;
    }
    if (!repair_) return false;
    for (int round = 0; round < cfg.fallback_rounds; ++round) {
      if (!cut_refuel(cfg.refuel_quantum)) return false;
      if (sweep()) return true;
    }
    return false;
  }

  Schedule& schedule() { return schedule_; }
  std::vector<PlannerResult>& plans() { return plans_; }
  std::vector<std::vector<double>>& caps() { return caps_; }

 private:
  bool sweep() {
    bool clean = true;
    for (int t = 0; t < inst_.steps(); ++t) {
      double over = step_total(plans_, t) - ceiling_[t];
      if (over <= kOverTolerance) continue;
      for (int i : candidates(t)) {
        over = reduce(i, t, over);
        if (over <= kOverTolerance) break;
      }
      clean = clean && over <= kOverTolerance;
    }
    return clean;
  }

  // Full-regime plants producing at t, earliest campaign end first.
  std::vector<int> candidates(int t) const {
    std::vector<int> out;
    for (int i = 0; i < inst_.type2_count(); ++i) {
      const int c = roles_[i].campaign[t];
      if (c == StepRoles::kOutage) continue;
      if (plans_[i].p[t] > 0.0 && plans_[i].x[t] >= inst_.type2[i].campaign(c).bo) out.push_back(i);
    }
    std::stable_sort(out.begin(), out.end(),
                     [&](int a, int b) { return campaign_end_[a][t] < campaign_end_[b][t]; });
    return out;
  }

  double budget_left(int i, int t) const {
    const auto& pl = inst_.type2[i];
    const int c = roles_[i].campaign[t];
    const CampaignParams& cp = pl.campaign(c);
    const StepRange range = c < 0 ? timelines_[i].initial_campaign : campaign_range(i, c);
    const double D = inst_.grid.hours_per_step();
    double used = 0.0;
    for (int u = range.begin; u < range.end; ++u) {
      if (plans_[i].x[u] >= cp.bo) used += (pl.pmax[u] - plans_[i].p[u]) * D;
    }
    return cp.mmax - used;
  }

  StepRange campaign_range(int i, int c) const {
    for (const auto& span : timelines_[i].cycles) {
      if (span.cycle == c) return span.campaign;
    }
    return {};
  }

  // Tries to lower plant i at t; returns the remaining overproduction.
  double reduce(int i, int t, double over) {
    const double D = inst_.grid.hours_per_step();
    const double p = plans_[i].p[t];
    const double budget = budget_left(i, t) / D;
    if (budget <= 0.0) return over;
    double cap;
    if (over <= std::min(p, budget)) {
      cap = canonical_down(p - over);
    } else if (p <= budget) {
      cap = 0.0;
    } else {
      cap = canonical_up(p - budget);
    }
    cap = std::max(0.0, cap);
    if (cap >= p) return over;
    const double saved = caps_[i][t];
    caps_[i][t] = std::min(saved, cap);
    if (!replan(i)) {
      caps_[i][t] = saved;
      return over;
    }
    return step_total(plans_, t) - ceiling_[t];
  }

  bool replan(int i) {
    PlannerResult next;
    if (repair_) {
      next = plan_production(inst_, schedule_, i, plans_[i].refuel, caps_[i]);
    } else {
      next.refuel = plans_[i].refuel;
      simulate_greedy(inst_, i, roles_[i], next.refuel, caps_[i], next);
      next.feasible = !first_issue(inst_, i, timelines_[i], next);
    }
    if (!next.feasible) return false;
    schedule_.refuel[i] = next.refuel;
    plans_[i] = std::move(next);
    return true;
  }

  // Fallback: run a plant shorter of fuel by cutting the latest refuel before
  // the first overproducing step.
  bool cut_refuel(double quantum) {
    for (int t = 0; t < inst_.steps(); ++t) {
      if (step_total(plans_, t) - ceiling_[t] <= kOverTolerance) continue;
      for (int i = 0; i < inst_.type2_count(); ++i) {
        if (plans_[i].p[t] <= 0.0) continue;
        for (auto it = timelines_[i].cycles.rbegin(); it != timelines_[i].cycles.rend(); ++it) {
          if (it->outage.begin >= t) continue;
          const double rmin = inst_.type2[i].cycles[it->cycle].rmin;
          double& r = plans_[i].refuel[it->cycle];
          if (r <= rmin) continue;
          const double saved = r;
          r = std::max(rmin, canonical_down(r - quantum));
          if (replan(i)) return true;
          plans_[i].refuel[it->cycle] = saved;
        }
      }
      return false;
    }
    return false;
  }

  const Instance& inst_;
  Schedule schedule_;
  std::vector<PlannerResult> plans_;
  std::vector<std::vector<double>> caps_;
  std::vector<double> ceiling_;
  bool repair_;
  std::vector<PlantTimeline> timelines_;
  std::vector<StepRoles> roles_;
  std::vector<std::vector<int>> campaign_end_;
};

std::vector<double> scenario_ceiling(const Instance& inst, int s) {
  std::vector<double> out(inst.steps());
  for (int t = 0; t < inst.steps(); ++t) {
    double v = inst.scenarios.demand(t, s);
    for (const auto& p : inst.type1) v -= p.pmin(t, s);
    out[t] = v;
  }
  return out;
}

std::vector<std::vector<double>> no_caps(const Instance& inst) {
  return std::vector<std::vector<double>>(inst.type2_count(),
                                          std::vector<double>(inst.steps(), std::numeric_limits<double>::infinity()));
}

// Exact production of scenario s for the given plans; nullopt if type-1
// plants cannot absorb the residual demand.
std::optional<ScenarioProduction> dispatch(const Instance& inst, int s, const std::vector<PlannerResult>& plans) {
  const int T = inst.steps();
  ScenarioProduction sp{Table<double>(inst.type1_count(), T), Table<double>(inst.type2_count(), T)};
  std::vector<double> row(inst.type1_count());
  for (int t = 0; t < T; ++t) {
    double p2 = 0.0;
    for (int i = 0; i < inst.type2_count(); ++i) {
      sp.type2(i, t) = plans[i].p[t];
      p2 += plans[i].p[t];
    }
    if (!dispatch_type1(inst, t, s, inst.scenarios.demand(t, s) - p2, row)) return std::nullopt;
    for (int j = 0; j < inst.type1_count(); ++j) sp.type1(j, t) = row[j];
  }
  return sp;
}

// Scenario share of the objective: type-1 cost and weighted residual fuel.
double scenario_score(const Instance& inst, int s, const ScenarioProduction& sp,
                      const std::vector<PlannerResult>& plans, ObjectiveMode mode) {
  const int T = inst.steps();
  std::vector<double> row(inst.type1_count());
  double type1 = 0.0;
  for (int t = 0; t < T; ++t) {
    for (int j = 0; j < inst.type1_count(); ++j) row[j] = sp.type1(j, t);
    type1 += type1_cost(inst, t, s, row);
  }
  double residual = 0.0;
  for (int i = 0; i < inst.type2_count(); ++i) residual += inst.type2[i].c_final * plans[i].x[T];
  return type1 / inst.scenario_count() - residual_weight(inst, mode) * residual;
}

}  // namespace

std::vector<int> overproduced_steps(const std::vector<PlannerResult>& plans, const std::vector<double>& ceiling) {
  std::vector<int> out;
  for (int t = 0; t < static_cast<int>(ceiling.size()); ++t) {
    if (step_total(plans, t) - ceiling[t] > kOverTolerance) out.push_back(t);
  }
  return out;
}

MinScenarioResult modulate_min_scenario(const Instance& instance, const Schedule& schedule,
                                        std::vector<PlannerResult> plans, const ModulationConfig& config) {
  Modulator m(instance, schedule, std::move(plans), no_caps(instance), type2_ceiling(instance), true);
  MinScenarioResult out;
  out.feasible = m.run(config);
  out.schedule = std::move(m.schedule());
  out.plans = std::move(m.plans());
  out.caps = std::move(m.caps());
  return out;
}

ScenarioResult modulate_per_scenario(const Instance& instance, const MinScenarioResult& base, int scenario,
                                     const ModulationConfig& config) {
  ScenarioResult out;
  std::optional<double> best;

  // Candidate 1: the unmodulated plan, modulated against this scenario alone.
  std::vector<PlannerResult> fresh;
  bool fresh_ok = true;
  for (int i = 0; i < instance.type2_count(); ++i) {
    const auto tl = derive_timeline(instance, base.schedule, i);
    PlannerResult plan;
    plan.refuel = base.plans[i].refuel;
    simulate_greedy(instance, i, step_roles(tl, instance.steps()), plan.refuel, {}, plan);
    plan.feasible = !first_issue(instance, i, tl, plan);
    fresh_ok = fresh_ok && plan.feasible;
    fresh.push_back(std::move(plan));
  }
  if (fresh_ok) {
    Modulator m(instance, base.schedule, std::move(fresh), no_caps(instance), scenario_ceiling(instance, scenario),
                false);
    if (m.run(config)) {
      if (auto sp = dispatch(instance, scenario, m.plans())) {
        best = scenario_score(instance, scenario, *sp, m.plans(), config.mode);
        out = {true, std::move(*sp), false};
      }
    }
  }

  // Candidate 2: the minimum-scenario plan, tightened further if needed.
  Modulator m(instance, base.schedule, base.plans, base.caps, scenario_ceiling(instance, scenario), false);
  if (m.run(config)) {
    if (auto sp = dispatch(instance, scenario, m.plans())) {
      const double score = scenario_score(instance, scenario, *sp, m.plans(), config.mode);
      if (!best || score < *best) out = {true, std::move(*sp), true};
    }
  }
  return out;
}

ModulationOutcome run_modulation(const Instance& instance, const Schedule& schedule,
                                 std::vector<PlannerResult> plans, const ModulationConfig& config) {
  ModulationOutcome out;
  out.overproduced_before = static_cast<int>(overproduced_steps(plans, type2_ceiling(instance)).size());
  const MinScenarioResult base = modulate_min_scenario(instance, schedule, std::move(plans), config);
  out.solution.schedule = base.schedule;
  out.feasible = base.feasible;
  for (int s = 0; s < instance.scenario_count(); ++s) {
    ScenarioResult r = modulate_per_scenario(instance, base, s, config);
    if (!r.feasible) {
      out.feasible = false;
      // Best effort: keep the shape valid with the minimum-scenario plan.
      const int T = instance.steps();
      r.production = {Table<double>(instance.type1_count(), T), Table<double>(instance.type2_count(), T)};
      for (int i = 0; i < instance.type2_count(); ++i) {
        for (int t = 0; t < T; ++t) r.production.type2(i, t) = base.plans[i].p[t];
      }
      std::vector<double> row(instance.type1_count());
      for (int t = 0; t < T; ++t) {
        double p2 = 0.0;
        for (int i = 0; i < instance.type2_count(); ++i) p2 += base.plans[i].p[t];
        dispatch_type1(instance, t, s, instance.scenarios.demand(t, s) - p2, row);
        for (int j = 0; j < instance.type1_count(); ++j) r.production.type1(j, t) = row[j];
      }
    }
    out.solution.production.push_back(std::move(r.production));
  }
  return out;
}

}  // namespace outage
