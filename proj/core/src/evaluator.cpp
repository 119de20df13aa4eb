#include "outage/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "outage/errors.hpp"

namespace outage {

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kOutageBounds: return "OutageBounds";
    case ViolationKind::kReloadBounds: return "ReloadBounds";
    case ViolationKind::kDemand: return "Demand";
    case ViolationKind::kType1Bounds: return "Type1Bounds";
    case ViolationKind::kType2Upper: return "Type2Upper";
    case ViolationKind::kMaxModulation: return "MaxModulation";
    case ViolationKind::kPowerProfile: return "PowerProfile";
    case ViolationKind::kFuelNonneg: return "FuelNonneg";
    case ViolationKind::kAmax: return "Amax";
    case ViolationKind::kSmax: return "Smax";
    case ViolationKind::kSeparation: return "Separation";
    case ViolationKind::kMaxOffline: return "MaxOffline";
    case ViolationKind::kResource: return "Resource";
    case ViolationKind::kOfflineCapacity: return "OfflineCapacity";
    case ViolationKind::kOutageOrder: return "OutageOrder";
  }
  return "Unknown";
}

bool is_scheduling_kind(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kOutageBounds:
    case ViolationKind::kSeparation:
    case ViolationKind::kMaxOffline:
    case ViolationKind::kResource:
    case ViolationKind::kOfflineCapacity:
    case ViolationKind::kOutageOrder:
      return true;
    default:
      return false;
  }
}

double residual_weight(const Instance& instance, ObjectiveMode mode) {
  return mode == ObjectiveMode::kAsPrinted ? 1.0 : 1.0 / instance.scenario_count();
}

std::vector<double> simulate_plant_fuel(const Instance& instance, const Schedule& schedule, int plant,
                                        std::span<const double> power) {
  const auto& p = instance.type2[plant];
  const int T = instance.steps();
  const double D = instance.grid.hours_per_step();
  // Reload step of each scheduled outage; a later cycle wins on collisions.
  std::vector<int> reload(T, -1);
  for (int k = 0; k < p.cycle_count(); ++k) {
    const auto& ha = schedule.start[plant][k];
    if (!ha || *ha < 0 || *ha >= instance.weeks()) continue;
    reload[instance.grid.steps_of_week(*ha).begin] = k;
  }
  std::vector<double> x(T + 1);
  x[0] = p.xi;
  for (int t = 0; t < T; ++t) {
    const int k = reload[t];
    x[t + 1] = k >= 0 ? fuel_after_reload(x[t], schedule.refuel[plant][k], p.cycles[k])
                      : fuel_after_production(x[t], power[t], D);
  }
  return x;
}

Table<double> simulate_fuel(const Instance& instance, const Schedule& schedule,
                            const Table<double>& type2_power) {
  const int T = instance.steps();
  Table<double> x(instance.type2_count(), T + 1);
  for (int i = 0; i < instance.type2_count(); ++i) {
    auto row = simulate_plant_fuel(instance, schedule, i, type2_power.row(i));
    std::copy(row.begin(), row.end(), x.row(i).begin());
  }
  return x;
}

namespace {

bool active_in_week(const Instance& inst, const Schedule& s, OutageRef o, int h) {
  const auto& ha = s.start[o.plant][o.cycle];
  return ha && *ha <= h && h < *ha + inst.cycle(o).da;
}

bool holds_resource(const Instance& inst, const Schedule& s, OutageRef o, int h) {
  const auto& ha = s.start[o.plant][o.cycle];
  if (!ha) return false;
  for (const auto& w : inst.cycle(o).resource_windows) {
    const int begin = *ha + w.offset;
    if (h >= begin && h < begin + w.duration) return true;
  }
  return false;
}

bool plant_offline_at(const Instance& inst, const Schedule& s, int plant, int week) {
  for (int k = 0; k < inst.type2[plant].cycle_count(); ++k) {
    if (active_in_week(inst, s, {plant, k}, week)) return true;
  }
  return false;
}

void check_structure(const Instance& inst, const Schedule& s, std::vector<Violation>& out) {
  const int H = inst.weeks();
  for (int i = 0; i < inst.type2_count(); ++i) {
    const auto& plant = inst.type2[i];
    for (int k = 0; k < plant.cycle_count(); ++k) {
      const auto& c = plant.cycles[k];
      const auto& ha = s.start[i][k];
      const double r = s.refuel[i][k];
      if (ha) {
        double excess = 0.0;
        if (c.to && *ha < *c.to) excess += *c.to - *ha;
        if (c.ta && *ha > *c.ta) excess += *ha - *c.ta;
        if (*ha < 0) excess += -*ha;
        if (*ha + c.da > H) excess += *ha + c.da - H;
        if (excess > 0) out.push_back({ViolationKind::kOutageBounds, i, k, -1, -1, *ha, -1, excess});
        if (r < c.rmin - kTolerance) {
          out.push_back({ViolationKind::kReloadBounds, i, k, -1, -1, -1, -1, c.rmin - r});
        } else if (r > c.rmax + kTolerance) {
          out.push_back({ViolationKind::kReloadBounds, i, k, -1, -1, -1, -1, r - c.rmax});
        }
      } else {
        if (c.mandatory()) out.push_back({ViolationKind::kOutageBounds, i, k, -1, -1, -1, -1, 1.0});
        if (std::fabs(r) > kTolerance) {
          out.push_back({ViolationKind::kReloadBounds, i, k, -1, -1, -1, -1, std::fabs(r)});
        }
      }
      if (k > 0 && ha) {
        const auto& prev = s.start[i][k - 1];
        if (!prev) {
          out.push_back({ViolationKind::kOutageOrder, i, k, -1, -1, *ha, -1, 1.0});
        } else if (*ha < *prev + plant.cycles[k - 1].da) {
          out.push_back({ViolationKind::kOutageOrder, i, k, -1, -1, *ha, -1,
                         static_cast<double>(*prev + plant.cycles[k - 1].da - *ha)});
        }
      }
    }
  }
}

void check_coupling(const Instance& inst, const Schedule& s, std::vector<Violation>& out) {
  const auto& cc = inst.coupling;
  const int H = inst.weeks();
  for (int n = 0; n < static_cast<int>(cc.separations.size()); ++n) {
    const auto& sep = cc.separations[n];
    const auto& a = s.start[sep.first.plant][sep.first.cycle];
    const auto& b = s.start[sep.second.plant][sep.second.cycle];
    if (!a || !b) continue;
    auto intersects = [&](int ha, OutageRef o) {
      return ha <= sep.week_hi && ha + inst.cycle(o).da - 1 >= sep.week_lo;
    };
    if (!intersects(*a, sep.first) || !intersects(*b, sep.second)) continue;
    const int forward = *a - *b;
    const int backward = *b - *a;
    if (forward >= sep.se || backward >= sep.se_prime) continue;
    const double need = std::min(sep.se - forward, sep.se_prime - backward);
    out.push_back({ViolationKind::kSeparation, sep.first.plant, sep.first.cycle, -1, -1, -1, n, need});
  }
  for (int n = 0; n < static_cast<int>(cc.max_offline.size()); ++n) {
    const auto& m = cc.max_offline[n];
    int count = 0;
    for (auto o : m.outages) count += active_in_week(inst, s, o, m.week) ? 1 : 0;
    if (count > m.limit) {
      out.push_back({ViolationKind::kMaxOffline, -1, -1, -1, -1, m.week, n,
                     static_cast<double>(count - m.limit)});
    }
  }
  for (int n = 0; n < static_cast<int>(cc.resources.size()); ++n) {
    const auto& r = cc.resources[n];
    for (int h = 0; h < H; ++h) {
      int count = 0;
      for (auto o : r.outages) count += holds_resource(inst, s, o, h) ? 1 : 0;
      if (count > r.capacity) {
        out.push_back({ViolationKind::kResource, -1, -1, -1, -1, h, n,
                       static_cast<double>(count - r.capacity)});
      }
    }
  }
  for (int n = 0; n < static_cast<int>(cc.offline_capacity.size()); ++n) {
    const auto& c = cc.offline_capacity[n];
    for (int h : c.weeks) {
      std::vector<int> offline;
      for (int i : c.plants) {
        if (plant_offline_at(inst, s, i, h)) offline.push_back(i);
      }
      if (offline.empty()) continue;
      const StepRange steps = inst.grid.steps_of_week(h);
      for (int t = steps.begin; t < steps.end; ++t) {
        double load = 0.0;
        for (int i : offline) load += inst.type2[i].pmax[t];
        if (load > c.imax + kTolerance) {
          out.push_back({ViolationKind::kOfflineCapacity, -1, -1, t, -1, h, n, load - c.imax});
        }
      }
    }
  }
}

void require_dims(const Instance& inst, const Solution& sol) {
  const int T = inst.steps();
  if (static_cast<int>(sol.schedule.start.size()) != inst.type2_count() ||
      sol.schedule.refuel.size() != sol.schedule.start.size()) {
    throw StructuralError("schedule has wrong number of plants");
  }
  for (int i = 0; i < inst.type2_count(); ++i) {
    const auto k = static_cast<std::size_t>(inst.type2[i].cycle_count());
    if (sol.schedule.start[i].size() != k || sol.schedule.refuel[i].size() != k) {
      throw StructuralError("schedule row " + std::to_string(i) + " has wrong cycle count");
    }
  }
  if (static_cast<int>(sol.production.size()) != inst.scenario_count()) {
    throw StructuralError("production count differs from scenario count");
  }
  for (const auto& sp : sol.production) {
    if (static_cast<int>(sp.type1.rows()) != inst.type1_count() ||
        static_cast<int>(sp.type2.rows()) != inst.type2_count() ||
        (inst.type1_count() > 0 && static_cast<int>(sp.type1.cols()) != T) ||
        (inst.type2_count() > 0 && static_cast<int>(sp.type2.cols()) != T)) {
      throw StructuralError("production table dimensions differ from instance");
    }
  }
}

void check_type2_plant(const Instance& inst, const Solution& sol, int s, int i,
                       const PlantTimeline& tl, std::vector<Violation>& out) {
  const auto& plant = inst.type2[i];
  const int T = inst.steps();
  const double D = inst.grid.hours_per_step();
  const double eps = inst.scenarios.epsilon;
  const auto power = sol.production[s].type2.row(i);
  const auto x = simulate_plant_fuel(inst, sol.schedule, i, power);
  const StepRoles roles = step_roles(tl, T);

  std::vector<double> modulation(plant.cycle_count() + 1, 0.0);  // index cycle + 1
  for (int t = 0; t < T; ++t) {
    const double p = power[t];
    const int c = roles.campaign[t];
    if (c == StepRoles::kOutage) {
      if (std::fabs(p) > kTolerance) {
        out.push_back({ViolationKind::kType2Upper, i, -1, t, s, -1, -1, std::fabs(p)});
      }
      continue;
    }
    if (p < -kTolerance) {
      out.push_back({ViolationKind::kType2Upper, i, c, t, s, -1, -1, -p});
      continue;
    }
    const CampaignParams& cp = plant.campaign(c);
    const double pmax = plant.pmax[t];
    if (x[t] >= cp.bo) {
      if (p > pmax + kTolerance) {
        out.push_back({ViolationKind::kType2Upper, i, c, t, s, -1, -1, p - pmax});
      }
      modulation[c + 1] += (pmax - p) * D;
    } else {
      const double target = cp.pb(x[t]) * pmax;
      if (x[t] >= target * D) {
        const double lo = (1.0 - eps) * target;
        const double hi = (1.0 + eps) * target;
        if (p < lo - kTolerance) {
          out.push_back({ViolationKind::kPowerProfile, i, c, t, s, -1, -1, lo - p});
        } else if (p > hi + kTolerance) {
          out.push_back({ViolationKind::kPowerProfile, i, c, t, s, -1, -1, p - hi});
        }
      } else if (p > kTolerance) {
        out.push_back({ViolationKind::kPowerProfile, i, c, t, s, -1, -1, p});
      }
    }
  }
  for (int c = -1; c < plant.cycle_count(); ++c) {
    const double used = modulation[c + 1];
    if (used > plant.campaign(c).mmax + kTolerance) {
      out.push_back({ViolationKind::kMaxModulation, i, c, -1, s, -1, -1,
                     used - plant.campaign(c).mmax});
    }
  }
  for (int t = 0; t <= T; ++t) {
    if (x[t] < -kTolerance) out.push_back({ViolationKind::kFuelNonneg, i, -1, t, s, -1, -1, -x[t]});
  }
  for (const auto& span : tl.cycles) {
    const auto& c = plant.cycles[span.cycle];
    const int t = span.outage.begin;
    if (x[t] > c.amax + kTolerance) {
      out.push_back({ViolationKind::kAmax, i, span.cycle, t, s, -1, -1, x[t] - c.amax});
    }
    if (x[t + 1] > c.smax + kTolerance) {
      out.push_back({ViolationKind::kSmax, i, span.cycle, t + 1, s, -1, -1, x[t + 1] - c.smax});
    }
  }
}

}  // namespace

std::vector<Violation> check_schedule(const Instance& instance, const Schedule& schedule) {
  std::vector<Violation> out;
  check_structure(instance, schedule, out);
  check_coupling(instance, schedule, out);
  std::sort(out.begin(), out.end(),
            [](const Violation& a, const Violation& b) { return a.sort_key() < b.sort_key(); });
  return out;
}

std::vector<Violation> check_feasibility(const Instance& instance, const Solution& solution) {
  require_dims(instance, solution);
  std::vector<Violation> out = check_schedule(instance, solution.schedule);

  const int T = instance.steps();
  std::vector<std::optional<PlantTimeline>> timelines(instance.type2_count());
  for (int i = 0; i < instance.type2_count(); ++i) {
    try {
      timelines[i] = derive_timeline(instance, solution.schedule, i);
    } catch (const StructuralError&) {
      // Already reported as OutageOrder / OutageBounds; production checks skipped.
    }
  }

  for (int s = 0; s < instance.scenario_count(); ++s) {
    const auto& sp = solution.production[s];
    for (int t = 0; t < T; ++t) {
      double total = 0.0;
      for (int j = 0; j < instance.type1_count(); ++j) total += sp.type1(j, t);
      for (int i = 0; i < instance.type2_count(); ++i) total += sp.type2(i, t);
      const double gap = total - instance.scenarios.demand(t, s);
      if (!(std::fabs(gap) <= kTolerance)) {
        out.push_back({ViolationKind::kDemand, -1, -1, t, s, -1, -1, std::fabs(gap)});
      }
      for (int j = 0; j < instance.type1_count(); ++j) {
        const double p = sp.type1(j, t);
        const double lo = instance.type1[j].pmin(t, s);
        const double hi = instance.type1[j].pmax(t, s);
        if (p < lo - kTolerance) {
          out.push_back({ViolationKind::kType1Bounds, j, -1, t, s, -1, -1, lo - p});
        } else if (p > hi + kTolerance || std::isnan(p)) {
          out.push_back({ViolationKind::kType1Bounds, j, -1, t, s, -1, -1,
                         std::isnan(p) ? 1.0 : p - hi});
        }
      }
    }
    for (int i = 0; i < instance.type2_count(); ++i) {
      if (timelines[i]) check_type2_plant(instance, solution, s, i, *timelines[i], out);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const Violation& a, const Violation& b) { return a.sort_key() < b.sort_key(); });
  return out;
}

ObjectiveTerms objective_terms(const Instance& instance, const Solution& solution,
                               ObjectiveMode mode) {
  require_dims(instance, solution);
  const int T = instance.steps();
  const int S = instance.scenario_count();
  const double D = instance.grid.hours_per_step();
  ObjectiveTerms terms;
  for (int i = 0; i < instance.type2_count(); ++i) {
    for (int k = 0; k < instance.type2[i].cycle_count(); ++k) {
      terms.refuel += instance.type2[i].cycles[k].c_refuel * solution.schedule.refuel[i][k];
    }
  }
  double type1 = 0.0;
  double residual = 0.0;
  for (int s = 0; s < S; ++s) {
    const auto& sp = solution.production[s];
    for (int t = 0; t < T; ++t) {
      for (int j = 0; j < instance.type1_count(); ++j) {
        type1 += instance.type1[j].cost(t, s) * sp.type1(j, t) * D;
      }
    }
    for (int i = 0; i < instance.type2_count(); ++i) {
      const auto x = simulate_plant_fuel(instance, solution.schedule, i, sp.type2.row(i));
      residual += instance.type2[i].c_final * x[T];
    }
  }
  terms.type1 = type1 / S;
  terms.residual = residual * residual_weight(instance, mode);
  return terms;
}

double compute_objective(const Instance& instance, const Solution& solution, ObjectiveMode mode) {
  return objective_terms(instance, solution, mode).total();
}

}  // namespace outage
