#include "outage/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "outage/errors.hpp"

namespace outage {

std::vector<double> min_demand_scenario(const ScenarioSet& scenarios) {
  const auto T = scenarios.demand.rows();
  std::vector<double> out(T);
  for (std::size_t t = 0; t < T; ++t) {
    const auto row = scenarios.demand.row(t);
    out[t] = *std::min_element(row.begin(), row.end());
  }
  return out;
}

std::vector<double> type2_ceiling(const Instance& instance) {
  const int T = instance.steps();
  std::vector<double> out(T, std::numeric_limits<double>::infinity());
  for (int t = 0; t < T; ++t) {
    for (int s = 0; s < instance.scenario_count(); ++s) {
      double v = instance.scenarios.demand(t, s);
      for (const auto& p : instance.type1) v -= p.pmin(t, s);
      out[t] = std::min(out[t], v);
    }
  }
  return out;
}

PwlCost::PwlCost(std::vector<std::pair<double, double>> points) : points_(std::move(points)) {
  if (points_.empty()) points_ = {{0.0, 0.0}};
}

double PwlCost::operator()(double p2) const {
  if (p2 <= points_.front().first) {
    if (points_.size() == 1) return points_.front().second;
    const auto& a = points_[0];
    const auto& b = points_[1];
    return a.second + (p2 - a.first) * (b.second - a.second) / (b.first - a.first);
  }
  if (p2 >= points_.back().first) return points_.back().second;
  auto hi = std::upper_bound(points_.begin(), points_.end(), p2,
                             [](double v, const auto& pt) { return v < pt.first; });
  auto lo = hi - 1;
  const double w = (p2 - lo->first) / (hi->first - lo->first);
  return lo->second + w * (hi->second - lo->second);
}

namespace {

struct Band {
  double cost;
  double width;
};

// Flexible type-1 bands of (t, s) in dispatch order.
std::vector<Band> bands(const Instance& inst, int t, int s) {
  std::vector<Band> out;
  for (const auto& p : inst.type1) out.push_back({p.cost(t, s), p.pmax(t, s) - p.pmin(t, s)});
  std::stable_sort(out.begin(), out.end(), [](const Band& a, const Band& b) { return a.cost < b.cost; });
  return out;
}

// Cost of one scenario at type-2 production p2, by direct fill.
double scenario_cost(const Instance& inst, int t, int s, double p2, double penalty_factor) {
  const double D = inst.grid.hours_per_step();
  double fixed = 0.0;
  double pmin_sum = 0.0;
  double dearest = 0.0;
  for (const auto& p : inst.type1) {
    fixed += p.cost(t, s) * p.pmin(t, s) * D;
    pmin_sum += p.pmin(t, s);
    dearest = std::max(dearest, p.cost(t, s));
  }
  double slack = std::max(0.0, inst.scenarios.demand(t, s) - pmin_sum - p2);
  double cost = fixed;
  for (const Band& b : bands(inst, t, s)) {
    const double take = std::min(slack, b.width);
    cost += b.cost * take * D;
    slack -= take;
  }
  cost += penalty_factor * dearest * slack * D;
  return cost;
}

}  // namespace

PwlCost build_type1_cost(const Instance& instance, int t, double penalty_factor) {
  const int S = instance.scenario_count();
  std::vector<double> xs{0.0};
  for (int s = 0; s < S; ++s) {
    double pmin_sum = 0.0;
    for (const auto& p : instance.type1) pmin_sum += p.pmin(t, s);
    double knee = instance.scenarios.demand(t, s) - pmin_sum;
    if (knee > 0.0) xs.push_back(knee);
    for (const Band& b : bands(instance, t, s)) {
      knee -= b.width;
      if (knee > 0.0) xs.push_back(knee);
    }
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<std::pair<double, double>> points;
  points.reserve(xs.size());
  for (double x : xs) {
    double sum = 0.0;
    for (int s = 0; s < S; ++s) sum += scenario_cost(instance, t, s, x, penalty_factor);
    points.emplace_back(x, sum / S);
  }
  return PwlCost(std::move(points));
}

ApproxCost::ApproxCost(const std::vector<PwlCost>& exact, int breakpoints, std::span<const double> reach)
    : count_(breakpoints) {
  if (breakpoints < 2) throw StructuralError("approximation needs at least 2 breakpoints");
  if (!reach.empty() && reach.size() != exact.size()) throw StructuralError("reach needs one entry per step");
  interval_.resize(exact.size());
  table_.resize(exact.size() * count_);
  for (std::size_t t = 0; t < exact.size(); ++t) {
    double span = exact[t].last_x();
    if (!reach.empty()) span = std::min(span, std::max(0.0, reach[t]));
    interval_[t] = span > 0.0 ? span / (count_ - 1) : 1.0;
    for (int n = 0; n < count_; ++n) table_[t * count_ + n] = exact[t](n * interval_[t]);
  }
}

double ApproxCost::operator()(int t, double p2) const {
  const double pos = std::max(0.0, p2) / interval_[t];
  const double lo_f = std::floor(pos);
  if (lo_f >= count_ - 1) return table_[t * count_ + count_ - 1];
  const int lo = static_cast<int>(lo_f);
  const int hi = static_cast<int>(std::ceil(pos));
  const double a = table_[t * count_ + lo];
  if (hi == lo) return a;
  const double b = table_[t * count_ + hi];
  return a + (pos - lo_f) * (b - a);
}

std::vector<double> type2_reach(const Instance& instance) {
  std::vector<double> out(instance.steps(), 0.0);
  for (const auto& p : instance.type2) {
    for (int t = 0; t < instance.steps(); ++t) out[t] += p.pmax[t];
  }
  return out;
}

void simulate_greedy(const Instance& instance, int plant, const StepRoles& roles,
                     std::span<const double> refuel, Caps caps, PlannerResult& out, int from_step) {
  const auto& pl = instance.type2[plant];
  const int T = instance.steps();
  const double D = instance.grid.hours_per_step();
  if (from_step <= 0 || static_cast<int>(out.p.size()) != T) {
    from_step = 0;
    out.p.assign(T, 0.0);
    out.x.assign(T + 1, 0.0);
    out.x[0] = pl.xi;
  }
  for (int t = from_step; t < T; ++t) {
    const double x = out.x[t];
    const int c = roles.campaign[t];
    double p = 0.0;
    if (c == StepRoles::kOutage) {
      const int k = roles.outage_start[t];
      out.p[t] = 0.0;
      out.x[t + 1] = k >= 0 ? fuel_after_reload(x, refuel[k], pl.cycles[k])
                            : fuel_after_production(x, 0.0, D);
      continue;
    }
    const CampaignParams& cp = pl.campaign(c);
    const double pmax = pl.pmax[t];
    if (x >= cp.bo) {
      p = pmax;
      if (!caps.empty()) p = std::min(p, caps[t]);
      if (p * D > x) p = std::max(0.0, canonical_down(x / D));
    } else {
      const double target = cp.pb(x) * pmax;
      if (x >= target * D) p = canonical_down(target);
    }
    out.p[t] = p;
    out.x[t + 1] = fuel_after_production(x, p, D);
  }
}

std::optional<FuelIssue> first_issue(const Instance& instance, int plant,
                                     const PlantTimeline& timeline, const PlannerResult& plan) {
  const auto& pl = instance.type2[plant];
  const double D = instance.grid.hours_per_step();
  auto modulation_issue = [&](int c, StepRange range) -> std::optional<FuelIssue> {
    const CampaignParams& cp = pl.campaign(c);
    double used = 0.0;
    for (int t = range.begin; t < range.end; ++t) {
      if (plan.x[t] >= cp.bo) used += (pl.pmax[t] - plan.p[t]) * D;
    }
    if (used > cp.mmax + kTolerance) return FuelIssue{FuelIssueKind::kModulation, c, used - cp.mmax};
    return std::nullopt;
  };
  if (auto issue = modulation_issue(-1, timeline.initial_campaign)) return issue;
  for (const auto& span : timeline.cycles) {
    const auto& cyc = pl.cycles[span.cycle];
    const int t = span.outage.begin;
    if (plan.x[t] > cyc.amax + kTolerance) {
      return FuelIssue{FuelIssueKind::kAmax, span.cycle, plan.x[t] - cyc.amax};
    }
    if (plan.x[t + 1] > cyc.smax + kTolerance) {
      return FuelIssue{FuelIssueKind::kSmax, span.cycle, plan.x[t + 1] - cyc.smax};
    }
    if (auto issue = modulation_issue(span.cycle, span.campaign)) return issue;
  }
  return std::nullopt;
}

namespace {

constexpr int kMaxRepairs = 400;

// Scheduled cycles strictly before `cycle`, nearest first, that still have room above rmin.
std::optional<int> reducible_before(const Type2Plant& pl, const PlantTimeline& tl,
                                    std::span<const double> refuel, int cycle) {
  for (auto it = tl.cycles.rbegin(); it != tl.cycles.rend(); ++it) {
    if (it->cycle >= cycle) continue;
    if (refuel[it->cycle] > pl.cycles[it->cycle].rmin) return it->cycle;
  }
  return std::nullopt;
}

// Plan with repairs, starting from `result.refuel`.
void repair(const Instance& inst, int plant, const PlantTimeline& tl, const StepRoles& roles,
            Caps caps, PlannerResult& result) {
  const auto& pl = inst.type2[plant];
  simulate_greedy(inst, plant, roles, result.refuel, caps, result);
  // Reduction grows while the same target fails to clear the same issue.
  int last_target = -1;
  double scale = 1.0;
  for (int round = 0; round < kMaxRepairs; ++round) {
    const auto issue = first_issue(inst, plant, tl, result);
    if (!issue) {
      result.feasible = true;
      return;
    }
    if (issue->kind == FuelIssueKind::kModulation) break;
    std::optional<int> target;
    if (issue->kind == FuelIssueKind::kSmax && result.refuel[issue->cycle] > pl.cycles[issue->cycle].rmin) {
      target = issue->cycle;
    } else {
      target = reducible_before(pl, tl, result.refuel, issue->cycle);
    }
    if (!target) break;
    scale = *target == last_target ? scale * 2.0 : 1.0;
    last_target = *target;
    const auto& cyc = pl.cycles[*target];
    double& r = result.refuel[*target];
    r = std::max(cyc.rmin, canonical_down(r - issue->excess * scale));
    simulate_greedy(inst, plant, roles, result.refuel, caps, result);
  }
  result.feasible = false;
}

std::vector<double> initial_refuels(const Type2Plant& pl, const Schedule& schedule, int plant,
                                    std::span<const double> refuels) {
  std::vector<double> r(pl.cycle_count(), 0.0);
  for (int k = 0; k < pl.cycle_count(); ++k) {
    if (!schedule.start[plant][k]) continue;
    const double given = k < static_cast<int>(refuels.size()) ? refuels[k] : pl.cycles[k].rmin;
    r[k] = std::clamp(given, pl.cycles[k].rmin, pl.cycles[k].rmax);
  }
  return r;
}

// True if some step from `from` on produces below its uncapped ceiling.
bool starved_from(const Instance& inst, int plant, const StepRoles& roles, const PlannerResult& plan,
                  Caps caps, int from) {
  const auto& pl = inst.type2[plant];
  for (int t = from; t < inst.steps(); ++t) {
    const int c = roles.campaign[t];
    if (c == StepRoles::kOutage) continue;
    if (plan.x[t] < pl.campaign(c).bo) return true;
    double ceiling = pl.pmax[t];
    if (!caps.empty()) ceiling = std::min(ceiling, caps[t]);
    if (plan.p[t] < ceiling) return true;
  }
  return false;
}

}  // namespace

PlannerResult plan_production(const Instance& instance, const Schedule& schedule, int plant,
                              std::span<const double> refuels, Caps caps) {
  const auto tl = derive_timeline(instance, schedule, plant);
  const auto roles = step_roles(tl, instance.steps());
  PlannerResult result;
  result.refuel = initial_refuels(instance.type2[plant], schedule, plant, refuels);
  repair(instance, plant, tl, roles, caps, result);
  return result;
}

void increase_refuels(const Instance& instance, const Schedule& schedule, int plant,
                      PlannerResult& result, Caps caps) {
  if (!result.feasible) return;
  const auto& pl = instance.type2[plant];
  const auto tl = derive_timeline(instance, schedule, plant);
  const auto roles = step_roles(tl, instance.steps());
  PlannerResult trial;
  for (auto it = tl.cycles.rbegin(); it != tl.cycles.rend(); ++it) {
    const int k = it->cycle;
    const int from = it->outage.begin;
    const double rmax = pl.cycles[k].rmax;
    while (starved_from(instance, plant, roles, result, caps, from)) {
      const double r = result.refuel[k];
      const double inc = 0.02 * (rmax - r);
      if (inc < kTolerance) break;
      const double next = std::min(rmax, canonical_down(r + inc));
      if (next <= r) break;
      trial = result;
      trial.refuel[k] = next;
      simulate_greedy(instance, plant, roles, trial.refuel, caps, trial, from);
      if (first_issue(instance, plant, tl, trial)) break;
      std::swap(result, trial);
    }
  }
}

PlannerResult plan_and_raise(const Instance& instance, const Schedule& schedule, int plant,
                             std::span<const double> refuels, Caps caps) {
  PlannerResult result = plan_production(instance, schedule, plant, refuels, caps);
  increase_refuels(instance, schedule, plant, result, caps);
  return result;
}

bool dispatch_type1(const Instance& instance, int t, int s, double residual, std::span<double> out) {
  const int J = instance.type1_count();
  if (J == 0) return std::fabs(residual) <= kTolerance;
  std::vector<int> order(J);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return instance.type1[a].cost(t, s) < instance.type1[b].cost(t, s);
  });
  double rem = residual;
  for (int j = 0; j < J; ++j) {
    out[j] = instance.type1[j].pmin(t, s);
    rem -= out[j];
  }
  int last = order.front();
  for (int j : order) {
    if (rem <= 0.0) break;
    const auto& p = instance.type1[j];
    const double add = std::min(rem, p.pmax(t, s) - p.pmin(t, s));
    if (add <= 0.0) continue;
    out[j] = canonical(out[j] + add);
    rem -= add;
    last = j;
  }
  // The last plant absorbs rounding so the balance is exact to 9 digits.
  double others = 0.0;
  for (int j = 0; j < J; ++j) {
    if (j != last) others += out[j];
  }
  out[last] = canonical(residual - others);
  const auto& p = instance.type1[last];
  return rem <= kTolerance && out[last] >= p.pmin(t, s) - kTolerance &&
         out[last] <= p.pmax(t, s) + kTolerance;
}

double type1_cost(const Instance& instance, int t, int s, std::span<const double> dispatch) {
  double cost = 0.0;
  for (int j = 0; j < instance.type1_count(); ++j) {
    cost += instance.type1[j].cost(t, s) * dispatch[j] * instance.grid.hours_per_step();
  }
  return cost;
}

}  // namespace outage
