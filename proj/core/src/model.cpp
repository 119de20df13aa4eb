#include "outage/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "outage/errors.hpp"

namespace outage {

TimeGrid::TimeGrid(std::vector<int> steps_per_week, double hours_per_step)
    : hours_(hours_per_step) {
  if (steps_per_week.empty()) throw ValidationError("time grid: at least one week required");
  if (!(hours_per_step > 0.0) || !std::isfinite(hours_per_step)) {
    throw ValidationError("time grid: hours per step must be positive");
  }
  week_start_.assign(1, 0);
  for (std::size_t h = 0; h < steps_per_week.size(); ++h) {
    if (steps_per_week[h] < 1) {
      throw ValidationError("time grid: week " + std::to_string(h) + " has no steps");
    }
    week_start_.push_back(week_start_.back() + steps_per_week[h]);
    for (int n = 0; n < steps_per_week[h]; ++n) week_of_step_.push_back(static_cast<int>(h));
  }
}

TimeGrid TimeGrid::uniform(int weeks, int steps_per_week, double hours_per_step) {
  if (weeks < 1) throw ValidationError("time grid: at least one week required");
  return TimeGrid(std::vector<int>(weeks, steps_per_week), hours_per_step);
}

StepRange TimeGrid::steps_of_weeks(int first, int last) const {
  first = std::clamp(first, 0, weeks());
  last = std::clamp(last, first, weeks());
  return {week_start_[first], week_start_[last]};
}

std::vector<int> TimeGrid::steps_per_week() const {
  std::vector<int> out;
  out.reserve(weeks());
  for (int h = 0; h < weeks(); ++h) out.push_back(week_start_[h + 1] - week_start_[h]);
  return out;
}

ProfileCurve::ProfileCurve(std::vector<std::pair<double, double>> points)
    : points_(std::move(points)) {
  if (points_.empty()) points_ = {{0.0, 1.0}};
}

double ProfileCurve::operator()(double fuel) const {
  if (fuel <= points_.front().first) return points_.front().second;
  if (fuel >= points_.back().first) return points_.back().second;
  auto hi = std::upper_bound(points_.begin(), points_.end(), fuel,
                             [](double f, const auto& p) { return f < p.first; });
  auto lo = hi - 1;
  const double w = (fuel - lo->first) / (hi->first - lo->first);
  return lo->second + w * (hi->second - lo->second);
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

void validate_campaign(const CampaignParams& c, const std::string& where) {
  require(finite_nonneg(c.bo), where + ": profile threshold bo must be >= 0");
  require(finite_nonneg(c.mmax), where + ": modulation budget mmax must be >= 0");
  const auto& pts = c.pb.points();
  require(pts.front().first == 0.0, where + ": profile must start at fuel 0");
  require(pts.back().first == c.bo, where + ": profile must end at fuel bo");
  require(pts.back().second == 1.0, where + ": profile must equal 1 at bo");
  for (std::size_t n = 0; n < pts.size(); ++n) {
    require(pts[n].second >= 0.0 && pts[n].second <= 1.0,
            where + ": profile values must lie in [0, 1]");
    if (n > 0) require(pts[n].first > pts[n - 1].first, where + ": profile fuel levels must increase");
  }
}

void validate_ref(const Instance& inst, OutageRef o, const std::string& where) {
  require(o.plant >= 0 && o.plant < inst.type2_count(), where + ": unknown plant");
  require(o.cycle >= 0 && o.cycle < inst.type2[o.plant].cycle_count(), where + ": unknown cycle");
}

void validate_week(const Instance& inst, int h, const std::string& where) {
  require(h >= 0 && h < inst.weeks(), where + ": week out of horizon");
}

}  // namespace

void validate(const Instance& inst) {
  const int T = inst.steps();
  const int S = inst.scenario_count();
  require(T >= 1, "time grid: at least one step required");
  require(inst.grid.hours_per_step() > 0.0, "time grid: hours per step must be positive");
  require(S >= 1, "scenarios: at least one scenario required");
  require(static_cast<int>(inst.scenarios.demand.rows()) == T, "scenarios: demand rows != T");
  for (double d : inst.scenarios.demand.data()) require(finite_nonneg(d), "scenarios: demand must be >= 0");
  require(inst.scenarios.epsilon >= 0.0 && inst.scenarios.epsilon < 1.0,
          "scenarios: epsilon must lie in [0, 1)");

  for (int j = 0; j < inst.type1_count(); ++j) {
    const auto& p = inst.type1[j];
    const std::string where = "type1[" + std::to_string(j) + "]";
    for (const Table<double>* tab : {&p.pmin, &p.pmax, &p.cost}) {
      require(static_cast<int>(tab->rows()) == T && static_cast<int>(tab->cols()) == S,
              where + ": arrays must be T x S");
    }
    for (std::size_t n = 0; n < p.pmin.data().size(); ++n) {
      require(finite_nonneg(p.pmin.data()[n]) && p.pmin.data()[n] <= p.pmax.data()[n] &&
                  std::isfinite(p.pmax.data()[n]),
              where + ": production bounds must satisfy 0 <= pmin <= pmax");
      require(std::isfinite(p.cost.data()[n]), where + ": cost must be finite");
    }
  }

  for (int i = 0; i < inst.type2_count(); ++i) {
    const auto& p = inst.type2[i];
    const std::string where = "type2[" + std::to_string(i) + "]";
    require(static_cast<int>(p.pmax.size()) == T, where + ": pmax must have T entries");
    for (double v : p.pmax) require(finite_nonneg(v), where + ": pmax must be >= 0");
    require(finite_nonneg(p.xi), where + ": initial fuel xi must be >= 0");
    require(std::isfinite(p.c_final), where + ": final fuel price must be finite");
    validate_campaign(p.initial_campaign, where + ".initial_campaign");
    for (int k = 0; k < p.cycle_count(); ++k) {
      const auto& c = p.cycles[k];
      const std::string cw = where + ".cycles[" + std::to_string(k) + "]";
      require(c.da >= 1, cw + ": outage length da must be >= 1 week");
      require(finite_nonneg(c.rmin) && c.rmin <= c.rmax && std::isfinite(c.rmax),
              cw + ": reload bound order violated (need 0 <= rmin <= rmax)");
      require(c.q >= 0.0 && c.q < 1.0, cw + ": reload coefficient q must lie in [0, 1)");
      require(std::isfinite(c.qprime), cw + ": reload offset must be finite");
      require(std::isfinite(c.amax) && std::isfinite(c.smax), cw + ": fuel bounds must be finite");
      require(std::isfinite(c.c_refuel), cw + ": refuel price must be finite");
      if (c.to && c.ta) require(*c.to <= *c.ta, cw + ": outage window must satisfy to <= ta");
      for (const auto& w : c.resource_windows) {
        require(w.duration >= 1, cw + ": resource window duration must be >= 1");
      }
      validate_campaign(c.campaign, cw);
    }
  }

  const auto& cc = inst.coupling;
  for (std::size_t n = 0; n < cc.separations.size(); ++n) {
    const auto& s = cc.separations[n];
    const std::string where = "coupling.separations[" + std::to_string(n) + "]";
    validate_ref(inst, s.first, where);
    validate_ref(inst, s.second, where);
    require(s.week_lo <= s.week_hi, where + ": interval must satisfy lo <= hi");
  }
  for (std::size_t n = 0; n < cc.max_offline.size(); ++n) {
    const auto& m = cc.max_offline[n];
    const std::string where = "coupling.max_offline[" + std::to_string(n) + "]";
    validate_week(inst, m.week, where);
    require(m.limit >= 0, where + ": limit must be >= 0");
    for (auto o : m.outages) validate_ref(inst, o, where);
  }
  for (std::size_t n = 0; n < cc.resources.size(); ++n) {
    const auto& r = cc.resources[n];
    const std::string where = "coupling.resources[" + std::to_string(n) + "]";
    require(r.capacity >= 0, where + ": capacity must be >= 0");
    for (auto o : r.outages) validate_ref(inst, o, where);
  }
  for (std::size_t n = 0; n < cc.offline_capacity.size(); ++n) {
    const auto& c = cc.offline_capacity[n];
    const std::string where = "coupling.offline_capacity[" + std::to_string(n) + "]";
    require(finite_nonneg(c.imax), where + ": imax must be >= 0");
    for (int i : c.plants) require(i >= 0 && i < inst.type2_count(), where + ": unknown plant");
    for (int h : c.weeks) validate_week(inst, h, where);
  }
}

Schedule Schedule::unscheduled(const Instance& instance) {
  Schedule s;
  for (const auto& plant : instance.type2) {
    s.start.emplace_back(plant.cycle_count());
    s.refuel.emplace_back(plant.cycle_count(), 0.0);
  }
  return s;
}

int Schedule::scheduled_count(int i) const {
  return static_cast<int>(std::count_if(start[i].begin(), start[i].end(),
                                        [](const auto& w) { return w.has_value(); }));
}

PlantTimeline derive_timeline(const Instance& instance, const Schedule& schedule, int plant) {
  const auto& p = instance.type2[plant];
  const int T = instance.steps();
  const int H = instance.weeks();
  if (static_cast<int>(schedule.start.at(plant).size()) != p.cycle_count()) {
    throw StructuralError("schedule row size does not match cycle count of plant " +
                          std::to_string(plant));
  }
  PlantTimeline tl;
  int free_from = 0;  // first week not yet covered
  bool ended = false;
  for (int k = 0; k < p.cycle_count(); ++k) {
    const auto& ha = schedule.start[plant][k];
    if (!ha) {
      ended = true;
      continue;
    }
    const std::string where = "plant " + std::to_string(plant) + " outage " + std::to_string(k);
    if (ended) throw StructuralError(where + " scheduled after an unscheduled outage");
    if (*ha < 0 || *ha + p.cycles[k].da > H) throw StructuralError(where + " leaves the horizon");
    if (*ha < free_from) throw StructuralError(where + " overlaps the previous outage");
    const StepRange outage = instance.grid.steps_of_weeks(*ha, *ha + p.cycles[k].da);
    if (tl.cycles.empty()) {
      tl.initial_campaign = {0, outage.begin};
    } else {
      tl.cycles.back().campaign.end = outage.begin;
    }
    tl.cycles.push_back({k, outage, {outage.end, T}});
    free_from = *ha + p.cycles[k].da;
  }
  if (tl.cycles.empty()) tl.initial_campaign = {0, T};
  return tl;
}

std::vector<PlantTimeline> derive_campaigns(const Instance& instance, const Schedule& schedule) {
  if (static_cast<int>(schedule.start.size()) != instance.type2_count()) {
    throw StructuralError("schedule has wrong number of plants");
  }
  std::vector<PlantTimeline> out;
  out.reserve(instance.type2_count());
  for (int i = 0; i < instance.type2_count(); ++i) out.push_back(derive_timeline(instance, schedule, i));
  return out;
}

StepRoles step_roles(const PlantTimeline& timeline, int steps) {
  StepRoles roles;
  roles.campaign.assign(steps, -1);
  roles.outage_start.assign(steps, -1);
  for (const auto& c : timeline.cycles) {
    for (int t = c.outage.begin; t < c.outage.end; ++t) roles.campaign[t] = StepRoles::kOutage;
    if (!c.outage.empty()) roles.outage_start[c.outage.begin] = c.cycle;
    for (int t = c.campaign.begin; t < c.campaign.end; ++t) roles.campaign[t] = c.cycle;
  }
  return roles;
}

}  // namespace outage
