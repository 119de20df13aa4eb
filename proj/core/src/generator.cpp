#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <set>

#include "outage/errors.hpp"
#include "outage/evaluator.hpp"
#include "outage/io.hpp"
#include "outage/planner.hpp"

namespace outage {

namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double u() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double u(double lo, double hi) { return lo + (hi - lo) * u(); }
  int range(int lo, int hi) { return lo + static_cast<int>(eng_() % static_cast<std::uint64_t>(hi - lo + 1)); }
  double normal() {
    const double a = 1.0 - u();
    return std::sqrt(-2.0 * std::log(a)) * std::cos(2.0 * std::numbers::pi * u());
  }
  template <class T>
  std::vector<T> sample(std::vector<T> pool, std::size_t n) {
    for (std::size_t i = 0; i < pool.size() && i < n; ++i) {
      std::swap(pool[i], pool[i + static_cast<std::size_t>(range(0, static_cast<int>(pool.size() - i - 1)))]);
    }
    pool.resize(std::min(n, pool.size()));
    std::sort(pool.begin(), pool.end());
    return pool;
  }

 private:
  std::mt19937_64 eng_;
};

void check_params(const GeneratorParams& gp) {
  if (gp.I < 1 || gp.J < 1 || gp.K < 1 || gp.H < 1 || gp.steps_per_week < 1 || gp.S < 1) {
    throw GenerationError("all counts must be >= 1");
  }
  if (!(gp.constraint_density >= 0.0 && gp.constraint_density <= 1.0)) {
    throw GenerationError("constraint density must lie in [0, 1]");
  }
  if (gp.H < gp.K + 1) {
    throw GenerationError("horizon of " + std::to_string(gp.H) + " weeks cannot hold " +
                          std::to_string(gp.K) + " outages with campaigns between them");
  }
  if (gp.overproduction_steps < 0) throw GenerationError("overproduction steps must be >= 0");
}

CampaignParams make_campaign(Rng& rng, double pmax_top, double D) {
  CampaignParams c;
  c.bo = canonical(pmax_top * D * rng.u(2.0, 5.0));
  const double v0 = canonical(rng.u(0.3, 0.6));
  const double v1 = canonical(v0 + (1.0 - v0) * rng.u());
  c.pb = ProfileCurve({{0.0, v0}, {canonical(c.bo / 2), v1}, {c.bo, 1.0}});
  return c;
}

double full_need(const Type2Plant& p, StepRange range, double D) {
  double need = 0.0;
  for (int t = range.begin; t < range.end; ++t) need += p.pmax[t] * D;
  return need;
}

PlannerResult simulate(const Instance& inst, const Schedule& w, int i, const std::vector<double>& caps) {
  const auto roles = step_roles(derive_timeline(inst, w, i), inst.steps());
  PlannerResult out;
  simulate_greedy(inst, i, roles, w.refuel[i], caps, out);
  return out;
}

bool active(const Instance& inst, const Schedule& w, OutageRef o, int h) {
  const auto& ha = w.start[o.plant][o.cycle];
  return ha && *ha <= h && h < *ha + inst.cycle(o).da;
}

bool holds(const Instance& inst, const Schedule& w, OutageRef o, int h) {
  const auto& ha = w.start[o.plant][o.cycle];
  if (!ha) return false;
  for (const auto& win : inst.cycle(o).resource_windows) {
    if (h >= *ha + win.offset && h < *ha + win.offset + win.duration) return true;
  }
  return false;
}

void sample_coupling(Rng& rng, const GeneratorParams& gp, Instance& inst, const Schedule& w) {
  const int H = inst.weeks();
  const double rho = gp.constraint_density;
  std::vector<OutageRef> all;
  std::vector<OutageRef> scheduled;
  for (int i = 0; i < inst.type2_count(); ++i) {
    for (int k = 0; k < inst.type2[i].cycle_count(); ++k) {
      all.push_back({i, k});
      if (w.start[i][k]) scheduled.push_back({i, k});
    }
  }
  auto& cc = inst.coupling;

  const int n_sep = static_cast<int>(std::lround(rho * static_cast<double>(scheduled.size())));
  for (int n = 0; n < n_sep && scheduled.size() >= 2; ++n) {
    OutageRef a = scheduled[rng.range(0, static_cast<int>(scheduled.size()) - 1)];
    OutageRef b = scheduled[rng.range(0, static_cast<int>(scheduled.size()) - 1)];
    if (a.plant == b.plant) continue;
    int d = *w.start[a.plant][a.cycle] - *w.start[b.plant][b.cycle];
    if (d == 0) continue;
    if (d < 0) {
      std::swap(a, b);
      d = -d;
    }
    Separation s{a, b, 1 + static_cast<int>(rng.u() * d), rng.range(1, 4), 0, H - 1};
    s.se = std::min(s.se, d);
    if (rng.u() < 0.5) {
      const int ha = *w.start[a.plant][a.cycle];
      const int hb = *w.start[b.plant][b.cycle];
      s.week_lo = std::max(0, std::min(ha, hb) - rng.range(0, 3));
      s.week_hi = std::min(H - 1, std::max(ha + inst.cycle(a).da, hb + inst.cycle(b).da) + rng.range(0, 3));
    }
    cc.separations.push_back(s);
  }

  const int n_off = static_cast<int>(std::lround(rho * H / 4.0));
  for (int n = 0; n < n_off; ++n) {
    const int h = rng.range(0, H - 1);
    std::set<OutageRef> members;
    int count = 0;
    for (auto o : all) {
      if (active(inst, w, o, h)) {
        members.insert(o);
        ++count;
      }
    }
    for (auto o : rng.sample(all, static_cast<std::size_t>(rng.range(1, 3)))) members.insert(o);
    if (members.size() < 2) continue;
    cc.max_offline.push_back({h, {members.begin(), members.end()}, count + (rng.u() < 0.3 ? 1 : 0)});
  }

  const int n_res = static_cast<int>(std::lround(rho * 3.0));
  for (int n = 0; n < n_res && all.size() >= 2; ++n) {
    auto members = rng.sample(all, static_cast<std::size_t>(rng.range(2, 5)));
    int peak = 0;
    for (int h = 0; h < H; ++h) {
      int count = 0;
      for (auto o : members) count += holds(inst, w, o, h) ? 1 : 0;
      peak = std::max(peak, count);
    }
    cc.resources.push_back({members, peak});
  }

  const int n_cap = static_cast<int>(std::lround(rho * 3.0));
  std::vector<int> plants(inst.type2_count());
  std::iota(plants.begin(), plants.end(), 0);
  std::vector<int> weeks(H);
  std::iota(weeks.begin(), weeks.end(), 0);
  for (int n = 0; n < n_cap; ++n) {
    OfflineCapacity c;
    c.plants = rng.sample(plants, static_cast<std::size_t>(rng.range(std::min(2, inst.type2_count()), inst.type2_count())));
    c.weeks = rng.sample(weeks, static_cast<std::size_t>(std::max(1, H / 3)));
    double peak = 0.0;
    for (int h : c.weeks) {
      const StepRange steps = inst.grid.steps_of_week(h);
      for (int t = steps.begin; t < steps.end; ++t) {
        double load = 0.0;
        for (int i : c.plants) {
          bool off = false;
          for (int k = 0; k < inst.type2[i].cycle_count(); ++k) off = off || active(inst, w, {i, k}, h);
          if (off) load += inst.type2[i].pmax[t];
        }
        peak = std::max(peak, load);
      }
    }
    c.imax = canonical_up(peak);
    cc.offline_capacity.push_back(std::move(c));
  }
}

}  // namespace

GeneratedInstance generate_instance(const GeneratorParams& gp) {
  check_params(gp);
  Rng rng(gp.seed);
  const int H = gp.H;
  const int T = H * gp.steps_per_week;
  const double inf = std::numeric_limits<double>::infinity();

  Instance inst;
  inst.grid = TimeGrid::uniform(H, gp.steps_per_week, canonical(168.0 / gp.steps_per_week));
  const double D = inst.grid.hours_per_step();
  Schedule w;

  // Plant data and witness outage weeks.
  const double slot = static_cast<double>(H) / (gp.K + 1);
  for (int i = 0; i < gp.I; ++i) {
    Type2Plant p;
    const double base = canonical(rng.u(50.0, 120.0));
    for (int h = 0; h < H; ++h) {
      const double v = canonical(base * rng.u(0.9, 1.0));
      for (int n = 0; n < gp.steps_per_week; ++n) p.pmax.push_back(v);
    }
    const double top = *std::max_element(p.pmax.begin(), p.pmax.end());
    p.initial_campaign = make_campaign(rng, top, D);
    p.c_final = canonical(rng.u(0.5, 1.0));

    const double shift = (rng.u() - 0.5) * slot * 0.5;
    int prev_end = 0;
    bool stopped = false;
    std::vector<std::optional<int>> starts;
    for (int k = 0; k < gp.K; ++k) {
      Cycle c;
      c.da = slot >= 4.0 && rng.u() < 0.5 ? 2 : 1;
      c.q = canonical(rng.u(0.85, 0.98));
      c.qprime = canonical(rng.u(-50.0, 50.0));
      c.c_refuel = canonical(rng.u(2.0, 4.0));
      c.campaign = make_campaign(rng, top, D);
      c.resource_windows = {{0, c.da}};
      if (rng.u() < 0.3) c.resource_windows.insert(c.resource_windows.begin(), {-1, 1});
      const double jitter = (rng.u() - 0.5) * slot * 0.4;
      int ha = static_cast<int>(std::lround((k + 1) * slot + shift + jitter - c.da / 2.0));
      ha = std::max(ha, prev_end + 1);
      if (stopped || ha + c.da > H) {
        stopped = true;
        starts.emplace_back();
      } else {
        starts.emplace_back(ha);
        prev_end = ha + c.da;
      }
      p.cycles.push_back(std::move(c));
    }
    w.start.push_back(std::move(starts));
    w.refuel.emplace_back(gp.K, 0.0);
    inst.type2.push_back(std::move(p));
  }

  // Fuel: initial stock, then refuels outage by outage.
  std::vector<std::vector<double>> caps(gp.I, std::vector<double>(T, inf));
  for (int i = 0; i < gp.I; ++i) {
    auto& p = inst.type2[i];
    const auto tl = derive_timeline(inst, w, i);
    p.xi = canonical(full_need(p, tl.initial_campaign, D) * rng.u(0.5, 1.2) + p.initial_campaign.bo * 0.5);
    for (const auto& span : tl.cycles) {
      auto& c = p.cycles[span.cycle];
      const double before = simulate(inst, w, i, caps[i]).x[span.outage.begin];
      const double target = full_need(p, span.campaign, D) * rng.u(0.5, 1.2) + c.campaign.bo * 0.5;
      const double r = std::max(1000.0, canonical(target - c.q * before - c.qprime));
      w.refuel[i][span.cycle] = r;
      c.rmin = canonical(r * rng.u(0.4, 0.7));
      c.rmax = canonical(r * rng.u(1.2, 1.6));
    }
    for (int k = 0; k < gp.K; ++k) {
      if (w.start[i][k]) continue;
      auto& c = p.cycles[k];
      c.rmin = canonical(rng.u(1000.0, 6000.0));
      c.rmax = canonical(c.rmin * 2.0);
    }
  }

  // Engineered modulation: the witness lowers one full-power plant per chosen step.
  std::vector<PlannerResult> plans;
  for (int i = 0; i < gp.I; ++i) plans.push_back(simulate(inst, w, i, caps[i]));
  std::vector<bool> engineered(T, false);
  if (gp.overproduction_steps > 0) {
    std::vector<int> candidates;
    for (int t = 0; t < T; ++t) {
      for (int i = 0; i < gp.I; ++i) {
        if (plans[i].p[t] > 0.0 && plans[i].p[t] == inst.type2[i].pmax[t]) {
          candidates.push_back(t);
          break;
        }
      }
    }
    for (int t : rng.sample(candidates, static_cast<std::size_t>(gp.overproduction_steps))) {
      std::vector<int> full;
      for (int i = 0; i < gp.I; ++i) {
        if (plans[i].p[t] > 0.0 && plans[i].p[t] == inst.type2[i].pmax[t]) full.push_back(i);
      }
      if (full.empty()) continue;
      const int i = full[rng.range(0, static_cast<int>(full.size()) - 1)];
      const double pmax = inst.type2[i].pmax[t];
      caps[i][t] = canonical(pmax - pmax * rng.u(0.15, 0.35));
      plans[i] = simulate(inst, w, i, caps[i]);
      engineered[t] = true;
    }
  }

  // Bounds with margins above the witness trajectory.
  for (int i = 0; i < gp.I; ++i) {
    auto& p = inst.type2[i];
    const double top = *std::max_element(p.pmax.begin(), p.pmax.end());
    const auto tl = derive_timeline(inst, w, i);
    const auto& x = plans[i].x;
    auto used = [&](const CampaignParams& cp, StepRange range) {
      double sum = 0.0;
      for (int t = range.begin; t < range.end; ++t) {
        if (x[t] >= cp.bo) sum += (p.pmax[t] - plans[i].p[t]) * D;
      }
      return sum;
    };
    const double slack_mod = top * D;
    p.initial_campaign.mmax = canonical_up(used(p.initial_campaign, tl.initial_campaign) * 1.5 +
                                           slack_mod * rng.u(2.0, 8.0));
    int prev = -1;
    for (const auto& span : tl.cycles) {
      auto& c = p.cycles[span.cycle];
      const double prev_bo = p.campaign(prev).bo;
      const double before = x[span.outage.begin];
      const double after = x[span.outage.begin + 1];
      c.amax = canonical_up(std::max(before, prev_bo) + prev_bo * rng.u(0.2, 0.8) + top * D);
      c.smax = canonical_up(std::max(after * rng.u(1.05, 1.25), c.q * c.amax + c.rmin + c.qprime + 1.0));
      c.campaign.mmax = canonical_up(used(c.campaign, span.campaign) * 1.5 + slack_mod * rng.u(2.0, 8.0));
      const int ha = *w.start[i][span.cycle];
      const double pick = rng.u();
      if (pick < 0.75) {
        c.to = std::max(0, ha - rng.range(1, 6));
        c.ta = std::min(H - c.da, ha + rng.range(1, 6));
      } else if (pick < 0.9) {
        c.to = std::max(0, ha - rng.range(1, 6));
      }
      prev = span.cycle;
    }
    for (int k = 0; k < gp.K; ++k) {
      if (w.start[i][k]) continue;
      auto& c = p.cycles[k];
      const double prev_bo = p.campaign(k - 1).bo;
      c.amax = canonical_up(prev_bo * 2.0 + top * D);
      c.smax = canonical_up(c.q * c.amax + c.rmax + c.qprime + 1.0);
      c.campaign.mmax = canonical_up(slack_mod * rng.u(2.0, 8.0));
    }
  }

  // Demand: witness type-2 output plus a nonnegative type-1 share.
  const int S = gp.S;
  std::vector<double> p2w(T, 0.0);
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < gp.I; ++i) p2w[t] += plans[i].p[t];
  }
  const auto& dp = gp.demand_profile;
  inst.scenarios.demand = Table<double>(T, S);
  inst.scenarios.epsilon = canonical(rng.u(0.02, 0.05));
  const double phase = rng.u(0.0, 2.0 * std::numbers::pi);
  for (int s = 0; s < S; ++s) {
    const double offset = dp.noise * rng.normal();
    for (int t = 0; t < T; ++t) {
      double slack = dp.base + dp.amplitude * std::sin(2.0 * std::numbers::pi * (t + 0.5) / T + phase) +
                     offset + 0.5 * dp.noise * rng.normal();
      slack = engineered[t] ? 0.0 : std::max(0.0, slack);
      inst.scenarios.demand(t, s) = canonical_up(p2w[t] + slack);
    }
  }

  // Type-1 fleet covering the largest demand on its own.
  const double peak = *std::max_element(inst.scenarios.demand.data().begin(), inst.scenarios.demand.data().end());
  std::vector<double> share(gp.J);
  for (double& v : share) v = rng.u(0.5, 1.5);
  const double share_sum = std::accumulate(share.begin(), share.end(), 0.0);
  std::vector<double> multiplier(S);
  for (double& m : multiplier) m = rng.u(0.9, 1.1);
  const double base_cost = rng.u(25.0, 35.0);
  for (int j = 0; j < gp.J; ++j) {
    Type1Plant p{Table<double>(T, S, 0.0), Table<double>(T, S), Table<double>(T, S)};
    const double cap = canonical(peak * 1.15 * share[j] / share_sum + 10.0);
    for (int t = 0; t < T; ++t) {
      const double season = 1.0 + 0.03 * std::sin(6.0 * std::numbers::pi * t / T + phase);
      for (int s = 0; s < S; ++s) {
        p.pmax(t, s) = cap;
        p.cost(t, s) = canonical(base_cost * std::pow(1.02, j) * multiplier[s] * season);
      }
    }
    inst.type1.push_back(std::move(p));
  }

  sample_coupling(rng, gp, inst, w);
  validate(inst);

  GeneratedInstance out;
  out.witness = w;
  out.witness_solution.schedule = w;
  for (int s = 0; s < S; ++s) {
    ScenarioProduction sp{Table<double>(gp.J, T), Table<double>(gp.I, T)};
    std::vector<double> dispatch(gp.J);
    for (int t = 0; t < T; ++t) {
      for (int i = 0; i < gp.I; ++i) sp.type2(i, t) = plans[i].p[t];
      if (!dispatch_type1(inst, t, s, inst.scenarios.demand(t, s) - p2w[t], dispatch)) {
        throw GenerationError("type-1 fleet cannot cover the witness residual demand");
      }
      for (int j = 0; j < gp.J; ++j) sp.type1(j, t) = dispatch[j];
    }
    out.witness_solution.production.push_back(std::move(sp));
  }
  const auto violations = check_feasibility(inst, out.witness_solution);
  if (!violations.empty()) {
    throw GenerationError("witness breaks " + std::string(to_string(violations.front().kind)));
  }
  out.instance = std::move(inst);
  return out;
}

}  // namespace outage
