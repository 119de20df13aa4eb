#include "outage/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

namespace outage {

namespace {

std::vector<std::vector<std::vector<int>>> shape(const Instance& inst) {
  std::vector<std::vector<std::vector<int>>> out(inst.type2_count());
  for (int i = 0; i < inst.type2_count(); ++i) out[i].resize(inst.type2[i].cycle_count());
  return out;
}

void add_unique(std::vector<int>& v, int n) {
  if (v.empty() || v.back() != n) v.push_back(n);
}

// Week lookup with one outage moved.
struct Weeks {
  const Schedule& schedule;
  OutageRef moved;
  int week;

  std::optional<int> operator()(OutageRef o) const {
    if (o == moved) return week;
    return schedule.start[o.plant][o.cycle];
  }
};

bool active(const Instance& inst, std::optional<int> ha, OutageRef o, int h) {
  return ha && *ha <= h && h < *ha + inst.cycle(o).da;
}

bool holds(const Instance& inst, std::optional<int> ha, OutageRef o, int h) {
  if (!ha) return false;
  for (const auto& w : inst.cycle(o).resource_windows) {
    if (h >= *ha + w.offset && h < *ha + w.offset + w.duration) return true;
  }
  return false;
}

}  // namespace

SearchModel::SearchModel(const Instance& instance, ApproxCost approx, ObjectiveMode mode)
    : inst_(instance),
      approx_(std::move(approx)),
      weight_(mode == ObjectiveMode::kAsPrinted ? instance.scenario_count() : 1.0),
      seps_(shape(instance)),
      maxoff_(shape(instance)),
      res_(shape(instance)),
      caps_(shape(instance)) {
  const auto& cc = inst_.coupling;
  for (int n = 0; n < static_cast<int>(cc.separations.size()); ++n) {
    const auto& s = cc.separations[n];
    add_unique(seps_[s.first.plant][s.first.cycle], n);
    add_unique(seps_[s.second.plant][s.second.cycle], n);
  }
  for (int n = 0; n < static_cast<int>(cc.max_offline.size()); ++n) {
    for (auto o : cc.max_offline[n].outages) add_unique(maxoff_[o.plant][o.cycle], n);
  }
  for (int n = 0; n < static_cast<int>(cc.resources.size()); ++n) {
    for (auto o : cc.resources[n].outages) add_unique(res_[o.plant][o.cycle], n);
  }
  for (int n = 0; n < static_cast<int>(cc.offline_capacity.size()); ++n) {
    for (int i : cc.offline_capacity[n].plants) {
      for (auto& list : caps_[i]) add_unique(list, n);
    }
  }
}

double SearchModel::full_cost(const SearchState& state) const {
  const int T = inst_.steps();
  double refuel = 0.0;
  double residual = 0.0;
  for (int i = 0; i < inst_.type2_count(); ++i) {
    const auto& p = inst_.type2[i];
    for (int k = 0; k < p.cycle_count(); ++k) refuel += p.cycles[k].c_refuel * state.schedule.refuel[i][k];
    residual += p.c_final * state.plans[i].x[T];
  }
  double type1 = 0.0;
  for (int t = 0; t < T; ++t) {
    double total = 0.0;
    for (const auto& plan : state.plans) total += plan.p[t];
    type1 += approx_(t, total);
  }
  return refuel + type1 - weight_ * residual;
}

SearchState SearchModel::make_state(Schedule schedule, std::vector<PlannerResult> plans) const {
  SearchState s;
  s.schedule = std::move(schedule);
  s.plans = std::move(plans);
  for (int i = 0; i < inst_.type2_count(); ++i) {
    for (int k = 0; k < inst_.type2[i].cycle_count(); ++k) s.schedule.refuel[i][k] = s.plans[i].refuel[k];
  }
  s.total.assign(inst_.steps(), 0.0);
  for (int t = 0; t < inst_.steps(); ++t) {
    for (const auto& plan : s.plans) s.total[t] += plan.p[t];
  }
  s.cost = full_cost(s);
  return s;
}

bool SearchModel::check_move_feasible(const SearchState& state, const Move& move) const {
  const Schedule& sch = state.schedule;
  const OutageRef o{move.plant, move.cycle};
  if (!sch.start[o.plant][o.cycle]) return false;
  const Type2Plant& plant = inst_.type2[o.plant];
  const Cycle& c = plant.cycles[o.cycle];
  const int H = inst_.weeks();
  const int m = move.week;
  if (m < 0 || m + c.da > H || (c.to && m < *c.to) || (c.ta && m > *c.ta)) return false;
  if (o.cycle > 0 && m < sch.week(o.plant, o.cycle - 1) + plant.cycles[o.cycle - 1].da) return false;
  if (o.cycle + 1 < plant.cycle_count() && sch.scheduled(o.plant, o.cycle + 1) &&
      sch.week(o.plant, o.cycle + 1) < m + c.da) {
    return false;
  }

  const Weeks weeks{sch, o, m};
  const auto& cc = inst_.coupling;
  for (int n : seps_[o.plant][o.cycle]) {
    const auto& s = cc.separations[n];
    const auto a = weeks(s.first);
    const auto b = weeks(s.second);
    if (!a || !b) continue;
    auto intersects = [&](int ha, OutageRef r) {
      return ha <= s.week_hi && ha + inst_.cycle(r).da - 1 >= s.week_lo;
    };
    if (!intersects(*a, s.first) || !intersects(*b, s.second)) continue;
    if (*a - *b >= s.se || *b - *a >= s.se_prime) continue;
    return false;
  }
  for (int n : maxoff_[o.plant][o.cycle]) {
    const auto& mo = cc.max_offline[n];
    if (!active(inst_, m, o, mo.week)) continue;
    int count = 0;
    for (auto r : mo.outages) count += active(inst_, weeks(r), r, mo.week) ? 1 : 0;
    if (count > mo.limit) return false;
  }
  for (int n : res_[o.plant][o.cycle]) {
    const auto& rl = cc.resources[n];
    for (int h = 0; h < H; ++h) {
      if (!holds(inst_, m, o, h)) continue;
      int count = 0;
      for (auto r : rl.outages) count += holds(inst_, weeks(r), r, h) ? 1 : 0;
      if (count > rl.capacity) return false;
    }
  }
  for (int n : caps_[o.plant][o.cycle]) {
    const auto& oc = cc.offline_capacity[n];
    for (int h : oc.weeks) {
      if (!active(inst_, m, o, h)) continue;
      std::vector<int> offline;
      for (int i : oc.plants) {
        for (int k = 0; k < inst_.type2[i].cycle_count(); ++k) {
          if (active(inst_, weeks({i, k}), {i, k}, h)) {
            offline.push_back(i);
            break;
          }
        }
      }
      const StepRange steps = inst_.grid.steps_of_week(h);
      for (int t = steps.begin; t < steps.end; ++t) {
        double load = 0.0;
        for (int i : offline) load += inst_.type2[i].pmax[t];
        if (load > oc.imax + kTolerance) return false;
      }
    }
  }
  return true;
}

std::optional<Candidate> SearchModel::delta_evaluate(const SearchState& state, const Move& move) const {
  const int i = move.plant;
  const int T = inst_.steps();
  Schedule next = state.schedule;
  next.start[i][move.cycle] = move.week;
  const PlannerResult& old = state.plans[i];
  Candidate cand{move, plan_and_raise(inst_, next, i, old.refuel), {}, 0.0};
  if (!cand.plan.feasible) return std::nullopt;

  const auto& p = inst_.type2[i];
  double delta = 0.0;
  for (int k = 0; k < p.cycle_count(); ++k) {
    delta += p.cycles[k].c_refuel * (cand.plan.refuel[k] - old.refuel[k]);
  }
  for (int t = 0; t < T; ++t) {
    if (cand.plan.p[t] == old.p[t]) continue;
    cand.changed.push_back(t);
    double total = 0.0;
    for (int j = 0; j < inst_.type2_count(); ++j) total += j == i ? cand.plan.p[t] : state.plans[j].p[t];
    delta += approx_(t, total) - approx_(t, state.total[t]);
  }
  delta -= weight_ * p.c_final * (cand.plan.x[T] - old.x[T]);
  cand.delta = delta;
  return cand;
}

void SearchModel::apply(SearchState& state, Candidate cand) const {
  const int i = cand.move.plant;
  state.schedule.start[i][cand.move.cycle] = cand.move.week;
  state.schedule.refuel[i] = cand.plan.refuel;
  state.plans[i] = std::move(cand.plan);
  for (int t : cand.changed) {
    double total = 0.0;
    for (const auto& plan : state.plans) total += plan.p[t];
    state.total[t] = total;
  }
  state.cost += cand.delta;
}

MoveSampler::MoveSampler(const Instance& inst, const Schedule& schedule, int radius) {
  const int H = inst.weeks();
  std::int64_t sum = 0;
  for (int i = 0; i < inst.type2_count(); ++i) {
    for (int k = 0; k < inst.type2[i].cycle_count(); ++k) {
      if (!schedule.scheduled(i, k)) continue;
      const Cycle& c = inst.type2[i].cycles[k];
      const int ha = schedule.week(i, k);
      int lo = std::max(ha - radius + 1, 0);
      int hi = std::min(ha + radius - 1, H - c.da);
      if (c.to) lo = std::max(lo, *c.to);
      if (c.ta) hi = std::min(hi, *c.ta);
      std::int64_t n = hi - lo + 1;
      if (n <= 0) continue;
      if (ha >= lo && ha <= hi) --n;
      if (n <= 0) continue;
      ranges_.push_back({{i, k}, ha, lo, hi});
      sum += n;
      cumulative_.push_back(sum);
    }
  }
}

Move MoveSampler::sample(std::mt19937_64& rng) const {
  const auto total = static_cast<std::uint64_t>(size());
  const auto pick = static_cast<std::int64_t>(rng() % total);
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), pick);
  const auto idx = static_cast<std::size_t>(it - cumulative_.begin());
  const Range& r = ranges_[idx];
  const std::int64_t offset = pick - (idx == 0 ? 0 : cumulative_[idx - 1]);
  int week = r.lo + static_cast<int>(offset);
  if (r.current >= r.lo && week >= r.current) ++week;
  return {r.outage.plant, r.outage.cycle, week};
}

std::vector<int> MoveSampler::targets(int plant, int cycle) const {
  std::vector<int> out;
  for (const auto& r : ranges_) {
    if (r.outage.plant != plant || r.outage.cycle != cycle) continue;
    for (int w = r.lo; w <= r.hi; ++w) {
      if (w != r.current) out.push_back(w);
    }
  }
  return out;
}

MoveSampler enumerate_moves(const Instance& instance, const SearchState& state, const SaParams& params) {
  return MoveSampler(instance, state.schedule, params.radius);
}

bool sa_accept(double delta, double tau, std::mt19937_64& rng) {
  if (delta <= 0.0) return true;
  return uniform01(rng) < std::exp(-delta / tau);
}

double calibrate_temperature(const std::vector<double>& deltas, double target) {
  std::vector<double> worse;
  for (double d : deltas) {
    if (d > 0.0) worse.push_back(d);
  }
  if (deltas.empty()) return 1.0;
  const double n = static_cast<double>(deltas.size());
  const double free = n - static_cast<double>(worse.size());
  if (worse.empty()) return 1.0;
  const double smallest = *std::min_element(worse.begin(), worse.end());
  if (free / n >= target) return smallest * 1e-6;
  auto ratio = [&](double tau) {
    double sum = free;
    for (double d : worse) sum += std::exp(-d / tau);
    return sum / n;
  };
  const double largest = *std::max_element(worse.begin(), worse.end());
  double lo = std::log(smallest * 1e-6);
  double hi = std::log(largest * 1e6);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ratio(std::exp(mid)) < target ? lo : hi) = mid;
  }
  return std::exp(hi);
}

AnnealResult anneal(const SearchModel& model, SearchState initial, const SaParams& params) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto out_of_budget = [&](std::uint64_t iterations) {
    if (params.max_iterations > 0 && iterations >= params.max_iterations) return true;
    return params.use_clock && std::chrono::duration<double>(Clock::now() - start).count() >= params.time_budget;
  };

  AnnealResult result;
  result.initial_cost = initial.cost;
  result.best_trace.push_back(initial.cost);
  SearchState current = std::move(initial);
  result.best = current;
  if (params.use_clock && params.time_budget <= 0.0) return result;

  const Instance& inst = model.instance();
  std::mt19937_64 rng(params.seed);
  MoveSampler sampler = enumerate_moves(inst, current, params);
  if (sampler.empty()) return result;

  std::vector<double> probes;
  for (int n = 0; n < params.probes; ++n) {
    const Move mv = sampler.sample(rng);
    if (!model.check_move_feasible(current, mv)) continue;
    if (auto cand = model.delta_evaluate(current, mv)) probes.push_back(cand->delta);
  }
  double start_tau = calibrate_temperature(probes, params.start_accept_ratio);
  double tau = start_tau;
  result.start_tau = start_tau;

  int idle_restart = 0;
  int idle_stop = 0;
  int plateau = 0;
  while (!out_of_budget(result.iterations)) {
    ++result.iterations;
    const Move mv = sampler.sample(rng);
    bool accepted = false;
    if (model.check_move_feasible(current, mv)) {
      if (auto cand = model.delta_evaluate(current, mv); cand && sa_accept(cand->delta, tau, rng)) {
        model.apply(current, std::move(*cand));
        sampler = enumerate_moves(inst, current, params);
        accepted = true;
      }
    }
    if (accepted) {
      ++result.accepted;
      idle_restart = 0;
      idle_stop = 0;
      if (current.cost < result.best.cost) {
        result.best = current;
        result.best_trace.push_back(current.cost);
      }
    } else {
      ++idle_restart;
      ++idle_stop;
    }
    if (++plateau >= params.n_plateau) {
      plateau = 0;
      if (params.telemetry) {
        *params.telemetry << "iter " << result.iterations << " tau " << tau << " cost " << current.cost
                          << " best " << result.best.cost << '\n';
      }
      tau *= params.cooling;
    }
    if (idle_stop >= params.stop_idle) break;
    if (idle_restart >= params.m_idle) {
      start_tau *= params.k_restart;
      tau = start_tau;
      idle_restart = 0;
      ++result.restarts;
    }
    if (sampler.empty()) break;
  }
  return result;
}

}  // namespace outage
