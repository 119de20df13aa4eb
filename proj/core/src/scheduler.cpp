#include "outage/scheduler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "outage/errors.hpp"

namespace outage {

std::vector<double> accumulate_beta(const Type2Plant& plant, const TimeGrid& grid) {
  const int H = grid.weeks();
  const double D = grid.hours_per_step();
  std::vector<double> beta(H + 1, 0.0);
  for (int h = 0; h < H; ++h) {
    double week = 0.0;
    const StepRange steps = grid.steps_of_week(h);
    for (int t = steps.begin; t < steps.end; ++t) week += plant.pmax[t];
    beta[h + 1] = beta[h] + D * week;
  }
  return beta;
}

double profile_adjusted_fuel(double fi, double bo) {
  return std::max(0.0, fi + 0.5 * std::max(0.0, std::min(2.0 * bo, bo - fi)));
}

ChainEstimate estimate_fuel_chain(const Type2Plant& plant, std::span<const std::optional<int>> starts,
                                  std::span<const double> refuels, std::span<const double> beta) {
  const int K = plant.cycle_count();
  ChainEstimate e{std::vector<double>(K, 0.0), std::vector<double>(K, 0.0),
                  std::vector<double>(K, 0.0), std::vector<double>(K, 0.0)};
  double fuel = plant.xi;
  int prev_end = 0;
  for (int k = 0; k < K; ++k) {
    if (!starts[k]) break;
    const int ha = *starts[k];
    const Cycle& c = plant.cycles[k];
    e.fu[k] = beta[ha] - beta[prev_end];
    e.fi[k] = fuel - e.fu[k];
    e.fb[k] = profile_adjusted_fuel(e.fi[k], plant.campaign(k - 1).bo);
    e.fa[k] = fuel_after_reload(e.fb[k], refuels[k], c);
    fuel = e.fa[k];
    prev_end = ha + c.da;
  }
  return e;
}

namespace {

double average_output(const std::vector<double>& beta) {
  const int H = static_cast<int>(beta.size()) - 1;
  return H > 0 ? beta[H] / H : 0.0;
}

// alpha * max(0, weeks - fuel / alpha): offline weeks estimated for a gap of
// `weeks` covered by `fuel`.
double gap_term(double alpha, double weeks, double fuel) {
  if (alpha <= 0.0) return 0.0;
  return alpha * std::max(0.0, weeks - fuel / alpha);
}

}  // namespace

FuelEstimate estimate_fuel(const Instance& inst, const Schedule& schedule) {
  FuelEstimate e;
  for (int i = 0; i < inst.type2_count(); ++i) {
    const auto& p = inst.type2[i];
    e.beta.push_back(accumulate_beta(p, inst.grid));
    e.chain.push_back(estimate_fuel_chain(p, schedule.start[i], schedule.refuel[i], e.beta.back()));
    e.alpha.push_back(average_output(e.beta.back()));
    int last = -1;
    for (int k = 0; k < p.cycle_count() && schedule.start[i][k]; ++k) last = k;
    e.k_last.push_back(last);
  }
  return e;
}

double surrogate_objective(const Instance& inst, const Schedule& schedule, const FuelEstimate& e) {
  const int H = inst.weeks();
  double total = 0.0;
  for (int i = 0; i < inst.type2_count(); ++i) {
    const auto& p = inst.type2[i];
    const double alpha = e.alpha[i];
    const int last = e.k_last[i];
    if (last < 0) {
      total += gap_term(alpha, H, p.xi);
      continue;
    }
    total += gap_term(alpha, schedule.week(i, 0), p.xi);
    for (int k = 1; k <= last; ++k) {
      const int prev_end = schedule.week(i, k - 1) + p.cycles[k - 1].da;
      total += gap_term(alpha, schedule.week(i, k) - prev_end, e.chain[i].fa[k - 1]);
    }
    total += gap_term(alpha, H - (schedule.week(i, last) + p.cycles[last].da), e.chain[i].fa[last]);
  }
  return total;
}

namespace {

constexpr int kUnassigned = -1;

class Engine {
 public:
  Engine(const Instance& inst, const SchedulerConfig& cfg) : inst_(inst), cfg_(cfg), H_(inst.weeks()) {
    const int I = inst.type2_count();
    id_.resize(I);
    for (int i = 0; i < I; ++i) {
      const auto& p = inst.type2[i];
      beta_.push_back(accumulate_beta(p, inst.grid));
      alpha_.push_back(average_output(beta_.back()));
      std::vector<bool> mand(p.cycle_count() + 1, false);
      for (int k = p.cycle_count() - 1; k >= 0; --k) mand[k] = mand[k + 1] || p.cycles[k].mandatory();
      mandatory_from_.push_back(mand);
      for (int k = 0; k < p.cycle_count(); ++k) {
        id_[i].push_back(static_cast<int>(refs_.size()));
        refs_.push_back({i, k});
      }
    }
    const int n = static_cast<int>(refs_.size());
    dom_.assign(n, std::vector<char>(H_, 1));
    size_.assign(n, H_);
    state_.assign(n, kUnassigned);
    week_.assign(n, -1);
    refuel_.assign(n, 0.0);
    fb_.assign(n, 0.0);
    fa_.assign(n, 0.0);
    fuel_blocked_.assign(I, 0);
    seps_.resize(n);
    maxoff_.resize(n);
    res_.resize(n);
    caps_.resize(n);
    const auto& cc = inst.coupling;
    for (int c = 0; c < static_cast<int>(cc.separations.size()); ++c) {
      const auto& s = cc.separations[c];
      seps_[id(s.first)].push_back(c);
      if (!(s.first == s.second)) seps_[id(s.second)].push_back(c);
    }
    for (int c = 0; c < static_cast<int>(cc.max_offline.size()); ++c) {
      for (auto o : dedup(cc.max_offline[c].outages)) maxoff_[id(o)].push_back(c);
    }
    for (int c = 0; c < static_cast<int>(cc.resources.size()); ++c) {
      for (auto o : dedup(cc.resources[c].outages)) res_[id(o)].push_back(c);
    }
    for (int c = 0; c < static_cast<int>(cc.offline_capacity.size()); ++c) {
      std::vector<int> plants = cc.offline_capacity[c].plants;
      std::sort(plants.begin(), plants.end());
      plants.erase(std::unique(plants.begin(), plants.end()), plants.end());
      for (int i : plants) {
        for (int o : id_[i]) caps_[o].push_back(c);
      }
    }

    rng_.seed(cfg.rng_seed);
    perm_.resize(I);
    std::iota(perm_.begin(), perm_.end(), 0);
    shuffle_order();
  }

  SchedulerResult run() {
    start_ = std::chrono::steady_clock::now();
    SchedulerResult out;
    // Until a first schedule exists, runs are cut after a doubling node
    // count and retried with a fresh plant permutation.
    std::uint64_t span = kFirstRestart;
    if (static_prune()) {
      while (true) {
        restart_at_ = nodes_ + span;
        restart_hit_ = false;
        std::fill(fuel_blocked_.begin(), fuel_blocked_.end(), 0);
        dfs(0, 0.0);
        if (aborted_ || !restart_hit_) break;
        span *= 2;
        shuffle_order();
      }
    }
    out.nodes = nodes_;
    out.exhausted = !aborted_;
    out.incumbents = incumbents_;
    if (best_) {
      out.status = ScheduleStatus::kFeasible;
      out.schedule = *best_;
      out.surrogate = surrogate_objective(inst_, out.schedule, estimate_fuel(inst_, out.schedule));
    } else {
      out.status = aborted_ ? ScheduleStatus::kTimeout : ScheduleStatus::kInfeasible;
      out.schedule = Schedule::unscheduled(inst_);
    }
    return out;
  }

 private:
  static constexpr std::uint64_t kFirstRestart = 2000;

  // Branching order: cycle index first, plants in a seeded permutation.
  void shuffle_order() {
    const int I = static_cast<int>(perm_.size());
    for (int a = I - 1; a > 0; --a) std::swap(perm_[a], perm_[rng_() % static_cast<std::uint64_t>(a + 1)]);
    order_.clear();
    int kmax = 0;
    for (const auto& p : inst_.type2) kmax = std::max(kmax, p.cycle_count());
    for (int k = 0; k < kmax; ++k) {
      for (int i : perm_) {
        if (k < inst_.type2[i].cycle_count()) order_.push_back(id_[i][k]);
      }
    }
  }

  bool halted() const { return aborted_ || restart_hit_; }

  int id(OutageRef o) const { return id_[o.plant][o.cycle]; }
  const Cycle& cyc(int o) const { return inst_.cycle(refs_[o]); }

  static std::vector<OutageRef> dedup(std::vector<OutageRef> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  }

  bool active(int o, int w, int h) const { return w <= h && h < w + cyc(o).da; }
  bool holds(int o, int w, int h) const {
    for (const auto& win : cyc(o).resource_windows) {
      if (h >= w + win.offset && h < w + win.offset + win.duration) return true;
    }
    return false;
  }
  bool in_window(const Separation& s, int o, int w) const {
    return w <= s.week_hi && w + cyc(o).da - 1 >= s.week_lo;
  }

  void remove(int o, int w) {
    if (!dom_[o][w]) return;
    dom_[o][w] = 0;
    --size_[o];
    trail_.push_back({o, w});
  }
  void undo(std::size_t mark) {
    while (trail_.size() > mark) {
      auto [o, w] = trail_.back();
      trail_.pop_back();
      dom_[o][w] = 1;
      ++size_[o];
    }
  }

  bool static_prune() {
    const auto& cc = inst_.coupling;
    for (int o = 0; o < static_cast<int>(refs_.size()); ++o) {
      const Cycle& c = cyc(o);
      for (int w = 0; w < H_; ++w) {
        if (w + c.da > H_ || (c.to && w < *c.to) || (c.ta && w > *c.ta)) remove(o, w);
      }
    }
    for (const auto& s : cc.separations) {
      if (!(s.first == s.second) || (s.se <= 0 || s.se_prime <= 0)) continue;
      const int o = id(s.first);
      for (int w = 0; w < H_; ++w) {
        if (in_window(s, o, w)) remove(o, w);
      }
    }
    for (const auto& m : cc.max_offline) {
      if (m.limit >= 1) continue;
      for (auto ref : m.outages) {
        const int o = id(ref);
        for (int w = 0; w < H_; ++w) {
          if (active(o, w, m.week)) remove(o, w);
        }
      }
    }
    for (const auto& r : cc.resources) {
      if (r.capacity >= 1) continue;
      for (auto ref : r.outages) {
        const int o = id(ref);
        for (int w = 0; w < H_; ++w) {
          for (int h = 0; h < H_; ++h) {
            if (holds(o, w, h)) {
              remove(o, w);
              break;
            }
          }
        }
      }
    }
    for (const auto& c : cc.offline_capacity) {
      for (int h : c.weeks) {
        const StepRange steps = inst_.grid.steps_of_week(h);
        for (int j : c.plants) {
          bool over = false;
          for (int t = steps.begin; t < steps.end && !over; ++t) {
            double load = 0.0;
            for (int i : c.plants) {
              if (i == j) load += inst_.type2[i].pmax[t];
            }
            over = load > c.imax + kTolerance;
          }
          if (!over) continue;
          for (int o : id_[j]) {
            for (int w = 0; w < H_; ++w) {
              if (active(o, w, h)) remove(o, w);
            }
          }
        }
      }
    }
    return consistent();
  }

  // An unassigned outage with an empty domain forces the rest of its plant
  // off, which fails if any of them is mandatory.
  bool consistent() const {
    for (int o = 0; o < static_cast<int>(refs_.size()); ++o) {
      if (state_[o] == kUnassigned && size_[o] == 0 && mandatory_from_[refs_[o].plant][refs_[o].cycle]) {
        return false;
      }
    }
    return true;
  }

  bool plant_offline(int plant, int h) const {
    for (int o : id_[plant]) {
      if (state_[o] == 1 && active(o, week_[o], h)) return true;
    }
    return false;
  }

  bool propagate(int o) {
    const auto& cc = inst_.coupling;
    const int h = week_[o];
    const OutageRef ref = refs_[o];
    if (ref.cycle + 1 < inst_.type2[ref.plant].cycle_count()) {
      const int next = o + 1;
      for (int w = 0; w < std::min(H_, h + cyc(o).da); ++w) remove(next, w);
    }
    for (int c : seps_[o]) {
      const auto& s = cc.separations[c];
      const int other = id(s.first) == o ? id(s.second) : id(s.first);
      if (state_[other] != kUnassigned || !in_window(s, o, h)) continue;
      const bool o_first = id(s.first) == o;
      for (int w = 0; w < H_; ++w) {
        if (!dom_[other][w] || !in_window(s, other, w)) continue;
        const int a = o_first ? h : w;
        const int b = o_first ? w : h;
        if (a - b >= s.se || b - a >= s.se_prime) continue;
        remove(other, w);
      }
    }
    for (int c : maxoff_[o]) {
      const auto& m = cc.max_offline[c];
      if (!active(o, h, m.week)) continue;
      int count = 0;
      for (auto r : m.outages) {
        const int p = id(r);
        if (state_[p] == 1 && active(p, week_[p], m.week)) ++count;
      }
      if (count > m.limit) return false;
      if (count < m.limit) continue;
      for (auto r : m.outages) {
        const int p = id(r);
        if (state_[p] != kUnassigned) continue;
        for (int w = 0; w < H_; ++w) {
          if (dom_[p][w] && active(p, w, m.week)) remove(p, w);
        }
      }
    }
    for (int c : res_[o]) {
      const auto& r = cc.resources[c];
      for (int hh = 0; hh < H_; ++hh) {
        if (!holds(o, h, hh)) continue;
        int count = 0;
        for (auto ref2 : r.outages) {
          const int p = id(ref2);
          if (state_[p] == 1 && holds(p, week_[p], hh)) ++count;
        }
        if (count > r.capacity) return false;
        if (count < r.capacity) continue;
        for (auto ref2 : r.outages) {
          const int p = id(ref2);
          if (state_[p] != kUnassigned) continue;
          for (int w = 0; w < H_; ++w) {
            if (dom_[p][w] && holds(p, w, hh)) remove(p, w);
          }
        }
      }
    }
    for (int c : caps_[o]) {
      const auto& cap = cc.offline_capacity[c];
      for (int hw : cap.weeks) {
        if (!active(o, h, hw)) continue;
        std::vector<char> off(inst_.type2_count(), 0);
        for (int i : cap.plants) off[i] = plant_offline(i, hw) ? 1 : 0;
        const StepRange steps = inst_.grid.steps_of_week(hw);
        for (int j : cap.plants) {
          if (off[j]) continue;
          bool over = false;
          for (int t = steps.begin; t < steps.end && !over; ++t) {
            double load = 0.0;
            for (int i : cap.plants) {
              if (off[i] || i == j) load += inst_.type2[i].pmax[t];
            }
            over = load > cap.imax + kTolerance;
          }
          if (!over) continue;
          for (int p : id_[j]) {
            if (state_[p] != kUnassigned) continue;
            for (int w = 0; w < H_; ++w) {
              if (dom_[p][w] && active(p, w, hw)) remove(p, w);
            }
          }
        }
      }
    }
    return consistent();
  }

  bool stop() {
    if (halted()) return true;
    if (!best_ && nodes_ >= restart_at_) {
      restart_hit_ = true;
      return true;
    }
    const bool check_clock = (nodes_ & 255) == 0;
    double elapsed = -1.0;
    if (check_clock) {
      elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }
    bool hard = cfg_.hard_node_limit > 0 && nodes_ >= cfg_.hard_node_limit;
    if (elapsed >= 0.0 && cfg_.hard_time_budget) hard = hard || elapsed >= *cfg_.hard_time_budget;
    bool soft;
    if (cfg_.node_limit > 0) {
      soft = nodes_ >= cfg_.node_limit;
    } else {
      soft = elapsed >= 0.0 && elapsed >= cfg_.time_budget;
      soft_time_hit_ = soft_time_hit_ || soft;
      soft = soft_time_hit_;
    }
    if (hard || (soft && (best_ || !cfg_.until_first_feasible))) aborted_ = true;
    return aborted_;
  }

  bool prunes(double bound) const { return cfg_.bnb && best_ && bound >= best_value_; }

  void record(double value) {
    if (best_ && value >= best_value_) return;
    Schedule s = Schedule::unscheduled(inst_);
    for (int o = 0; o < static_cast<int>(refs_.size()); ++o) {
      if (state_[o] != 1) continue;
      s.start[refs_[o].plant][refs_[o].cycle] = week_[o];
      s.refuel[refs_[o].plant][refs_[o].cycle] = refuel_[o];
    }
    best_ = std::move(s);
    best_value_ = value;
    incumbents_.push_back(value);
  }

  // Refuel values tried for outage o, largest first: top, top-1, top-2,
  // top-4, ... steps through the quantized domain, then rmin.
  std::vector<double> refuel_candidates(const Cycle& c, double upper) const {
    std::vector<double> values{c.rmin};
    const double q = cfg_.refuel_quantum;
    for (double m = std::floor(c.rmin / q) + 1; m * q < c.rmax; ++m) {
      if (m * q > c.rmin) values.push_back(m * q);
    }
    if (c.rmax > c.rmin) values.push_back(c.rmax);
    int top = -1;
    for (int n = 0; n < static_cast<int>(values.size()); ++n) {
      if (values[n] <= upper) top = n;
    }
    std::vector<double> out;
    if (top < 0) return out;
    out.push_back(values[top]);
    for (int step = 1; top - step > 0; step *= 2) out.push_back(values[top - step]);
    if (top > 0) out.push_back(values[0]);
    return out;
  }

  double margin(double bound) const { return bound - cfg_.fuel_margin * std::fabs(bound); }

  void dfs(int depth, double bound) {
    if (depth == static_cast<int>(order_.size())) {
      record(bound);
      return;
    }
    const int o = order_[depth];
    const auto [i, k] = refs_[o];
    const auto& plant = inst_.type2[i];
    const Cycle& c = plant.cycles[k];
    const double alpha = alpha_[i];
    const bool prev_on = k == 0 || state_[o - 1] == 1;
    const double fuel = k == 0 ? plant.xi : fa_[o - 1];
    const int prev_end = k == 0 ? 0 : week_[o - 1] + plant.cycles[k - 1].da;
    const double bo_prev = plant.campaign(k - 1).bo;

    if (prev_on && size_[o] > 0) {
      for (int h = 0; h < H_; ++h) {
        if (!dom_[o][h]) continue;
        if (stop()) return;
        ++nodes_;
        const double fb = profile_adjusted_fuel(fuel - (beta_[i][h] - beta_[i][prev_end]), bo_prev);
        if (fb > margin(c.amax)) {
          fuel_blocked_[i] = true;
          continue;
        }
        const double gap = gap_term(alpha, h - prev_end, fuel);
        if (prunes(bound + gap)) break;  // the gap only grows with h

        const std::size_t mark = trail_.size();
        state_[o] = 1;
        week_[o] = h;
        fb_[o] = fb;
        if (propagate(o)) {
          double upper = margin(c.smax) - c.q * fb - c.qprime;
          const bool has_next = k + 1 < plant.cycle_count();
          if (has_next && plant.cycles[k + 1].mandatory()) {
            int latest = -1;
            for (int w = 0; w < H_; ++w) {
              if (dom_[o + 1][w]) latest = w;
            }
            const double cap = margin(plant.cycles[k + 1].amax);
            const double fi_max = cap >= c.campaign.bo ? cap : 2.0 * cap - c.campaign.bo;
            const double burn = beta_[i][latest] - beta_[i][h + c.da];
            upper = std::min(upper, fi_max + burn - c.q * fb - c.qprime);
          }
          if (upper < c.rmax) fuel_blocked_[i] = true;
          // A smaller refuel only helps if some fuel check of this plant fired
          // below the larger one.
          const bool outer = fuel_blocked_[i];
          bool fired = false;
          for (double r : refuel_candidates(c, upper)) {
            const double fa = fuel_after_reload(fb, r, c);
            double next_bound = bound + gap;
            if (!has_next) next_bound += gap_term(alpha, H_ - (h + c.da), fa);
            if (prunes(next_bound)) break;  // smaller r only raises the bound
            refuel_[o] = r;
            fa_[o] = fa;
            fuel_blocked_[i] = false;
            dfs(depth + 1, next_bound);
            const bool hit = fuel_blocked_[i];
            fired = fired || hit;
            if (halted() || !hit) break;
          }
          fuel_blocked_[i] = outer || fired;
        }
        undo(mark);
        state_[o] = kUnassigned;
        week_[o] = -1;
        refuel_[o] = 0.0;
        fa_[o] = 0.0;
        if (halted()) return;
      }
    }

    // Leave outage o unscheduled, which closes the plant.
    const bool may_skip = !prev_on || !mandatory_from_[i][k];
    if (!may_skip || stop()) return;
    ++nodes_;
    double closed = bound;
    if (prev_on) {
      closed += k == 0 ? gap_term(alpha, H_, plant.xi) : gap_term(alpha, H_ - prev_end, fuel);
    }
    if (prunes(closed)) return;
    state_[o] = 0;
    dfs(depth + 1, closed);
    state_[o] = kUnassigned;
  }

  const Instance& inst_;
  const SchedulerConfig& cfg_;
  const int H_;
  std::vector<OutageRef> refs_;
  std::vector<std::vector<int>> id_;
  std::vector<std::vector<double>> beta_;
  std::vector<double> alpha_;
  std::vector<std::vector<bool>> mandatory_from_;
  std::vector<std::vector<int>> seps_, maxoff_, res_, caps_;
  std::vector<int> order_;

  std::vector<std::vector<char>> dom_;
  std::vector<int> size_;
  std::vector<std::pair<int, int>> trail_;
  std::vector<int> state_;
  std::vector<int> week_;
  std::vector<double> refuel_, fb_, fa_;

  std::optional<Schedule> best_;
  double best_value_ = std::numeric_limits<double>::infinity();
  std::vector<double> incumbents_;
  std::uint64_t nodes_ = 0;
  bool aborted_ = false;
  bool soft_time_hit_ = false;
  bool restart_hit_ = false;
  std::uint64_t restart_at_ = 0;
  std::mt19937_64 rng_;
  std::vector<int> perm_;
  std::vector<char> fuel_blocked_;  // [i], a fuel bound cut the subtree
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

SchedulerResult solve_schedule(const Instance& instance, const SchedulerConfig& config) {
  if (!(config.refuel_quantum > 0.0)) throw ValidationError("refuel quantum must be positive");
  if (!(config.time_budget > 0.0)) throw ValidationError("scheduler time budget must be positive");
  Engine engine(instance, config);
  return engine.run();
}

}  // namespace outage
