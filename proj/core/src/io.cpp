#include "outage/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "outage/errors.hpp"

namespace outage {

using json = nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------- writing

bool is_scalar(const json& j) { return !j.is_array() && !j.is_object(); }

void dump(const json& j, int indent, std::string& out) {
  const std::string pad(indent, ' ');
  const std::string inner(indent + 2, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += inner + json(it.key()).dump() + ": ";
        dump(it.value(), indent + 2, out);
      }
      out += "\n" + pad + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      const bool flat = std::all_of(j.begin(), j.end(), is_scalar);
      out += flat ? "[" : "[\n";
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? ", " : ",\n";
        first = false;
        if (!flat) out += inner;
        dump(e, indent + 2, out);
      }
      if (!flat) out += "\n" + pad;
      out += "]";
      return;
    }
    case json::value_t::number_float:
      out += format_decimal(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

std::string render(const json& j) {
  std::string out;
  dump(j, 0, out);
  out += "\n";
  return out;
}

json table_json(const Table<double>& tab) {
  json rows = json::array();
  for (std::size_t r = 0; r < tab.rows(); ++r) {
    json row = json::array();
    for (double v : tab.row(r)) row.push_back(v);
    rows.push_back(std::move(row));
  }
  return rows;
}

json opt_json(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }

json ref_json(OutageRef o) { return json::array({o.plant, o.cycle}); }

json refs_json(const std::vector<OutageRef>& refs) {
  json out = json::array();
  for (auto o : refs) out.push_back(ref_json(o));
  return out;
}

json campaign_json(const CampaignParams& c) {
  json pb = json::array();
  for (const auto& [f, v] : c.pb.points()) pb.push_back(json::array({f, v}));
  return json{{"bo", c.bo}, {"mmax", c.mmax}, {"pb", pb}};
}

// ---------------------------------------------------------------- reading

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ParseError(path + ": " + what);
}

const json& field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "missing field");
  return *it;
}

const json& array_at(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  return j;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

double num_field(const json& obj, const char* key, const std::string& path) {
  return number(field(obj, key, path), path + "." + key);
}

int int_field(const json& obj, const char* key, const std::string& path) {
  return integer(field(obj, key, path), path + "." + key);
}

std::optional<int> opt_int_field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  return integer(*it, path + "." + key);
}

std::string idx(const std::string& path, std::size_t n) { return path + "[" + std::to_string(n) + "]"; }

std::vector<double> numbers(const json& j, const std::string& path) {
  std::vector<double> out;
  for (std::size_t n = 0; n < array_at(j, path).size(); ++n) out.push_back(number(j[n], idx(path, n)));
  return out;
}

std::vector<int> integers(const json& j, const std::string& path) {
  std::vector<int> out;
  for (std::size_t n = 0; n < array_at(j, path).size(); ++n) out.push_back(integer(j[n], idx(path, n)));
  return out;
}

Table<double> table(const json& j, const std::string& path, std::size_t rows, std::size_t cols) {
  array_at(j, path);
  if (j.size() != rows) {
    throw ValidationError(path + ": expected " + std::to_string(rows) + " rows, found " +
                          std::to_string(j.size()));
  }
  Table<double> out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto row = numbers(j[r], idx(path, r));
    if (row.size() != cols) {
      throw ValidationError(idx(path, r) + ": expected " + std::to_string(cols) + " columns");
    }
    std::copy(row.begin(), row.end(), out.row(r).begin());
  }
  return out;
}

OutageRef ref(const json& j, const std::string& path) {
  const auto v = integers(j, path);
  if (v.size() != 2) fail(path, "expected [plant, cycle]");
  return {v[0], v[1]};
}

std::vector<OutageRef> refs(const json& j, const std::string& path) {
  std::vector<OutageRef> out;
  for (std::size_t n = 0; n < array_at(j, path).size(); ++n) out.push_back(ref(j[n], idx(path, n)));
  return out;
}

CampaignParams campaign(const json& j, const std::string& path) {
  CampaignParams c;
  c.bo = num_field(j, "bo", path);
  c.mmax = num_field(j, "mmax", path);
  const json& pb = array_at(field(j, "pb", path), path + ".pb");
  std::vector<std::pair<double, double>> pts;
  for (std::size_t n = 0; n < pb.size(); ++n) {
    const auto pt = numbers(pb[n], idx(path + ".pb", n));
    if (pt.size() != 2) fail(idx(path + ".pb", n), "expected [fuel, fraction]");
    pts.emplace_back(pt[0], pt[1]);
  }
  if (pts.empty()) fail(path + ".pb", "profile needs at least one point");
  c.pb = ProfileCurve(std::move(pts));
  return c;
}

json parse_text(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t n = 0; n + 1 < e.byte && n < text.size(); ++n) {
      if (text[n] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(col) +
                     ": malformed JSON");
  }
}

}  // namespace

std::string write_instance(const Instance& inst) {
  json root;
  json grid;
  grid["steps_per_week"] = inst.grid.steps_per_week();
  grid["hours_per_step"] = inst.grid.hours_per_step();
  root["grid"] = grid;

  json type1 = json::array();
  for (const auto& p : inst.type1) {
    type1.push_back({{"pmin", table_json(p.pmin)}, {"pmax", table_json(p.pmax)}, {"cost", table_json(p.cost)}});
  }
  root["type1"] = type1;

  json type2 = json::array();
  for (const auto& p : inst.type2) {
    json cycles = json::array();
    for (const auto& c : p.cycles) {
      json windows = json::array();
      for (const auto& w : c.resource_windows) windows.push_back(json::array({w.offset, w.duration}));
      json cj{{"da", c.da},       {"to", opt_json(c.to)},     {"ta", opt_json(c.ta)},
              {"rmin", c.rmin},   {"rmax", c.rmax},           {"q", c.q},
              {"qprime", c.qprime}, {"amax", c.amax},         {"smax", c.smax},
              {"c_refuel", c.c_refuel}};
      const json campaign = campaign_json(c.campaign);
      for (auto& [k, v] : campaign.items()) cj[k] = v;
      cj["resource_windows"] = windows;
      cycles.push_back(std::move(cj));
    }
    json pj;
    pj["pmax"] = p.pmax;
    pj["xi"] = p.xi;
    pj["c_final"] = p.c_final;
    pj["initial_campaign"] = campaign_json(p.initial_campaign);
    pj["cycles"] = cycles;
    type2.push_back(std::move(pj));
  }
  root["type2"] = type2;

  root["scenarios"] = {{"epsilon", inst.scenarios.epsilon}, {"demand", table_json(inst.scenarios.demand)}};

  const auto& cc = inst.coupling;
  json coupling;
  json seps = json::array();
  for (const auto& s : cc.separations) {
    seps.push_back({{"first", ref_json(s.first)},
                    {"second", ref_json(s.second)},
                    {"se", s.se},
                    {"se_prime", s.se_prime},
                    {"weeks", json::array({s.week_lo, s.week_hi})}});
  }
  coupling["separations"] = seps;
  json maxoff = json::array();
  for (const auto& m : cc.max_offline) {
    maxoff.push_back({{"week", m.week}, {"outages", refs_json(m.outages)}, {"limit", m.limit}});
  }
  coupling["max_offline"] = maxoff;
  json res = json::array();
  for (const auto& r : cc.resources) res.push_back({{"outages", refs_json(r.outages)}, {"capacity", r.capacity}});
  coupling["resources"] = res;
  json cap = json::array();
  for (const auto& c : cc.offline_capacity) {
    cap.push_back({{"plants", c.plants}, {"imax", c.imax}, {"weeks", c.weeks}});
  }
  coupling["offline_capacity"] = cap;
  root["coupling"] = coupling;
  return render(root);
}

Instance parse_instance(std::string_view text) {
  const json root = parse_text(text);
  Instance inst;

  const json& grid = field(root, "grid", "instance");
  const auto spw = integers(field(grid, "steps_per_week", "grid"), "grid.steps_per_week");
  try {
    inst.grid = TimeGrid(spw, num_field(grid, "hours_per_step", "grid"));
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("grid: ") + e.what());
  }
  const auto T = static_cast<std::size_t>(inst.steps());

  const json& sc = field(root, "scenarios", "instance");
  const json& demand = array_at(field(sc, "demand", "scenarios"), "scenarios.demand");
  const std::size_t S = demand.empty() ? 0 : array_at(demand[0], "scenarios.demand[0]").size();
  inst.scenarios.demand = table(demand, "scenarios.demand", T, S);
  inst.scenarios.epsilon = num_field(sc, "epsilon", "scenarios");

  const json& t1 = array_at(field(root, "type1", "instance"), "type1");
  for (std::size_t j = 0; j < t1.size(); ++j) {
    const std::string path = idx("type1", j);
    Type1Plant p;
    p.pmin = table(field(t1[j], "pmin", path), path + ".pmin", T, S);
    p.pmax = table(field(t1[j], "pmax", path), path + ".pmax", T, S);
    p.cost = table(field(t1[j], "cost", path), path + ".cost", T, S);
    inst.type1.push_back(std::move(p));
  }

  const json& t2 = array_at(field(root, "type2", "instance"), "type2");
  for (std::size_t i = 0; i < t2.size(); ++i) {
    const std::string path = idx("type2", i);
    Type2Plant p;
    p.pmax = numbers(field(t2[i], "pmax", path), path + ".pmax");
    p.xi = num_field(t2[i], "xi", path);
    p.c_final = num_field(t2[i], "c_final", path);
    p.initial_campaign = campaign(field(t2[i], "initial_campaign", path), path + ".initial_campaign");
    const json& cycles = array_at(field(t2[i], "cycles", path), path + ".cycles");
    for (std::size_t k = 0; k < cycles.size(); ++k) {
      const std::string cp = idx(path + ".cycles", k);
      const json& cj = cycles[k];
      Cycle c;
      c.da = int_field(cj, "da", cp);
      c.to = opt_int_field(cj, "to", cp);
      c.ta = opt_int_field(cj, "ta", cp);
      c.rmin = num_field(cj, "rmin", cp);
      c.rmax = num_field(cj, "rmax", cp);
      c.q = num_field(cj, "q", cp);
      c.qprime = num_field(cj, "qprime", cp);
      c.amax = num_field(cj, "amax", cp);
      c.smax = num_field(cj, "smax", cp);
      c.c_refuel = num_field(cj, "c_refuel", cp);
      c.campaign = campaign(cj, cp);
      const json& windows = array_at(field(cj, "resource_windows", cp), cp + ".resource_windows");
      for (std::size_t n = 0; n < windows.size(); ++n) {
        const auto w = integers(windows[n], idx(cp + ".resource_windows", n));
        if (w.size() != 2) fail(idx(cp + ".resource_windows", n), "expected [offset, duration]");
        c.resource_windows.push_back({w[0], w[1]});
      }
      p.cycles.push_back(std::move(c));
    }
    inst.type2.push_back(std::move(p));
  }

  const json& cc = field(root, "coupling", "instance");
  const json& seps = array_at(field(cc, "separations", "coupling"), "coupling.separations");
  for (std::size_t n = 0; n < seps.size(); ++n) {
    const std::string path = idx("coupling.separations", n);
    Separation s;
    s.first = ref(field(seps[n], "first", path), path + ".first");
    s.second = ref(field(seps[n], "second", path), path + ".second");
    s.se = int_field(seps[n], "se", path);
    s.se_prime = int_field(seps[n], "se_prime", path);
    const auto weeks = integers(field(seps[n], "weeks", path), path + ".weeks");
    if (weeks.size() != 2) fail(path + ".weeks", "expected [lo, hi]");
    s.week_lo = weeks[0];
    s.week_hi = weeks[1];
    inst.coupling.separations.push_back(std::move(s));
  }
  const json& maxoff = array_at(field(cc, "max_offline", "coupling"), "coupling.max_offline");
  for (std::size_t n = 0; n < maxoff.size(); ++n) {
    const std::string path = idx("coupling.max_offline", n);
    inst.coupling.max_offline.push_back({int_field(maxoff[n], "week", path),
                                         refs(field(maxoff[n], "outages", path), path + ".outages"),
                                         int_field(maxoff[n], "limit", path)});
  }
  const json& res = array_at(field(cc, "resources", "coupling"), "coupling.resources");
  for (std::size_t n = 0; n < res.size(); ++n) {
    const std::string path = idx("coupling.resources", n);
    inst.coupling.resources.push_back({refs(field(res[n], "outages", path), path + ".outages"),
                                       int_field(res[n], "capacity", path)});
  }
  const json& cap = array_at(field(cc, "offline_capacity", "coupling"), "coupling.offline_capacity");
  for (std::size_t n = 0; n < cap.size(); ++n) {
    const std::string path = idx("coupling.offline_capacity", n);
    inst.coupling.offline_capacity.push_back({integers(field(cap[n], "plants", path), path + ".plants"),
                                              num_field(cap[n], "imax", path),
                                              integers(field(cap[n], "weeks", path), path + ".weeks")});
  }

  validate(inst);
  return inst;
}

std::string write_solution(const Instance& inst, const Solution& sol, ObjectiveMode mode) {
  const int T = inst.steps();
  const int I = inst.type2_count();
  const int J = inst.type1_count();
  if (static_cast<int>(sol.schedule.start.size()) != I || static_cast<int>(sol.schedule.refuel.size()) != I ||
      static_cast<int>(sol.production.size()) != inst.scenario_count()) {
    throw StructuralError("solution dimensions differ from instance");
  }
  json ha = json::array();
  json r = json::array();
  for (int i = 0; i < I; ++i) {
    const auto K = static_cast<std::size_t>(inst.type2[i].cycle_count());
    if (sol.schedule.start[i].size() != K || sol.schedule.refuel[i].size() != K) {
      throw StructuralError("schedule row " + std::to_string(i) + " has wrong cycle count");
    }
    json hrow = json::array();
    json rrow = json::array();
    for (std::size_t k = 0; k < K; ++k) {
      hrow.push_back(sol.schedule.start[i][k] ? *sol.schedule.start[i][k] : -1);
      const double v = sol.schedule.refuel[i][k];
      if (!std::isfinite(v)) throw ValidationError("r[" + std::to_string(i) + "][" + std::to_string(k) + "] is not finite");
      rrow.push_back(v);
    }
    ha.push_back(std::move(hrow));
    r.push_back(std::move(rrow));
  }
  json production = json::array();
  for (std::size_t s = 0; s < sol.production.size(); ++s) {
    const auto& sp = sol.production[s];
    if (static_cast<int>(sp.type1.rows()) != J || static_cast<int>(sp.type2.rows()) != I ||
        (J > 0 && static_cast<int>(sp.type1.cols()) != T) || (I > 0 && static_cast<int>(sp.type2.cols()) != T)) {
      throw StructuralError("production[" + std::to_string(s) + "] dimensions differ from instance");
    }
    json rows = json::array();
    auto add_rows = [&](const Table<double>& tab, int offset) {
      for (std::size_t row = 0; row < tab.rows(); ++row) {
        json line = json::array();
        for (std::size_t t = 0; t < tab.cols(); ++t) {
          const double v = tab(row, t);
          if (!std::isfinite(v)) {
            throw ValidationError("production[" + std::to_string(s) + "][" + std::to_string(row + offset) +
                                  "][" + std::to_string(t) + "] is not finite");
          }
          line.push_back(v);
        }
        rows.push_back(std::move(line));
      }
    };
    add_rows(sp.type1, 0);
    add_rows(sp.type2, J);
    production.push_back(std::move(rows));
  }
  json root;
  root["ha"] = ha;
  root["r"] = r;
  root["production"] = production;
  root["objective"] = compute_objective(inst, sol, mode);
  return render(root);
}

ParsedSolution parse_solution(const Instance& inst, std::string_view text) {
  const json root = parse_text(text);
  const int T = inst.steps();
  const int I = inst.type2_count();
  const int J = inst.type1_count();
  ParsedSolution out;
  auto& sched = out.solution.schedule;

  const json& ha = array_at(field(root, "ha", "solution"), "ha");
  const json& r = array_at(field(root, "r", "solution"), "r");
  if (static_cast<int>(ha.size()) != I || static_cast<int>(r.size()) != I) {
    throw StructuralError("ha/r must have one row per type-2 plant");
  }
  for (int i = 0; i < I; ++i) {
    const auto weeks = integers(ha[i], idx("ha", i));
    const auto amounts = numbers(r[i], idx("r", i));
    const auto K = static_cast<std::size_t>(inst.type2[i].cycle_count());
    if (weeks.size() != K || amounts.size() != K) {
      throw StructuralError("ha/r row " + std::to_string(i) + " must have one entry per cycle");
    }
    std::vector<std::optional<int>> row;
    for (int w : weeks) row.push_back(w == -1 ? std::nullopt : std::optional<int>(w));
    sched.start.push_back(std::move(row));
    sched.refuel.push_back(amounts);
  }

  const json& prod = array_at(field(root, "production", "solution"), "production");
  if (static_cast<int>(prod.size()) != inst.scenario_count()) {
    throw StructuralError("production must have one block per scenario");
  }
  for (std::size_t s = 0; s < prod.size(); ++s) {
    const std::string path = idx("production", s);
    const Table<double> rows = table(prod[s], path, J + I, T);
    ScenarioProduction sp{Table<double>(J, T), Table<double>(I, T)};
    for (int j = 0; j < J; ++j) std::copy(rows.row(j).begin(), rows.row(j).end(), sp.type1.row(j).begin());
    for (int i = 0; i < I; ++i) std::copy(rows.row(J + i).begin(), rows.row(J + i).end(), sp.type2.row(i).begin());
    out.solution.production.push_back(std::move(sp));
  }
  if (auto it = root.find("objective"); it != root.end() && !it->is_null()) {
    out.objective = number(*it, "objective");
  }
  return out;
}

std::string write_report(const std::vector<Violation>& violations) {
  json list = json::array();
  for (const auto& v : violations) {
    json item;
    item["kind"] = std::string(to_string(v.kind));
    if (v.plant >= 0) item["plant"] = v.plant;
    if (v.cycle >= 0 || v.kind == ViolationKind::kMaxModulation) item["cycle"] = v.cycle;
    if (v.step >= 0) item["step"] = v.step;
    if (v.scenario >= 0) item["scenario"] = v.scenario;
    if (v.week >= 0) item["week"] = v.week;
    if (v.constraint >= 0) item["constraint"] = v.constraint;
    item["magnitude"] = v.magnitude;
    list.push_back(std::move(item));
  }
  json root;
  root["feasible"] = violations.empty();
  root["violation_count"] = violations.size();
  root["violations"] = list;
  return render(root);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("write failed: " + path);
}

}  // namespace outage
