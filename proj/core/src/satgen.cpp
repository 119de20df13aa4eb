#include "outage/satgen.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <random>
#include <sstream>

#include "outage/errors.hpp"

namespace outage {

namespace {

// Values forced by making the clause's literal at `week` its only true one;
// nullopt if that is self-contradictory.
std::optional<std::map<int, bool>> implied(const std::array<int, 3>& clause, int week) {
  int chosen = 0;
  int copies = 0;
  for (int lit : clause) {
    if (literal_week(lit) == week) {
      chosen = lit;
      ++copies;
    }
  }
  if (copies != 1) return std::nullopt;
  std::map<int, bool> values{{std::abs(chosen), chosen > 0}};
  for (int lit : clause) {
    if (lit == chosen) continue;
    const int v = std::abs(lit);
    const bool value = lit < 0;  // the literal is false
    auto [it, fresh] = values.emplace(v, value);
    if (!fresh && it->second != value) return std::nullopt;
  }
  return values;
}

bool clash(const std::map<int, bool>& a, const std::map<int, bool>& b) {
  for (const auto& [v, value] : a) {
    auto it = b.find(v);
    if (it != b.end() && it->second != value) return true;
  }
  return false;
}

}  // namespace

Formula parse_dimacs(std::string_view text) {
  Formula f;
  int declared = -1;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first) || first[0] == 'c' || first[0] == '%') continue;
    const std::string where = "line " + std::to_string(lineno);
    if (first == "p") {
      std::string kind;
      int clauses = 0;
      if (!(ls >> kind >> declared >> clauses) || declared < 0) throw ParseError(where + ": bad header");
      continue;
    }
    std::vector<int> lits;
    ls.clear();
    ls.str(line);
    long long v;
    bool closed = false;
    while (ls >> v) {
      if (v == 0) {
        closed = true;
        break;
      }
      if (v > 1'000'000 || v < -1'000'000) throw ParseError(where + ": variable out of range");
      lits.push_back(static_cast<int>(v));
    }
    if (!closed && !ls.eof()) throw ParseError(where + ": expected integer literals");
    if (lits.size() != 3) {
      throw ParseError(where + ": clause has " + std::to_string(lits.size()) + " literals, expected 3");
    }
    f.clauses.push_back({lits[0], lits[1], lits[2]});
    for (int l : lits) f.n = std::max(f.n, std::abs(l));
  }
  if (declared >= 0) {
    if (f.n > declared) throw ParseError("clause uses variable " + std::to_string(f.n) + " above declared count");
    f.n = declared;
  }
  return f;
}

std::string write_dimacs(const Formula& f) {
  std::ostringstream out;
  out << "p cnf " << f.n << ' ' << f.clauses.size() << '\n';
  for (const auto& c : f.clauses) out << c[0] << ' ' << c[1] << ' ' << c[2] << " 0\n";
  return out.str();
}

Instance encode_1in3sat(const Formula& f) {
  for (const auto& c : f.clauses) {
    for (int lit : c) {
      if (lit == 0 || std::abs(lit) > f.n) throw ValidationError("literal outside variables 1.." + std::to_string(f.n));
    }
  }
  const int I = static_cast<int>(f.clauses.size());
  const int H = 2 * f.n;
  Instance inst;
  inst.grid = TimeGrid::uniform(H, 1, 1.0);
  const double xi = 8.0 * f.n;

  Type1Plant filler{Table<double>(H, 1, 0.0), Table<double>(H, 1, std::max(1, I)), Table<double>(H, 1, 1.0)};
  inst.type1.push_back(std::move(filler));

  for (int j = 0; j < I; ++j) {
    Type2Plant p;
    p.pmax.assign(H, 1.0);
    p.xi = xi;
    Cycle c;
    c.da = 1;
    c.to = 0;
    c.ta = H - 1;
    c.q = 0.5;
    c.amax = xi;
    c.smax = xi;
    c.resource_windows = {{0, 1}};
    p.cycles.push_back(c);
    inst.type2.push_back(std::move(p));
  }
  inst.scenarios.demand = Table<double>(H, 1, static_cast<double>(I));

  std::vector<std::vector<std::optional<std::map<int, bool>>>> options(I);
  for (int j = 0; j < I; ++j) {
    OfflineCapacity block{{j}, 0.0, {}};
    for (int w = 0; w < H; ++w) {
      options[j].push_back(implied(f.clauses[j], w));
      if (!options[j].back()) block.weeks.push_back(w);
    }
    if (!block.weeks.empty()) inst.coupling.offline_capacity.push_back(std::move(block));
  }
  for (int a = 0; a < I; ++a) {
    for (int b = a + 1; b < I; ++b) {
      for (int u = 0; u < H; ++u) {
        if (!options[a][u]) continue;
        for (int w = 0; w < H; ++w) {
          if (!options[b][w] || !clash(*options[a][u], *options[b][w])) continue;
          // Violated exactly when ha(first) = lo and ha(second) = hi.
          OutageRef first{a, 0};
          OutageRef second{b, 0};
          int lo = u;
          int hi = w;
          if (u > w) {
            std::swap(first, second);
            std::swap(lo, hi);
          }
          const int d = hi - lo;
          inst.coupling.separations.push_back({first, second, d == 0 ? 1 : 1 - d, d + 1, lo, hi});
        }
      }
    }
  }
  validate(inst);
  return inst;
}

Assignment decode_assignment(const Formula& f, const Schedule& schedule) {
  Assignment out(f.n + 1, false);
  std::vector<bool> set(f.n + 1, false);
  for (int j = 0; j < static_cast<int>(f.clauses.size()); ++j) {
    if (j >= static_cast<int>(schedule.start.size()) || schedule.start[j].empty() || !schedule.start[j][0]) {
      throw StructuralError("clause " + std::to_string(j) + " has no scheduled outage");
    }
    const auto values = implied(f.clauses[j], *schedule.start[j][0]);
    if (!values) throw StructuralError("clause " + std::to_string(j) + " sits on a week it cannot use");
    for (const auto& [v, value] : *values) {
      if (set[v] && out[v] != value) throw StructuralError("variable " + std::to_string(v) + " decoded both ways");
      set[v] = true;
      out[v] = value;
    }
  }
  return out;
}

bool satisfies_1in3(const Formula& f, const Assignment& a) {
  for (const auto& c : f.clauses) {
    int count = 0;
    for (int lit : c) count += (a[std::abs(lit)] == (lit > 0)) ? 1 : 0;
    if (count != 1) return false;
  }
  return true;
}

std::optional<Assignment> brute_force_1in3(const Formula& f) {
  if (f.n > 24) throw ValidationError("brute force limited to 24 variables");
  Assignment a(f.n + 1, false);
  for (std::uint32_t mask = 0; mask < (1u << f.n); ++mask) {
    for (int v = 1; v <= f.n; ++v) a[v] = (mask >> (v - 1)) & 1u;
    if (satisfies_1in3(f, a)) return a;
  }
  return std::nullopt;
}

Formula random_formula(int n, int clauses, std::uint64_t seed) {
  if (n < 1 || clauses < 1) throw ValidationError("formula needs at least one variable and one clause");
  std::mt19937_64 rng(seed);
  Formula f;
  f.n = n;
  for (int c = 0; c < clauses; ++c) {
    std::array<int, 3> clause{};
    for (int& lit : clause) {
      lit = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n));
      if (rng() & 1u) lit = -lit;
    }
    f.clauses.push_back(clause);
  }
  return f;
}

}  // namespace outage
