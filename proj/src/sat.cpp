#include "agv/sat.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <optional>
#include <sstream>

namespace agv {

bool is_natural(const Var& v, const std::set<Var>& naturals) {
  auto hash = v.find('#');
  return naturals.count(hash == std::string::npos ? v : v.substr(0, hash)) > 0;
}

namespace {

using Coeffs = std::map<int, std::int64_t>;

// sum a_i x_i + c <= 0 (or = 0 for equalities)
struct Lin {
  Coeffs a;
  std::int64_t c = 0;
};

std::int64_t narrow(__int128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
    throw ResourceError("integer overflow in linear arithmetic");
  return static_cast<std::int64_t>(v);
}

// x := e inside l, e given as coefficients plus constant.
Lin substitute(const Lin& l, int x, const Lin& e) {
  auto it = l.a.find(x);
  if (it == l.a.end()) return l;
  std::int64_t k = it->second;
  Lin r = l;
  r.a.erase(x);
  for (const auto& [v, b] : e.a) {
    std::int64_t nv = narrow(static_cast<__int128>(r.a[v]) + static_cast<__int128>(k) * b);
    if (nv == 0)
      r.a.erase(v);
    else
      r.a[v] = nv;
  }
  r.c = narrow(static_cast<__int128>(r.c) + static_cast<__int128>(k) * e.c);
  return r;
}

std::int64_t gcd_of(const Coeffs& a) {
  std::int64_t g = 0;
  for (const auto& [v, c] : a) g = std::gcd(g, c < 0 ? -c : c);
  return g;
}

// Symmetric residue used by the equality step: a - m * floor(a/m + 1/2).
std::int64_t mod_hat(std::int64_t a, std::int64_t m) { return a - m * floor_div(2 * a + m, 2 * m); }

// Integer feasibility of a conjunction of linear constraints in the style of
// the Omega test: equalities are eliminated exactly (unit substitution, or
// the mod-hat step that shrinks coefficients), inequalities by projection.
// A projection is exact when the eliminated variable has unit coefficients
// on one side; otherwise the real shadow refutes, the dark shadow confirms,
// and the remaining gap is covered by splinter equalities.
class CubeSolver {
 public:
  CubeSolver(int nvars, const SolverOptions& opt) : next_var_(nvars), opt_(opt) {}

  std::optional<std::vector<std::int64_t>> solve(const std::vector<Lin>& les, const std::vector<Lin>& eqs) {
    Values values;
    if (!rec(les, eqs, values)) return std::nullopt;
    std::vector<std::int64_t> out(static_cast<std::size_t>(next_var_), 0);
    for (const auto& [v, x] : values)
      if (v < static_cast<int>(out.size())) out[static_cast<std::size_t>(v)] = x;
    return out;
  }

 private:
  using Values = std::map<int, std::int64_t>;

  static std::int64_t value(const Values& vs, int v) {
    auto it = vs.find(v);
    return it == vs.end() ? 0 : it->second;
  }

  static std::int64_t eval_rest(const Lin& l, int skip, const Values& vs) {
    __int128 r = l.c;
    for (const auto& [v, c] : l.a)
      if (v != skip) r += static_cast<__int128>(c) * value(vs, v);
    return narrow(r);
  }

  void tick() {
    if (++nodes_ > opt_.max_branches)
      throw ResourceError("integer search exceeded " + std::to_string(opt_.max_branches) + " nodes");
  }

  bool rec(std::vector<Lin> les, std::vector<Lin> eqs, Values& values) {
    tick();
    std::vector<std::pair<int, Lin>> subs;  // var = expr, in elimination order
    auto finish = [&](bool ok) {
      if (ok)
        for (auto it = subs.rbegin(); it != subs.rend(); ++it) values[it->first] = eval_rest(it->second, -1, values);
      return ok;
    };
    auto eliminate = [&](int x, const Lin& expr) {
      for (auto& l : eqs) l = substitute(l, x, expr);
      for (auto& l : les) l = substitute(l, x, expr);
      subs.emplace_back(x, expr);
    };

    while (!eqs.empty()) {
      Lin e = eqs.back();
      eqs.pop_back();
      if (e.a.empty()) {
        if (e.c != 0) return false;
        continue;
      }
      std::int64_t g = gcd_of(e.a);
      if (e.c % g != 0) return false;
      for (auto& [v, c] : e.a) c /= g;
      e.c /= g;
      int k = e.a.begin()->first;
      for (const auto& [v, c] : e.a)
        if (std::abs(c) < std::abs(e.a.at(k))) k = v;
      std::int64_t ak = e.a.at(k);
      if (ak == 1 || ak == -1) {
        // ak x + rest = 0  ->  x = -ak * rest
        Lin expr;
        for (const auto& [v, c] : e.a)
          if (v != k) expr.a[v] = -ak * c;
        expr.c = -ak * e.c;
        eliminate(k, expr);
        continue;
      }
      // m sigma = sum mod_hat(a_i) x_i + mod_hat(c), and mod_hat(ak) = -sign(ak).
      std::int64_t m = std::abs(ak) + 1;
      std::int64_t sign = ak > 0 ? 1 : -1;
      int sigma = next_var_++;
      Lin expr;
      for (const auto& [v, c] : e.a)
        if (v != k) {
          std::int64_t h = mod_hat(c, m);
          if (h != 0) expr.a[v] = sign * h;
        }
      expr.a[sigma] = -sign * m;
      expr.c = sign * mod_hat(e.c, m);
      eqs.push_back(e);
      eliminate(k, expr);
    }

    std::map<Coeffs, std::int64_t> system;
    if (!add_all(system, les)) return false;
    // Opposite constraints that meet exactly form an equality.
    for (const auto& [a, c] : system) {
      Coeffs neg = a;
      for (auto& [v, k] : neg) k = -k;
      auto it = system.find(neg);
      if (it != system.end() && c + it->second == 0) {
        Lin eq{a, c};
        system.erase(it);
        system.erase(eq.a);
        std::vector<Lin> rest;
        for (const auto& [b, d] : system) rest.push_back(Lin{b, d});
        return finish(rec(std::move(rest), {eq}, values));
      }
    }
    if (system.size() > opt_.max_constraints)
      throw ResourceError("elimination exceeded " + std::to_string(opt_.max_constraints) + " constraints");
    if (system.empty()) return finish(true);

    // Choose the variable: exact projections first, then fewest pairs.
    struct Side {
      std::size_t up = 0, lo = 0;
      bool unit_up = true, unit_lo = true;
    };
    std::map<int, Side> sides;
    for (const auto& [a, c] : system)
      for (const auto& [v, k] : a) {
        Side& s = sides[v];
        if (k > 0) {
          ++s.up;
          s.unit_up = s.unit_up && k == 1;
        } else {
          ++s.lo;
          s.unit_lo = s.unit_lo && k == -1;
        }
      }
    int x = sides.begin()->first;
    bool exact = false;
    std::size_t best = SIZE_MAX;
    for (const auto& [v, s] : sides) {
      bool ex = s.up == 0 || s.lo == 0 || s.unit_up || s.unit_lo;
      std::size_t cost = s.up * s.lo;
      if ((ex && !exact) || (ex == exact && cost < best)) {
        x = v;
        exact = ex;
        best = cost;
      }
    }

    std::vector<Lin> rest, upper, lower;
    for (const auto& [a, c] : system) {
      Lin l{a, c};
      auto it = a.find(x);
      if (it == a.end())
        rest.push_back(l);
      else
        (it->second > 0 ? upper : lower).push_back(l);
    }
    auto shadow = [&](std::int64_t slack) {
      std::vector<Lin> out = rest;
      for (const auto& u : upper)
        for (const auto& l : lower) {
          std::int64_t a = u.a.at(x), b = -l.a.at(x);
          Lin r;
          for (const auto& [v, c] : u.a) r.a[v] = narrow(static_cast<__int128>(c) * b);
          for (const auto& [v, c] : l.a) r.a[v] = narrow(static_cast<__int128>(r.a[v]) + static_cast<__int128>(c) * a);
          r.a.erase(x);
          for (auto it = r.a.begin(); it != r.a.end();) it = it->second == 0 ? r.a.erase(it) : std::next(it);
          r.c = narrow(static_cast<__int128>(u.c) * b + static_cast<__int128>(l.c) * a +
                       (slack ? static_cast<__int128>(a - 1) * (b - 1) : 0));
          out.push_back(r);
        }
      return out;
    };
    // Integer value for x between its bounds, nearest to zero.
    auto place = [&]() {
      std::optional<std::int64_t> lo, hi;
      for (const auto& u : upper) {
        std::int64_t b = floor_div(-eval_rest(u, x, values), u.a.at(x));
        hi = hi ? std::min(*hi, b) : b;
      }
      for (const auto& l : lower) {
        std::int64_t b = ceil_div(eval_rest(l, x, values), -l.a.at(x));
        lo = lo ? std::max(*lo, b) : b;
      }
      if (lo && hi && *lo > *hi) throw InternalError("projection left no integer value");
      std::int64_t v = 0;
      if (lo && v < *lo) v = *lo;
      if (hi && v > *hi) v = *hi;
      values[x] = v;
    };

    if (exact) {
      if (!rec(shadow(0), {}, values)) return false;
      place();
      return finish(true);
    }
    {
      Values scratch;
      if (!rec(shadow(0), {}, scratch)) return false;
    }
    {
      Values dark;
      if (rec(shadow(1), {}, dark)) {
        values = std::move(dark);
        place();
        return finish(true);
      }
    }
    std::int64_t amax = 0;
    for (const auto& u : upper) amax = std::max(amax, u.a.at(x));
    std::vector<Lin> all = rest;
    all.insert(all.end(), upper.begin(), upper.end());
    all.insert(all.end(), lower.begin(), lower.end());
    for (const auto& l : lower) {
      std::int64_t b = -l.a.at(x);
      std::int64_t imax = floor_div(amax * b - amax - b, amax);
      for (std::int64_t i = 0; i <= imax; ++i) {
        Lin eq = l;
        eq.c += i;  // b x = lower bound + i
        Values v;
        if (rec(all, {eq}, v)) {
          values = std::move(v);
          return finish(true);
        }
      }
    }
    return false;
  }

  // Tightens and deduplicates; false when a constant constraint fails.
  static bool add_all(std::map<Coeffs, std::int64_t>& system, const std::vector<Lin>& ls) {
    for (auto l : ls) {
      if (l.a.empty()) {
        if (l.c > 0) return false;
        continue;
      }
      std::int64_t g = gcd_of(l.a);
      if (g > 1) {
        for (auto& [v, c] : l.a) c /= g;
        l.c = ceil_div(l.c, g);
      }
      auto [it, fresh] = system.emplace(l.a, l.c);
      if (!fresh) it->second = std::max(it->second, l.c);
    }
    // Opposite pairs a x + c1 <= 0 and -a x + c2 <= 0 need c1 + c2 <= 0.
    for (const auto& [a, c] : system) {
      Coeffs neg = a;
      for (auto& [v, k] : neg) k = -k;
      auto it = system.find(neg);
      if (it != system.end() && static_cast<__int128>(c) + it->second > 0) return false;
    }
    return true;
  }

  int next_var_;
  std::size_t nodes_ = 0;
  const SolverOptions& opt_;
};

// Negation normal form with only le/eq atoms under and/or.
Formula nnf(const Formula& f, bool negate) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::constant:
      return Formula::truth(f.value() != negate);
    case K::le:
      return negate ? Formula::lnot(f) : f;
    case K::eq:
      if (!negate) return f;
      return Formula::lor({Formula::le(f.term() + LinearTerm::constant(1)),
                           Formula::le(LinearTerm::constant(1) - f.term())});
    case K::negation:
      return nnf(f.children()[0], !negate);
    case K::conjunction:
    case K::disjunction: {
      std::vector<Formula> kids;
      for (const auto& c : f.children()) kids.push_back(nnf(c, negate));
      bool conj = (f.kind() == K::conjunction) != negate;
      return conj ? Formula::land(kids) : Formula::lor(kids);
    }
  }
  return f;
}

// Calls visit(cube) for each disjunct; stops when visit returns true.
bool each_cube(std::vector<Formula> pending, std::vector<Formula>& cube, std::size_t& budget,
               const std::function<bool(const std::vector<Formula>&)>& visit) {
  while (!pending.empty()) {
    Formula f = pending.back();
    pending.pop_back();
    switch (f.kind()) {
      case Formula::Kind::constant:
        if (!f.value()) return false;
        break;
      case Formula::Kind::conjunction:
        for (const auto& c : f.children()) pending.push_back(c);
        break;
      case Formula::Kind::disjunction: {
        std::size_t mark = cube.size();
        for (const auto& c : f.children()) {
          auto p = pending;
          p.push_back(c);
          if (each_cube(std::move(p), cube, budget, visit)) return true;
          cube.resize(mark);
        }
        return false;
      }
      default:
        cube.push_back(f);
    }
  }
  if (budget == 0) throw ResourceError("formula has too many disjuncts");
  --budget;
  return visit(cube);
}

class Lowering {
 public:
  int index(const Var& v) {
    auto [it, fresh] = ids_.emplace(v, static_cast<int>(names_.size()));
    if (fresh) names_.push_back(v);
    return it->second;
  }

  Lin lower(const LinearTerm& t) {
    Lin l;
    l.c = t.constant_part();
    for (const auto& [v, c] : t.vars()) l.a[index(v)] += c;
    for (const auto& [key, mc] : t.mods()) {
      int r = remainder(key, mc.first);
      l.a[r] = checked_add(l.a[r], mc.second);
    }
    for (auto it = l.a.begin(); it != l.a.end();) it = it->second == 0 ? l.a.erase(it) : std::next(it);
    return l;
  }

  std::vector<Lin> les, eqs;
  const std::vector<Var>& names() const { return names_; }

 private:
  // inner = k*q + r, 0 <= r < k
  int remainder(const std::string& key, const ModTerm& m) {
    auto it = mods_.find(key);
    if (it != mods_.end()) return it->second;
    Lin inner = lower(*m.inner);
    int q = index("%q" + std::to_string(mods_.size()));
    int r = index("%r" + std::to_string(mods_.size()));
    mods_.emplace(key, r);
    inner.a[q] = checked_add(inner.a[q], -m.k);
    inner.a[r] = checked_add(inner.a[r], -1);
    eqs.push_back(inner);
    les.push_back(Lin{{{r, -1}}, 0});
    les.push_back(Lin{{{r, 1}}, -(m.k - 1)});
    return r;
  }

  std::map<Var, int> ids_;
  std::vector<Var> names_;
  std::map<std::string, int> mods_;
};

std::string smt_term(const LinearTerm& t) {
  std::vector<std::string> parts;
  auto num = [](std::int64_t v) { return v < 0 ? "(- " + std::to_string(-v) + ")" : std::to_string(v); };
  for (const auto& [v, c] : t.vars()) parts.push_back("(* " + num(c) + " |" + v + "|)");
  for (const auto& [key, mc] : t.mods())
    parts.push_back("(* " + num(mc.second) + " (mod " + smt_term(*mc.first.inner) + " " + std::to_string(mc.first.k) +
                    "))");
  parts.push_back(num(t.constant_part()));
  if (parts.size() == 1) return parts[0];
  std::string s = "(+";
  for (const auto& p : parts) s += " " + p;
  return s + ")";
}

std::string smt_formula(const Formula& f) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::constant:
      return f.value() ? "true" : "false";
    case K::le:
      return "(<= " + smt_term(f.term()) + " 0)";
    case K::eq:
      return "(= " + smt_term(f.term()) + " 0)";
    case K::negation:
      return "(not " + smt_formula(f.children()[0]) + ")";
    case K::conjunction:
    case K::disjunction: {
      std::string s = f.kind() == K::conjunction ? "(and" : "(or";
      for (const auto& c : f.children()) s += " " + smt_formula(c);
      return s + ")";
    }
  }
  return "true";
}

}  // namespace

std::string to_smtlib(const Formula& f, const std::set<Var>& naturals) {
  std::ostringstream os;
  os << "(set-logic QF_LIA)\n";
  for (const auto& v : f.vars()) os << "(declare-fun |" << v << "| () Int)\n";
  for (const auto& v : f.vars())
    if (is_natural(v, naturals)) os << "(assert (>= |" << v << "| 0))\n";
  os << "; " << f.to_string() << "\n";
  os << "(assert " << smt_formula(f) << ")\n(check-sat)\n";
  return os.str();
}

SatResult Solver::check(const Formula& f, const std::set<Var>& naturals) {
  ++stats_.queries;
  auto fvars = f.vars();
  std::string key = f.to_string() + " |";
  for (const auto& v : fvars)
    if (is_natural(v, naturals)) key += " " + v;
  if (auto it = cache_.find(key); it != cache_.end()) {
    ++stats_.cache_hits;
    return it->second;
  }
  if (!options_.smt_dump_dir.empty()) {
    std::filesystem::create_directories(options_.smt_dump_dir);
    std::ofstream out(std::filesystem::path(options_.smt_dump_dir) / ("query_" + std::to_string(++dumped_) + ".smt2"));
    out << to_smtlib(f, naturals);
  }

  SatResult result;
  std::size_t budget = options_.max_cubes;
  std::vector<Formula> cube;
  each_cube({nnf(f, false)}, cube, budget, [&](const std::vector<Formula>& atoms) {
    Lowering low;
    for (const auto& v : fvars) low.index(v);
    for (const auto& a : atoms) {
      Lin l = low.lower(a.term());
      (a.kind() == Formula::Kind::eq ? low.eqs : low.les).push_back(l);
    }
    for (const auto& v : fvars)
      if (is_natural(v, naturals)) low.les.push_back(Lin{{{low.index(v), -1}}, 0});
    CubeSolver solver(static_cast<int>(low.names().size()), options_);
    auto values = solver.solve(low.les, low.eqs);
    if (!values) return false;
    result.sat = true;
    for (const auto& v : fvars) result.witness[v] = (*values)[static_cast<std::size_t>(low.index(v))];
    return true;
  });
  if (result.sat) {
    ++stats_.satisfiable;
    if (!f.eval(result.witness)) throw InternalError("solver witness does not satisfy " + f.to_string());
  }
  cache_.emplace(key, result);
  return result;
}

SatResult is_satisfiable(const Formula& f, const std::set<Var>& naturals) {
  Solver s;
  return s.check(f, naturals);
}

}  // namespace agv
