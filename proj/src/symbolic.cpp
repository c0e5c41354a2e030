#include "agv/symbolic.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>

namespace agv {

std::string Update::to_string() const {
  std::string s;
  for (const auto& [v, t] : assigns) s += (s.empty() ? "" : ", ") + v + " := " + t.to_string();
  for (const auto& v : havocs) s += (s.empty() ? "" : ", ") + std::string("havoc(") + v + ")";
  return s;
}

std::size_t SymbolicComponent::add_location(const std::string& loc, bool is_error) {
  if (find_location(loc)) throw InputError("duplicate location '" + loc + "'");
  locations.push_back(loc);
  error.push_back(is_error ? 1 : 0);
  return locations.size() - 1;
}

std::optional<std::size_t> SymbolicComponent::find_location(const std::string& loc) const {
  auto it = std::find(locations.begin(), locations.end(), loc);
  if (it == locations.end()) return std::nullopt;
  return static_cast<std::size_t>(it - locations.begin());
}

std::size_t SymbolicComponent::location(const std::string& loc) {
  if (auto l = find_location(loc)) return *l;
  return add_location(loc);
}

std::size_t SymbolicComponent::add_edge(Edge e) {
  edges.push_back(std::move(e));
  return edges.size() - 1;
}

bool SymbolicComponent::has_error_locations() const {
  return std::any_of(error.begin(), error.end(), [](char e) { return e != 0; });
}

std::set<Var> SymbolicComponent::naturals() const {
  std::set<Var> out;
  for (const auto& v : vars)
    if (v.natural) out.insert(v.name);
  return out;
}

std::set<Var> SymbolicComponent::variables() const {
  std::set<Var> out;
  for (const auto& v : vars) out.insert(v.name);
  return out;
}

Valuation SymbolicComponent::initial_valuation() const {
  Valuation v;
  for (const auto& d : vars) v[d.name] = d.init;
  return v;
}

void SymbolicComponent::validate() const {
  auto where = [&](std::size_t i) { return "component '" + name + "', edge " + std::to_string(i + 1) + ": "; };
  if (locations.empty()) throw InputError("component '" + name + "' has no locations");
  if (initial >= locations.size()) throw InputError("component '" + name + "': bad initial location");
  if (error.size() != locations.size()) throw InputError("component '" + name + "': error flags out of sync");
  if (alphabet.count(tau)) throw InputError("component '" + name + "': tau cannot be in an alphabet");
  std::set<Var> declared;
  for (const auto& d : vars) {
    if (!declared.insert(d.name).second) throw InputError("component '" + name + "': duplicate variable " + d.name);
    if (d.natural && d.init < 0)
      throw InputError("component '" + name + "': natural variable " + d.name + " starts negative");
  }
  auto check_vars = [&](const std::set<Var>& used, std::size_t i) {
    for (const auto& v : used)
      if (!declared.count(v)) throw InputError(where(i) + "undeclared variable " + v);
  };
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    if (e.from >= locations.size() || e.to >= locations.size()) throw InputError(where(i) + "bad location");
    if (!is_tau(e.label) && !alphabet.count(e.label))
      throw InputError(where(i) + "action '" + e.label + "' not in alphabet");
    check_vars(e.guard.vars(), i);
    std::set<Var> written;
    for (const auto& [v, t] : e.update.assigns) {
      std::set<Var> used{v};
      t.collect_vars(used);
      check_vars(used, i);
      if (!written.insert(v).second) throw InputError(where(i) + v + " updated twice");
    }
    for (const auto& v : e.update.havocs) {
      check_vars({v}, i);
      if (!written.insert(v).second) throw InputError(where(i) + v + " updated twice");
    }
  }
}

SymbolicComponent SymbolicComponent::from_csm(const Csm& m, std::string name) {
  SymbolicComponent c;
  c.name = std::move(name);
  c.alphabet = m.alphabet();
  for (StateId s = 0; s < m.size(); ++s) {
    c.locations.push_back(m.name(s).empty() ? "s" + std::to_string(s) : m.name(s));
    c.error.push_back(m.is_error(s) ? 1 : 0);
  }
  c.initial = m.initial();
  for (const auto& t : m.transitions()) c.edges.push_back(Edge{t.from, t.label, Formula(), {}, t.to});
  return c;
}

bool operator==(const SymbolicComponent& a, const SymbolicComponent& b) {
  if (a.name != b.name || a.alphabet != b.alphabet || a.locations != b.locations || a.error != b.error ||
      a.initial != b.initial || a.vars.size() != b.vars.size() || a.edges.size() != b.edges.size())
    return false;
  for (std::size_t i = 0; i < a.vars.size(); ++i)
    if (a.vars[i].name != b.vars[i].name || a.vars[i].natural != b.vars[i].natural || a.vars[i].init != b.vars[i].init)
      return false;
  for (std::size_t i = 0; i < a.edges.size(); ++i) {
    const Edge& x = a.edges[i];
    const Edge& y = b.edges[i];
    if (x.from != y.from || x.to != y.to || x.label != y.label || !(x.guard == y.guard) ||
        x.update.to_string() != y.update.to_string())
      return false;
  }
  return true;
}

bool is_observationally_deterministic(const SymbolicComponent& c, Solver& solver) {
  auto nat = c.naturals();
  for (std::size_t i = 0; i < c.edges.size(); ++i) {
    const Edge& e = c.edges[i];
    if (is_tau(e.label) || !e.update.havocs.empty()) return false;
    for (std::size_t j = i + 1; j < c.edges.size(); ++j) {
      const Edge& f = c.edges[j];
      if (f.from == e.from && f.label == e.label && solver.satisfiable(Formula::land({e.guard, f.guard}), nat))
        return false;
    }
  }
  return true;
}

std::size_t add_predicates(PredicateSet& preds, const std::vector<Formula>& more) {
  std::size_t added = 0;
  for (const auto& f : more) {
    if (f.kind() == Formula::Kind::constant) continue;
    if (std::find(preds.begin(), preds.end(), f) != preds.end()) continue;
    preds.push_back(f);
    ++added;
  }
  return added;
}

PredicateSet guard_predicates(const SymbolicComponent& c) {
  PredicateSet out;
  for (const auto& e : c.edges)
    for (const auto& a : e.guard.atoms()) add_predicates(out, {a, Formula::lnot(a)});
  return out;
}

Formula valuation_formula(const PredicateSet& preds, std::uint32_t mask) {
  std::vector<Formula> lits;
  for (std::size_t i = 0; i < preds.size(); ++i)
    lits.push_back(mask >> i & 1u ? preds[i] : Formula::lnot(preds[i]));
  return Formula::land(lits);
}

namespace {

bool is_fresh(const Var& v) { return v.find('#') != std::string::npos; }

bool mentions_fresh(const Formula& f) {
  auto vs = f.vars();
  return std::any_of(vs.begin(), vs.end(), is_fresh);
}

bool only_fresh(const Formula& f) {
  auto vs = f.vars();
  return std::all_of(vs.begin(), vs.end(), is_fresh);
}

// Substitution for an update; havocked variables become `v#<tag>`.
std::map<Var, LinearTerm> update_map(const Update& u, const std::string& tag) {
  std::map<Var, LinearTerm> s;
  for (const auto& [v, t] : u.assigns) s[v] = t;
  for (const auto& v : u.havocs) s[v] = LinearTerm::variable(v + "#" + tag);
  return s;
}

std::string state_name(const SymbolicComponent& c, std::size_t loc, const PredicateSet& preds,
                       std::uint32_t mask) {
  std::string s = c.locations[loc];
  if (preds.empty()) return s;
  std::string inner;
  for (std::size_t i = 0; i < preds.size(); ++i)
    if (mask >> i & 1u) inner += (inner.empty() ? "" : ", ") + preds[i].to_string();
  return s + "{" + inner + "}";
}

void check_preds(const SymbolicComponent& c, const PredicateSet& preds) {
  if (preds.size() > max_predicates)
    throw ResourceError("component '" + c.name + "': " + std::to_string(preds.size()) +
                        " predicates exceed the limit of " + std::to_string(max_predicates));
  auto declared = c.variables();
  for (const auto& p : preds)
    for (const auto& v : p.vars())
      if (!declared.count(v))
        throw InputError("predicate '" + p.to_string() + "' uses undeclared variable " + v);
}

std::uint32_t initial_mask(const SymbolicComponent& c, const PredicateSet& preds) {
  Valuation init = c.initial_valuation();
  std::uint32_t m = 0;
  for (std::size_t i = 0; i < preds.size(); ++i)
    if (preds[i].eval(init)) m |= 1u << i;
  return m;
}

// Target valuations v' with base ∧ post(v') satisfiable, where post[i] is
// predicate i after the update. Partial assignments are pruned early.
std::vector<std::uint32_t> targets(const Formula& base, const std::vector<Formula>& post,
                                   const std::set<Var>& nat, Solver& solver) {
  std::vector<std::uint32_t> out;
  std::vector<Formula> conj{base};
  std::function<void(std::size_t, std::uint32_t)> go = [&](std::size_t i, std::uint32_t mask) {
    if (i == post.size()) {
      out.push_back(mask);
      return;
    }
    for (int bit = 1; bit >= 0; --bit) {
      conj.push_back(bit ? post[i] : Formula::lnot(post[i]));
      if (solver.satisfiable(Formula::land(conj), nat)) go(i + 1, bit ? mask | 1u << i : mask);
      conj.pop_back();
    }
  };
  if (solver.satisfiable(base, nat)) go(0, 0);
  return out;
}

struct Builder {
  const SymbolicComponent& c;
  const PredicateSet& preds;
  Abstraction a;
  std::map<std::pair<std::size_t, std::uint32_t>, StateId> ids;
  std::deque<StateId> work;

  Builder(const SymbolicComponent& comp, const PredicateSet& p) : c(comp), preds(p) {
    a.csm = Csm(c.alphabet);
    a.preds = preds;
  }

  StateId get(std::size_t loc, std::uint32_t mask) {
    auto [it, fresh] = ids.emplace(std::make_pair(loc, mask), 0);
    if (fresh) {
      it->second = a.csm.add_state(state_name(c, loc, preds, mask), c.is_error(loc));
      a.location.push_back(loc);
      a.mask.push_back(mask);
      work.push_back(it->second);
    }
    return it->second;
  }
};

template <class EdgeFn>
Abstraction build(const SymbolicComponent& c, const PredicateSet& preds, EdgeFn edge_targets) {
  c.validate();
  check_preds(c, preds);
  Builder b(c, preds);
  b.a.csm.set_initial(b.get(c.initial, initial_mask(c, preds)));
  while (!b.work.empty()) {
    StateId s = b.work.front();
    b.work.pop_front();
    std::size_t loc = b.a.location[s];
    if (c.is_error(loc)) continue;  // error locations are absorbing
    for (std::size_t i = 0; i < c.edges.size(); ++i) {
      const Edge& e = c.edges[i];
      if (e.from != loc) continue;
      for (std::uint32_t m : edge_targets(e, b.a.mask[s]))
        b.a.csm.add_transition(s, e.label, b.get(e.to, m), static_cast<int>(i));
    }
  }
  return std::move(b.a);
}

std::vector<Formula> post_preds(const PredicateSet& preds, const Update& u) {
  auto s = update_map(u, "h");
  std::vector<Formula> post;
  for (const auto& p : preds) post.push_back(p.substitute(s));
  return post;
}

}  // namespace

Abstraction abstract_may(const SymbolicComponent& c, const PredicateSet& preds, Solver& solver) {
  auto nat = c.naturals();
  return build(c, preds, [&](const Edge& e, std::uint32_t mask) {
    Formula base = Formula::land({valuation_formula(preds, mask), e.guard});
    return targets(base, post_preds(preds, e.update), nat, solver);
  });
}

Abstraction abstract_must(const SymbolicComponent& c, const PredicateSet& preds, Solver& solver) {
  auto nat = c.naturals();
  return build(c, preds, [&](const Edge& e, std::uint32_t mask) {
    std::vector<std::uint32_t> out;
    Formula src = valuation_formula(preds, mask);
    if (!solver.valid(Formula::implies(src, e.guard), nat)) return out;
    auto post = post_preds(preds, e.update);
    // Havoc witness that keeps the old value, used when a target predicate
    // ties fresh and current variables together.
    std::map<Var, LinearTerm> same;
    for (const auto& v : e.update.havocs) same[v + "#h"] = LinearTerm::variable(v);
    for (std::uint32_t m : targets(Formula::land({src, e.guard}), post, nat, solver)) {
      std::vector<Formula> det, fresh, mixed;
      for (std::size_t i = 0; i < post.size(); ++i) {
        Formula lit = m >> i & 1u ? post[i] : Formula::lnot(post[i]);
        if (!mentions_fresh(lit))
          det.push_back(lit);
        else if (only_fresh(lit))
          fresh.push_back(lit);
        else
          mixed.push_back(lit);
      }
      bool ok;
      if (mixed.empty()) {
        ok = solver.valid(Formula::implies(src, Formula::land(det)), nat) &&
             solver.satisfiable(Formula::land(fresh), nat);
      } else {
        std::vector<Formula> all = det;
        for (const auto& f : fresh) all.push_back(f.substitute(same));
        for (const auto& f : mixed) all.push_back(f.substitute(same));
        ok = solver.valid(Formula::implies(src, Formula::land(all)), nat);
      }
      if (ok) out.push_back(m);
    }
    return out;
  });
}

Formula wp(const Formula& f, const SymbolicComponent& c, const Edge& e, Solver& solver) {
  Formula post = f.substitute(update_map(e.update, "w"));
  if (mentions_fresh(post)) {
    // For all havoc values. Exact when only fresh variables remain.
    bool all = solver.valid(post, c.naturals());
    post = Formula::truth(all);
  }
  return Formula::lor({Formula::lnot(e.guard), post});
}

Formula wp_trace(const Formula& f, const SymbolicComponent& c, const std::vector<std::size_t>& path,
                 Solver& solver) {
  Formula r = f;
  for (auto it = path.rbegin(); it != path.rend(); ++it) r = wp(r, c, c.edges.at(*it), solver);
  return r;
}

SymbolicSim simulate_symbolic(const SymbolicComponent& c, const std::vector<std::size_t>& path, Solver& solver) {
  auto nat = c.naturals();
  std::map<Var, LinearTerm> env;
  for (const auto& d : c.vars) env[d.name] = LinearTerm::constant(d.init);
  std::vector<std::map<Var, LinearTerm>> envs{env};
  std::vector<Var> fresh_vars;
  std::vector<Formula> constraints;
  std::size_t loc = c.initial;
  SymbolicSim r;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (path[i] >= c.edges.size())
      throw InputError("edge " + std::to_string(path[i]) + " is not an edge of '" + c.name + "'");
    const Edge& e = c.edges[path[i]];
    if (e.from != loc)
      throw InputError("path step " + std::to_string(i + 1) + " of '" + c.name + "' does not start at " +
                       c.locations[loc]);
    constraints.push_back(e.guard.substitute(env));
    if (!solver.satisfiable(Formula::land(constraints), nat)) {
      r.feasible = false;
      r.prefix = i + 1;
      return r;
    }
    std::map<Var, LinearTerm> next = env;
    for (const auto& [v, t] : e.update.assigns) next[v] = t.substitute(env);
    for (const auto& v : e.update.havocs) {
      Var f = v + "#" + std::to_string(fresh_vars.size() + 1);
      fresh_vars.push_back(f);
      next[v] = LinearTerm::variable(f);
    }
    env = std::move(next);
    envs.push_back(env);
    loc = e.to;
  }
  auto w = solver.check(Formula::land(constraints), nat);
  if (!w.sat) throw InternalError("feasible path lost its witness");
  for (const auto& f : fresh_vars) {
    auto it = w.witness.find(f);
    r.havoc_values.push_back(it == w.witness.end() ? 0 : it->second);
  }
  Valuation fv;
  for (std::size_t i = 0; i < fresh_vars.size(); ++i) fv[fresh_vars[i]] = r.havoc_values[i];
  for (const auto& en : envs) {
    Valuation v;
    for (const auto& [x, t] : en) v[x] = t.eval(fv);
    r.valuations.push_back(std::move(v));
  }
  return r;
}

std::vector<std::size_t> edge_path(const Counterexample& cex, std::size_t component, const Csm& part) {
  std::vector<std::size_t> out;
  for (std::size_t t : cex.component_path(component)) {
    int origin = part.transition(t).origin;
    if (origin < 0) throw InputError("transition without a symbolic edge in counterexample path");
    out.push_back(static_cast<std::size_t>(origin));
  }
  return out;
}

PredicateSet refine(const SymbolicComponent& c, const PredicateSet& preds, const std::vector<std::size_t>& path,
                    std::size_t infeasible_prefix, Solver& solver) {
  if (infeasible_prefix == 0 || infeasible_prefix > path.size())
    throw InputError("refine needs the length of an infeasible prefix");
  auto nat = c.naturals();
  std::vector<Formula> harvested;
  auto harvest = [&](const Formula& f) {
    for (const auto& a : f.atoms()) {
      if (mentions_fresh(a)) continue;
      if (!solver.satisfiable(a, nat) || solver.valid(a, nat)) continue;
      harvested.push_back(a);
      harvested.push_back(Formula::lnot(a));
    }
  };
  // Pull the failing guard back through the prefix: pre(f, e) = g ∧ ∃h. f[e].
  std::size_t j = infeasible_prefix - 1;
  Formula f = c.edges.at(path[j]).guard;
  harvest(f);
  for (std::size_t i = j; i-- > 0;) {
    const Edge& e = c.edges.at(path[i]);
    Formula post = f.substitute(update_map(e.update, "r"));
    if (mentions_fresh(post)) post = only_fresh(post) ? Formula::truth(solver.satisfiable(post, nat)) : Formula();
    f = Formula::land({e.guard, post});
    if (!solver.satisfiable(f, nat)) break;
    harvest(f);
  }
  PredicateSet out = preds;
  if (add_predicates(out, harvested) == 0)
    throw InternalError("refinement found no new predicate for an infeasible path of '" + c.name + "'");
  return out;
}

namespace {

struct Concrete {
  std::size_t loc;
  std::vector<std::int64_t> vals;
  auto operator<=>(const Concrete&) const = default;
};

}  // namespace

BoundedExploration explore_bounded(const SymbolicComponent& c, std::size_t depth, std::int64_t havoc_bound,
                                   std::size_t max_tau_steps) {
  c.validate();
  std::vector<Var> names;
  std::map<Var, std::size_t> index;
  for (const auto& d : c.vars) {
    index[d.name] = names.size();
    names.push_back(d.name);
  }
  auto valuation = [&](const Concrete& s) {
    Valuation v;
    for (std::size_t i = 0; i < names.size(); ++i) v[names[i]] = s.vals[i];
    return v;
  };
  // Successors of s over one edge, havocs ranging over [0, havoc_bound].
  auto successors = [&](const Concrete& s, const Edge& e, std::vector<Concrete>& out) {
    Valuation v = valuation(s);
    if (!e.guard.eval(v)) return;
    Concrete base{e.to, s.vals};
    for (const auto& [x, t] : e.update.assigns) base.vals[index.at(x)] = t.eval(v);
    std::vector<Concrete> acc{base};
    for (const auto& h : e.update.havocs) {
      std::vector<Concrete> next;
      for (const auto& a : acc)
        for (std::int64_t k = 0; k <= havoc_bound; ++k) {
          Concrete b = a;
          b.vals[index.at(h)] = k;
          next.push_back(std::move(b));
        }
      acc = std::move(next);
    }
    out.insert(out.end(), acc.begin(), acc.end());
  };
  auto closure = [&](std::set<Concrete> states) {
    std::vector<Concrete> work(states.begin(), states.end());
    while (!work.empty()) {
      Concrete s = work.back();
      work.pop_back();
      if (c.is_error(s.loc)) continue;
      for (const auto& e : c.edges) {
        if (e.from != s.loc || !is_tau(e.label)) continue;
        std::vector<Concrete> next;
        successors(s, e, next);
        for (auto& n : next)
          if (states.insert(n).second) {
            if (states.size() > max_tau_steps)
              throw ResourceError("tau closure of '" + c.name + "' exceeds " + std::to_string(max_tau_steps) +
                                  " states");
            work.push_back(std::move(n));
          }
      }
    }
    return states;
  };

  BoundedExploration r;
  Concrete init{c.initial, {}};
  for (const auto& d : c.vars) init.vals.push_back(d.init);
  std::map<Trace, std::set<Concrete>> level{{Trace{}, closure({init})}};
  for (std::size_t d = 0;; ++d) {
    std::map<Trace, std::set<Concrete>> next;
    for (const auto& [t, states] : level) {
      r.traces.insert(t);
      for (const auto& s : states)
        if (c.is_error(s.loc)) r.error_traces.insert(t);
      if (d == depth) continue;
      for (const auto& s : states) {
        if (c.is_error(s.loc)) continue;
        for (const auto& e : c.edges) {
          if (e.from != s.loc || is_tau(e.label)) continue;
          std::vector<Concrete> succ;
          successors(s, e, succ);
          if (succ.empty()) continue;
          Trace u = t;
          u.push_back(e.label);
          next[u].insert(succ.begin(), succ.end());
        }
      }
    }
    if (d == depth || next.empty()) break;
    level.clear();
    for (auto& [t, states] : next) level[t] = closure(std::move(states));
  }
  return r;
}

std::set<Trace> bounded_language(const SymbolicComponent& c, std::size_t depth, std::int64_t havoc_bound) {
  return explore_bounded(c, depth, havoc_bound).traces;
}

}  // namespace agv
