#include "agv/interface_gen.hpp"

#include <algorithm>
#include <deque>

namespace agv {

void validate(const IfaceTask& task) {
  task.c.validate();
  if (task.sigma.count(tau)) throw InputError("interface alphabet contains tau");
  if (!subset_of(task.sigma, task.c.alphabet)) {
    Alphabet extra;
    for (const auto& a : task.sigma)
      if (!task.c.alphabet.count(a)) extra.insert(a);
    throw InputError("interface actions " + to_string(extra) + " are not actions of " + task.c.name);
  }
  if (task.c.is_error(task.c.initial)) throw InputError("initial location of " + task.c.name + " is an error location");
  for (const auto& e : task.c.edges)
    if (task.c.is_error(e.from))
      throw InputError("error location '" + task.c.locations[e.from] + "' has outgoing edges");
}

namespace {

template <class Parts>
Verdict search(const Parts& parts) {
  std::vector<const Csm*> v(parts.begin(), parts.end());
  return find_error(std::span<const Csm* const>(v));
}

PredicateSet difference(const PredicateSet& now, const PredicateSet& before) {
  PredicateSet out;
  for (const auto& f : now)
    if (std::find(before.begin(), before.end(), f) == before.end()) out.push_back(f);
  return out;
}

// Complete automaton as a machine, all states ordinary.
Csm full_csm(const Dfa& a) {
  Csm m(a.alphabet());
  for (StateId s = 0; s < a.size(); ++s) m.add_state("q" + std::to_string(s));
  for (StateId s = 0; s < a.size(); ++s)
    for (std::size_t i = 0; i < a.actions().size(); ++i) m.add_transition(s, a.actions()[i], a.next(s, i));
  m.set_initial(a.initial());
  return m;
}

// Shortest word from each state to an accepting state.
std::vector<std::optional<Trace>> to_accepting(const Dfa& a) {
  std::vector<std::optional<Trace>> out(a.size());
  std::deque<StateId> queue;
  for (StateId s = 0; s < a.size(); ++s)
    if (a.is_accepting(s)) {
      out[s] = Trace{};
      queue.push_back(s);
    }
  // Backward BFS one layer at a time over the reversed transition relation.
  while (!queue.empty()) {
    StateId t = queue.front();
    queue.pop_front();
    for (StateId s = 0; s < a.size(); ++s) {
      if (out[s]) continue;
      for (std::size_t i = 0; i < a.actions().size(); ++i)
        if (a.next(s, i) == t) {
          Trace w{a.actions()[i]};
          w.insert(w.end(), out[t]->begin(), out[t]->end());
          out[s] = w;
          queue.push_back(s);
          break;
        }
    }
  }
  return out;
}

// Shortest word w with target(run_a(w), run_d(w)) over two complete automata
// on the same alphabet; pairs failing expand are not left.
template <class Target, class Expand>
std::optional<Trace> pair_search(const Dfa& a, const Dfa& d, Target target, Expand expand) {
  std::map<std::pair<StateId, StateId>, std::pair<std::pair<StateId, StateId>, std::size_t>> parent;
  std::deque<std::pair<StateId, StateId>> queue;
  auto start = std::make_pair(a.initial(), d.initial());
  parent[start] = {start, 0};
  queue.push_back(start);
  const auto& acts = a.actions();
  while (!queue.empty()) {
    auto cur = queue.front();
    queue.pop_front();
    if (target(cur.first, cur.second)) {
      Trace w;
      for (auto p = cur; p != start; p = parent[p].first) w.push_back(acts[parent[p].second]);
      std::reverse(w.begin(), w.end());
      return w;
    }
    if (!expand(cur.first, cur.second)) continue;
    for (std::size_t i = 0; i < acts.size(); ++i) {
      auto next = std::make_pair(a.next(cur.first, i), d.next(cur.second, *d.action_index(acts[i])));
      if (parent.emplace(next, std::make_pair(cur, i)).second) queue.push_back(next);
    }
  }
  return std::nullopt;
}

}  // namespace

IfaceSession::IfaceSession(const IfaceTask& task, const IfaceOptions& options, IfaceResult& out)
    : task_(task), options_(options), out_(out), solver_(options.solver), preds_(task.preds) {}

const Abstraction& IfaceSession::may() {
  if (!may_) may_ = abstract_may(task_.c, preds_, solver_);
  return *may_;
}

void IfaceSession::refine_may(const std::string& phase, const Trace& t, const std::vector<std::size_t>& path,
                              std::size_t at) {
  PredicateSet next = refine(task_.c, preds_, path, at, solver_);
  out_.refinements.push_back({1, phase, t, at, difference(next, preds_)});
  preds_ = std::move(next);
  may_.reset();
}

// The must abstraction missed an error run. Harvest wp atoms along the
// feasible path, last guard first.
void IfaceSession::refine_must(const Trace& t, const std::vector<std::size_t>& error_path) {
  for (std::size_t k = error_path.size(); k > 0; --k) {
    try {
      PredicateSet next = refine(task_.c, preds_, error_path, k, solver_);
      out_.refinements.push_back({1, "must", t, k, difference(next, preds_)});
      preds_ = std::move(next);
      may_.reset();
      return;
    } catch (const InternalError&) {
    }
  }
  throw ResourceError("must abstraction of " + task_.c.name + " cannot be refined for " + to_string(t));
}

std::optional<std::vector<std::size_t>> IfaceSession::error_path(const Trace& s, const std::string& phase) {
  Csm tc = trace_csm(s, task_.sigma);
  for (std::size_t round = 0;; ++round) {
    const Abstraction& m = may();
    auto v = search(std::vector<const Csm*>{&tc, &m.csm});
    if (v.safe()) return std::nullopt;
    auto path = edge_path(*v.cex, 1, m.csm);
    auto sim = simulate_symbolic(task_.c, path, solver_);
    if (sim.feasible) return path;
    if (round >= options_.max_refinements)
      throw ResourceError("error search for " + to_string(s) + " needed more than " +
                          std::to_string(options_.max_refinements) + " refinements");
    refine_may(phase, v.cex->trace, path, sim.prefix);
  }
}

bool IfaceSession::membership(const Trace& s) {
  ++out_.membership_queries;
  if (error_path(s)) return false;
  Csm tc = trace_csm(s, task_.sigma);
  auto end = static_cast<StateId>(s.size());
  for (std::size_t round = 0;; ++round) {
    const Abstraction& m = may();
    std::vector<const Csm*> parts{&tc, &m.csm};
    auto v = find_reachable(std::span<const Csm* const>(parts),
                            [end](std::span<const StateId> st) { return st[0] == end; });
    if (!v.cex) return false;
    auto path = edge_path(*v.cex, 1, m.csm);
    auto sim = simulate_symbolic(task_.c, path, solver_);
    if (sim.feasible) return true;
    if (round >= options_.max_refinements)
      throw ResourceError("membership query " + to_string(s) + " needed more than " +
                          std::to_string(options_.max_refinements) + " refinements");
    refine_may("membership", v.cex->trace, path, sim.prefix);
  }
}

std::optional<Trace> IfaceSession::safety_check(const Dfa& a) {
  // a need not be prefix closed: an error run along any prefix of an accepted
  // string counts, so the search ends in states that can still accept.
  Csm am = full_csm(a);
  auto finish = to_accepting(a);
  for (std::size_t round = 0;; ++round) {
    const Abstraction& m = may();
    std::vector<const Csm*> parts{&am, &m.csm};
    auto v = find_reachable(std::span<const Csm* const>(parts), [&](std::span<const StateId> st) {
      return m.csm.is_error(st[1]) && finish[st[0]].has_value();
    });
    if (!v.cex) return std::nullopt;
    auto path = edge_path(*v.cex, 1, m.csm);
    auto sim = simulate_symbolic(task_.c, path, solver_);
    if (sim.feasible) {
      Trace w = project_trace(v.cex->trace, task_.sigma);
      const Trace& rest = *finish[v.cex->states.back()[0]];
      w.insert(w.end(), rest.begin(), rest.end());
      return w;
    }
    if (round >= options_.max_refinements)
      throw ResourceError("safety check needed more than " + std::to_string(options_.max_refinements) +
                          " refinements");
    refine_may("safety", v.cex->trace, path, sim.prefix);
  }
}

std::optional<Trace> IfaceSession::executable_check(const Dfa& a) {
  Dfa d = determinize(project_csm(may().csm, task_.sigma), options_.max_subset_states);
  return pair_search(
      a, d, [&](StateId p, StateId q) { return a.is_accepting(p) && !d.is_accepting(q); },
      [](StateId, StateId) { return true; });
}

std::optional<Trace> IfaceSession::permissiveness_check(const Dfa& a) {
  for (std::size_t round = 0;; ++round) {
    Abstraction must = abstract_must(task_.c, preds_, solver_);
    Csm pm = project_csm(must.csm, task_.sigma);
    Dfa d;
    if (pm.is_deterministic()) {
      d = Dfa::from_csm(pm);
    } else {
      d = determinize(pm, options_.max_subset_states);
      out_.determinized = true;
    }
    // A subset holding an error state means the string may fail; nothing
    // past it has to be accepted.
    auto c = pair_search(
        a, d, [&](StateId p, StateId q) { return d.is_accepting(q) && !d.is_error(q) && !a.is_accepting(p); },
        [&](StateId, StateId q) { return d.is_accepting(q) && !d.is_error(q); });
    if (!c) return std::nullopt;
    auto bad = error_path(*c, "must");
    if (!bad) return c;
    if (round >= options_.max_refinements)
      throw ResourceError("permissiveness check needed more than " + std::to_string(options_.max_refinements) +
                          " refinements");
    refine_must(*c, *bad);
  }
}

namespace {

class IfaceTeacher final : public Teacher {
 public:
  IfaceTeacher(IfaceSession& s, IfaceResult& out) : s_(s), out_(out) {}

  bool membership(const Trace& w) override { return s_.membership(w); }

  std::optional<Trace> equivalence(const Dfa& a) override {
    IfaceIteration it;
    it.conjecture = out_.log.size() + 1;
    it.states = assumption_states(a);
    auto c = s_.safety_check(a);
    if (c) {
      it.check = "safety";
    } else if ((c = s_.executable_check(a))) {
      it.check = "executable";
    } else if ((c = s_.permissiveness_check(a))) {
      it.check = "permissive";
    }
    it.cex = c;
    out_.log.push_back(it);
    return c;
  }

 private:
  IfaceSession& s_;
  IfaceResult& out_;
};

Dfa accept_all(const Alphabet& sigma) {
  Dfa d(sigma, 1);
  d.set_accepting(0);
  for (std::size_t a = 0; a < sigma.size(); ++a) d.set_next(0, a, 0);
  return d;
}

}  // namespace

IfaceResult gen_interface(const IfaceTask& task, const IfaceOptions& options) {
  validate(task);
  IfaceResult r;
  r.preds = task.preds;
  if (!task.c.has_error_locations()) {
    r.status = IfaceResult::Status::ok;
    r.interface = accept_all(task.sigma);
    r.warning = task.c.name + " has no error locations; every environment is safe";
    return r;
  }
  IfaceSession session(task, options, r);
  try {
    IfaceTeacher teacher(session, r);
    Learner learner(teacher, task.sigma, LearnOptions{options.max_conjectures, options.learn_log});
    r.interface = learner.run();
    r.stats = learner.stats();
    r.status = IfaceResult::Status::ok;
  } catch (const ResourceError& e) {
    r.status = IfaceResult::Status::resource;
    r.reason = std::string(e.what()) + " (predicates: " + std::to_string(session.preds().size()) +
               "; conjectures so far: " + std::to_string(r.log.size()) + ")";
  }
  r.preds = session.preds();
  return r;
}

}  // namespace agv
