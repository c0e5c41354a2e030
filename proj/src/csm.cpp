#include "agv/csm.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>
#include <unordered_map>

namespace agv {

Alphabet unite(const Alphabet& a, const Alphabet& b) {
  Alphabet r = a;
  r.insert(b.begin(), b.end());
  return r;
}

Alphabet intersect(const Alphabet& a, const Alphabet& b) {
  Alphabet r;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(r, r.end()));
  return r;
}

bool subset_of(const Alphabet& a, const Alphabet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::string to_string(const Trace& t) {
  std::string s = "<";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += ", ";
    s += t[i];
  }
  return s + ">";
}

std::string to_string(const Alphabet& a) {
  std::string s = "{";
  bool first = true;
  for (const auto& x : a) {
    if (!first) s += ", ";
    s += x;
    first = false;
  }
  return s + "}";
}

// ---------------------------------------------------------------------------
// Csm

Csm::Csm(Alphabet alphabet) : alphabet_(std::move(alphabet)) {
  if (alphabet_.count(tau)) throw InputError("tau cannot be part of an alphabet");
}

StateId Csm::add_state(std::string name, bool error) {
  auto id = static_cast<StateId>(names_.size());
  if (name.empty()) name = "s" + std::to_string(id);
  names_.push_back(std::move(name));
  error_.push_back(error ? 1 : 0);
  out_.emplace_back();
  return id;
}

void Csm::check_state(StateId s) const {
  if (s >= names_.size()) throw InputError("state id " + std::to_string(s) + " out of range");
}

void Csm::add_transition(StateId from, const Action& label, StateId to, int origin) {
  check_state(from);
  check_state(to);
  if (!is_tau(label) && !alphabet_.count(label))
    throw InputError("action '" + label + "' is not in the alphabet " + agv::to_string(alphabet_));
  out_[from].push_back(transitions_.size());
  transitions_.push_back(Transition{from, label, to, origin});
}

void Csm::set_initial(StateId s) {
  check_state(s);
  initial_ = s;
}

void Csm::set_error(StateId s, bool error) {
  check_state(s);
  error_[s] = error ? 1 : 0;
}

void Csm::set_name(StateId s, std::string name) {
  check_state(s);
  names_[s] = std::move(name);
}

bool Csm::has_error_states() const {
  return std::any_of(error_.begin(), error_.end(), [](char c) { return c != 0; });
}

std::optional<StateId> Csm::find_state(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<StateId>(i);
  return std::nullopt;
}

bool Csm::is_deterministic() const {
  for (StateId s = 0; s < size(); ++s) {
    std::map<Action, StateId> seen;
    for (auto ti : out_[s]) {
      const auto& t = transitions_[ti];
      if (is_tau(t.label)) return false;
      auto [it, fresh] = seen.emplace(t.label, t.to);
      if (!fresh && it->second != t.to) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Dfa

Dfa::Dfa(const Alphabet& alphabet, std::size_t states)
    : actions_(alphabet.begin(), alphabet.end()),
      delta_(states * alphabet.size(), none),
      accepting_(states, 0),
      error_(states, 0) {
  if (alphabet.count(tau)) throw InputError("tau cannot be part of an alphabet");
}

std::optional<std::size_t> Dfa::action_index(const Action& a) const {
  auto it = std::lower_bound(actions_.begin(), actions_.end(), a);
  if (it == actions_.end() || *it != a) return std::nullopt;
  return static_cast<std::size_t>(it - actions_.begin());
}

StateId Dfa::next(StateId s, const Action& a) const {
  auto i = action_index(a);
  if (!i) throw InputError("action '" + a + "' is not in the automaton alphabet");
  return next(s, *i);
}

void Dfa::set_next(StateId s, const Action& a, StateId t) {
  auto i = action_index(a);
  if (!i) throw InputError("action '" + a + "' is not in the automaton alphabet");
  set_next(s, *i, t);
}

StateId Dfa::run(const Trace& t) const {
  StateId s = initial_;
  for (const auto& a : t) s = next(s, a);
  return s;
}

std::size_t Dfa::accepting_count() const {
  return static_cast<std::size_t>(std::count(accepting_.begin(), accepting_.end(), 1));
}

bool Dfa::is_complete() const {
  return std::none_of(delta_.begin(), delta_.end(), [](StateId s) { return s == none; });
}

Dfa Dfa::from_csm(const Csm& m) {
  for (StateId s = 0; s < m.size(); ++s) {
    std::map<Action, StateId> seen;
    for (auto ti : m.outgoing(s)) {
      const auto& t = m.transition(ti);
      if (is_tau(t.label))
        throw InputError("automaton is nondeterministic: tau transition from state '" + m.name(s) + "'");
      auto [it, fresh] = seen.emplace(t.label, t.to);
      if (!fresh && it->second != t.to)
        throw InputError("automaton is nondeterministic: state '" + m.name(s) + "' has two '" +
                         t.label + "' successors");
    }
  }
  std::size_t k = m.alphabet().size();
  bool needs_sink = false;
  for (StateId s = 0; s < m.size(); ++s) {
    std::set<Action> labels;
    for (auto ti : m.outgoing(s)) labels.insert(m.transition(ti).label);
    if (labels.size() < k) needs_sink = true;
  }
  Dfa d(m.alphabet(), m.size() + (needs_sink ? 1 : 0));
  for (StateId s = 0; s < m.size(); ++s) {
    d.set_accepting(s);
    d.set_error(s, m.is_error(s));
    for (auto ti : m.outgoing(s)) d.set_next(s, m.transition(ti).label, m.transition(ti).to);
  }
  if (needs_sink) {
    auto sink = static_cast<StateId>(m.size());
    for (StateId s = 0; s < d.size(); ++s)
      for (std::size_t a = 0; a < k; ++a)
        if (d.next(s, a) == none) d.set_next(s, a, sink);
  }
  d.set_initial(m.initial());
  return d;
}

Csm Dfa::to_csm() const {
  Csm m(alphabet());
  for (StateId s = 0; s < size(); ++s) m.add_state("q" + std::to_string(s), is_error(s));
  for (StateId s = 0; s < size(); ++s)
    for (std::size_t a = 0; a < actions_.size(); ++a)
      if (next(s, a) != none) m.add_transition(s, actions_[a], next(s, a));
  m.set_initial(initial_);
  return m;
}

namespace {

// States retained when a Dfa is read as a trace set: accepting states plus the
// initial state, since every trace set contains the empty trace.
std::vector<StateId> kept_states(const Dfa& d, std::vector<StateId>& index) {
  std::vector<StateId> kept;
  index.assign(d.size(), Dfa::none);
  for (StateId s = 0; s < d.size(); ++s) {
    if (d.is_accepting(s) || s == d.initial()) {
      index[s] = static_cast<StateId>(kept.size());
      kept.push_back(s);
    }
  }
  return kept;
}

}  // namespace

Csm Dfa::accepting_part() const {
  std::vector<StateId> index;
  auto kept = kept_states(*this, index);
  Csm m(alphabet());
  for (auto s : kept) m.add_state("q" + std::to_string(s));
  for (auto s : kept)
    for (std::size_t a = 0; a < actions_.size(); ++a) {
      StateId t = next(s, a);
      if (t != none && is_accepting(t)) m.add_transition(index[s], actions_[a], index[t]);
    }
  m.set_initial(index[initial_]);
  return m;
}

// ---------------------------------------------------------------------------
// Product exploration

namespace {

struct VecHash {
  std::size_t operator()(const std::vector<StateId>& v) const {
    std::size_t h = 1469598103934665603ull;
    for (auto x : v) {
      h ^= x + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

// Indexed view of several machines sharing one action numbering.
class ProductIndex {
 public:
  explicit ProductIndex(std::span<const Csm* const> parts) : parts_(parts.begin(), parts.end()) {
    for (auto* p : parts_) alphabet_.insert(p->alphabet().begin(), p->alphabet().end());
    actions_.assign(alphabet_.begin(), alphabet_.end());
    std::map<Action, std::size_t> idx;
    for (std::size_t i = 0; i < actions_.size(); ++i) idx[actions_[i]] = i;
    by_action_.resize(parts_.size());
    taus_.resize(parts_.size());
    member_.resize(parts_.size());
    for (std::size_t p = 0; p < parts_.size(); ++p) {
      const Csm& m = *parts_[p];
      member_[p].assign(actions_.size(), 0);
      for (const auto& a : m.alphabet()) member_[p][idx[a]] = 1;
      by_action_[p].assign(m.size(), std::vector<std::vector<std::size_t>>(actions_.size()));
      taus_[p].assign(m.size(), {});
      for (std::size_t ti = 0; ti < m.transitions().size(); ++ti) {
        const auto& t = m.transition(ti);
        if (is_tau(t.label))
          taus_[p][t.from].push_back(ti);
        else
          by_action_[p][t.from][idx[t.label]].push_back(ti);
      }
    }
  }

  // Calls f(label, moves, successor) for every product successor of s.
  template <class F>
  void successors(const std::vector<StateId>& s, F&& f) const {
    const std::size_t n = parts_.size();
    std::vector<std::optional<std::size_t>> moves(n);
    for (std::size_t p = 0; p < n; ++p) {
      for (auto ti : taus_[p][s[p]]) {
        auto next = s;
        next[p] = parts_[p]->transition(ti).to;
        std::fill(moves.begin(), moves.end(), std::nullopt);
        moves[p] = ti;
        f(tau, moves, next);
      }
    }
    std::vector<std::size_t> participants;
    std::vector<std::size_t> cursor;
    for (std::size_t a = 0; a < actions_.size(); ++a) {
      participants.clear();
      bool blocked = false;
      for (std::size_t p = 0; p < n; ++p) {
        if (!member_[p][a]) continue;
        if (by_action_[p][s[p]][a].empty()) {
          blocked = true;
          break;
        }
        participants.push_back(p);
      }
      if (blocked || participants.empty()) continue;
      cursor.assign(participants.size(), 0);
      while (true) {
        auto next = s;
        std::fill(moves.begin(), moves.end(), std::nullopt);
        for (std::size_t i = 0; i < participants.size(); ++i) {
          std::size_t p = participants[i];
          std::size_t ti = by_action_[p][s[p]][a][cursor[i]];
          moves[p] = ti;
          next[p] = parts_[p]->transition(ti).to;
        }
        f(actions_[a], moves, next);
        std::size_t i = 0;
        for (; i < participants.size(); ++i) {
          std::size_t p = participants[i];
          if (++cursor[i] < by_action_[p][s[p]][a].size()) break;
          cursor[i] = 0;
        }
        if (i == participants.size()) break;
      }
    }
  }

  const Alphabet& alphabet() const { return alphabet_; }
  std::vector<StateId> initial() const {
    std::vector<StateId> s;
    for (auto* p : parts_) {
      if (p->size() == 0) throw InputError("machine without states in product");
      s.push_back(p->initial());
    }
    return s;
  }

 private:
  std::vector<const Csm*> parts_;
  Alphabet alphabet_;
  std::vector<Action> actions_;
  std::vector<std::vector<std::vector<std::vector<std::size_t>>>> by_action_;
  std::vector<std::vector<std::vector<std::size_t>>> taus_;
  std::vector<std::vector<char>> member_;
};

struct Visit {
  std::size_t parent;
  ProductStep step;
};

}  // namespace

std::vector<std::size_t> Counterexample::component_path(std::size_t component) const {
  std::vector<std::size_t> r;
  for (const auto& st : path)
    if (component < st.moves.size() && st.moves[component]) r.push_back(*st.moves[component]);
  return r;
}

bool any_error(std::span<const Csm* const> parts, std::span<const StateId> state) {
  for (std::size_t i = 0; i < parts.size(); ++i)
    if (parts[i]->is_error(state[i])) return true;
  return false;
}

Verdict find_reachable(std::span<const Csm* const> parts, const ProductPredicate& target,
                       std::size_t max_states) {
  ProductIndex index(parts);
  std::unordered_map<std::vector<StateId>, std::size_t, VecHash> seen;
  std::vector<std::vector<StateId>> states;
  std::vector<Visit> visits;
  std::deque<std::size_t> queue;

  auto build = [&](std::size_t idx) {
    Counterexample c;
    std::vector<std::size_t> chain;
    for (std::size_t i = idx; i != 0; i = visits[i].parent) chain.push_back(i);
    std::reverse(chain.begin(), chain.end());
    c.states.push_back(states[0]);
    for (auto i : chain) {
      c.path.push_back(visits[i].step);
      c.states.push_back(states[i]);
      if (!is_tau(visits[i].step.label)) c.trace.push_back(visits[i].step.label);
    }
    return Verdict{std::move(c)};
  };

  auto init = index.initial();
  seen.emplace(init, 0);
  states.push_back(init);
  visits.push_back(Visit{0, {}});
  if (target(init)) return build(0);
  queue.push_back(0);
  while (!queue.empty()) {
    std::size_t cur = queue.front();
    queue.pop_front();
    std::optional<std::size_t> hit;
    auto from = states[cur];
    index.successors(from, [&](const Action& label, const std::vector<std::optional<std::size_t>>& moves,
                               const std::vector<StateId>& next) {
      if (hit) return;
      if (seen.count(next)) return;
      if (states.size() >= max_states)
        throw ResourceError("product exploration exceeded " + std::to_string(max_states) + " states");
      std::size_t id = states.size();
      seen.emplace(next, id);
      states.push_back(next);
      visits.push_back(Visit{cur, ProductStep{label, moves}});
      if (target(next))
        hit = id;
      else
        queue.push_back(id);
    });
    if (hit) return build(*hit);
  }
  return Verdict{};
}

Verdict find_error(std::span<const Csm* const> parts, std::size_t max_states) {
  return find_reachable(
      parts, [&](std::span<const StateId> s) { return any_error(parts, s); }, max_states);
}

// ---------------------------------------------------------------------------
// Operations

Trace project_trace(const Trace& t, const Alphabet& sigma) {
  Trace r;
  for (const auto& a : t)
    if (sigma.count(a)) r.push_back(a);
  return r;
}

Csm project_csm(const Csm& m, const Alphabet& sigma) {
  Alphabet kept = intersect(m.alphabet(), sigma);
  // Actions of sigma the machine never uses stay in the alphabet, unconstrained.
  Csm r(sigma);
  for (StateId s = 0; s < m.size(); ++s) r.add_state(m.name(s), m.is_error(s));
  for (const auto& t : m.transitions())
    r.add_transition(t.from, kept.count(t.label) ? t.label : tau, t.to, t.origin);
  if (m.size()) r.set_initial(m.initial());
  return r;
}

Csm compose(std::span<const Csm* const> parts) {
  ProductIndex index(parts);
  Csm r(index.alphabet());
  std::unordered_map<std::vector<StateId>, StateId, VecHash> seen;
  std::vector<std::vector<StateId>> states;
  std::deque<StateId> queue;

  auto intern = [&](const std::vector<StateId>& s) {
    auto it = seen.find(s);
    if (it != seen.end()) return it->second;
    std::string name = "(";
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i) name += ",";
      name += parts[i]->name(s[i]);
    }
    name += ")";
    StateId id = r.add_state(name, any_error(parts, s));
    seen.emplace(s, id);
    states.push_back(s);
    queue.push_back(id);
    return id;
  };

  StateId init = intern(index.initial());
  r.set_initial(init);
  while (!queue.empty()) {
    StateId cur = queue.front();
    queue.pop_front();
    auto from = states[cur];
    index.successors(from, [&](const Action& label, const std::vector<std::optional<std::size_t>>&,
                               const std::vector<StateId>& next) {
      StateId to = intern(next);
      r.add_transition(cur, label, to);
    });
  }
  if (parts.size() == 2) {
    std::vector<std::pair<StateId, StateId>> prov;
    for (const auto& s : states) prov.emplace_back(s[0], s[1]);
    r.set_provenance(std::move(prov));
  }
  return r;
}

Csm compose(const Csm& m1, const Csm& m2) {
  const Csm* parts[] = {&m1, &m2};
  return compose(std::span<const Csm* const>(parts));
}

Dfa complement_property(const Dfa& p) {
  // Accepting states survive; every other move, and a rejecting start, goes to
  // the fresh error state.
  std::vector<StateId> index(p.size(), Dfa::none);
  std::vector<StateId> kept;
  for (StateId s = 0; s < p.size(); ++s)
    if (p.is_accepting(s)) {
      index[s] = static_cast<StateId>(kept.size());
      kept.push_back(s);
    }
  Dfa r(p.alphabet(), kept.size() + 1);
  auto err = static_cast<StateId>(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    StateId s = kept[i];
    r.set_accepting(static_cast<StateId>(i));
    for (std::size_t a = 0; a < p.actions().size(); ++a) {
      StateId t = p.next(s, a);
      bool ok = t != Dfa::none && p.is_accepting(t);
      r.set_next(static_cast<StateId>(i), a, ok ? index[t] : err);
    }
  }
  for (std::size_t a = 0; a < p.actions().size(); ++a) r.set_next(err, a, err);
  r.set_error(err);
  r.set_initial(p.is_accepting(p.initial()) ? index[p.initial()] : err);
  return r;
}

Dfa complement_property(const Csm& p) { return complement_property(Dfa::from_csm(p)); }

Verdict check_reachability(const Csm& m, const StatePredicate& target) {
  const Csm* parts[] = {&m};
  return find_reachable(std::span<const Csm* const>(parts),
                        [&](std::span<const StateId> s) { return target(s[0]); });
}

Verdict check_reachability(const Csm& m) {
  return check_reachability(m, [&](StateId s) { return m.is_error(s); });
}

const std::vector<StateId>& TauClosure::of(StateId s) {
  auto& slot = cache_.at(s);
  if (slot) return *slot;
  std::vector<char> seen(m_.size(), 0);
  std::vector<StateId> stack{s}, result;
  seen[s] = 1;
  while (!stack.empty()) {
    StateId q = stack.back();
    stack.pop_back();
    result.push_back(q);
    for (auto ti : m_.outgoing(q)) {
      const auto& t = m_.transition(ti);
      if (is_tau(t.label) && !seen[t.to]) {
        seen[t.to] = 1;
        stack.push_back(t.to);
      }
    }
  }
  std::sort(result.begin(), result.end());
  slot = std::move(result);
  return *slot;
}

std::vector<StateId> TauClosure::of(const std::vector<StateId>& set) {
  std::set<StateId> acc;
  for (auto s : set) {
    const auto& c = of(s);
    acc.insert(c.begin(), c.end());
  }
  return {acc.begin(), acc.end()};
}

namespace {

std::vector<StateId> step_set(const Csm& m, TauClosure& closure, const std::vector<StateId>& from,
                              const Action& a) {
  std::vector<StateId> next;
  for (auto s : from)
    for (auto ti : m.outgoing(s))
      if (m.transition(ti).label == a) next.push_back(m.transition(ti).to);
  return closure.of(next);
}

}  // namespace

SimResult simulate_trace(const Csm& m, const Trace& t) {
  for (const auto& a : t)
    if (!m.alphabet().count(a))
      throw InputError("action '" + a + "' is not in the alphabet " + to_string(m.alphabet()));
  TauClosure closure(m);
  auto current = closure.of(m.initial());
  for (std::size_t i = 0; i < t.size(); ++i) {
    current = step_set(m, closure, current, t[i]);
    if (current.empty()) return SimResult{false, i};
  }
  return SimResult{true, 0};
}

Dfa determinize(const Csm& m, std::size_t max_states) {
  TauClosure closure(m);
  std::vector<Action> actions(m.alphabet().begin(), m.alphabet().end());
  std::map<std::vector<StateId>, StateId> ids;
  std::vector<std::vector<StateId>> subsets;
  std::vector<std::vector<StateId>> delta;
  std::deque<StateId> queue;

  auto intern = [&](std::vector<StateId> s) {
    auto it = ids.find(s);
    if (it != ids.end()) return it->second;
    if (subsets.size() >= max_states)
      throw ResourceError("subset construction exceeded " + std::to_string(max_states) + " states");
    auto id = static_cast<StateId>(subsets.size());
    ids.emplace(s, id);
    subsets.push_back(std::move(s));
    delta.emplace_back(actions.size(), Dfa::none);
    queue.push_back(id);
    return id;
  };

  intern(closure.of(m.initial()));
  while (!queue.empty()) {
    StateId cur = queue.front();
    queue.pop_front();
    for (std::size_t a = 0; a < actions.size(); ++a) {
      auto next = step_set(m, closure, subsets[cur], actions[a]);
      delta[cur][a] = intern(std::move(next));
    }
  }
  Dfa d(m.alphabet(), subsets.size());
  for (StateId s = 0; s < subsets.size(); ++s) {
    d.set_accepting(s, !subsets[s].empty());
    d.set_error(s, std::any_of(subsets[s].begin(), subsets[s].end(),
                               [&](StateId q) { return m.is_error(q); }));
    for (std::size_t a = 0; a < actions.size(); ++a) d.set_next(s, a, delta[s][a]);
  }
  d.set_initial(0);
  return d;
}

Csm trace_csm(const Trace& t, std::optional<Alphabet> alphabet) {
  Alphabet sigma = alphabet ? *alphabet : Alphabet(t.begin(), t.end());
  Csm m(sigma);
  for (std::size_t i = 0; i <= t.size(); ++i) m.add_state("t" + std::to_string(i));
  for (std::size_t i = 0; i < t.size(); ++i)
    m.add_transition(static_cast<StateId>(i), t[i], static_cast<StateId>(i + 1));
  m.set_initial(0);
  return m;
}

std::set<Trace> bounded_language(const Csm& m, std::size_t depth) {
  std::set<Trace> out;
  TauClosure closure(m);
  Trace cur;
  std::function<void(const std::vector<StateId>&)> rec = [&](const std::vector<StateId>& states) {
    out.insert(cur);
    if (cur.size() == depth) return;
    for (const auto& a : m.alphabet()) {
      auto next = step_set(m, closure, states, a);
      if (next.empty()) continue;
      cur.push_back(a);
      rec(next);
      cur.pop_back();
    }
  };
  rec(closure.of(m.initial()));
  return out;
}

std::set<Trace> bounded_language(const Dfa& d, std::size_t depth) {
  std::set<Trace> out;
  Trace cur;
  std::function<void(StateId)> rec = [&](StateId s) {
    if (d.is_accepting(s)) out.insert(cur);
    if (cur.size() == depth) return;
    for (std::size_t a = 0; a < d.actions().size(); ++a) {
      cur.push_back(d.actions()[a]);
      rec(d.next(s, a));
      cur.pop_back();
    }
  };
  rec(d.initial());
  return out;
}

Dfa minimize(const Dfa& d) {
  const std::size_t k = d.actions().size();
  std::vector<StateId> reach;
  std::vector<char> seen(d.size(), 0);
  std::deque<StateId> q{d.initial()};
  seen[d.initial()] = 1;
  while (!q.empty()) {
    StateId s = q.front();
    q.pop_front();
    reach.push_back(s);
    for (std::size_t a = 0; a < k; ++a) {
      StateId t = d.next(s, a);
      if (t != Dfa::none && !seen[t]) {
        seen[t] = 1;
        q.push_back(t);
      }
    }
  }
  std::vector<std::size_t> block(d.size(), 0);
  for (auto s : reach) block[s] = (d.is_accepting(s) ? 1 : 0) + (d.is_error(s) ? 2 : 0);
  std::size_t count = 0;
  while (true) {
    std::map<std::vector<std::size_t>, std::size_t> sig;
    std::vector<std::size_t> next(d.size(), 0);
    for (auto s : reach) {
      std::vector<std::size_t> key{block[s]};
      for (std::size_t a = 0; a < k; ++a) key.push_back(block[d.next(s, a)]);
      auto [it, fresh] = sig.emplace(key, sig.size());
      next[s] = it->second;
    }
    block = next;
    if (sig.size() == count) break;
    count = sig.size();
  }
  // Renumber in BFS order so the initial state is 0.
  std::map<std::size_t, StateId> renum;
  for (auto s : reach) renum.emplace(block[s], static_cast<StateId>(renum.size()));
  Dfa r(d.alphabet(), renum.size());
  for (auto s : reach) {
    StateId id = renum[block[s]];
    r.set_accepting(id, d.is_accepting(s));
    r.set_error(id, d.is_error(s));
    for (std::size_t a = 0; a < k; ++a) r.set_next(id, a, renum[block[d.next(s, a)]]);
  }
  r.set_initial(renum[block[d.initial()]]);
  return r;
}

std::optional<Trace> distinguishing_trace(const Dfa& a, const Dfa& b) {
  if (a.actions() != b.actions()) throw InputError("automata over different alphabets");
  const std::size_t k = a.actions().size();
  std::map<std::pair<StateId, StateId>, std::pair<std::pair<StateId, StateId>, std::size_t>> parent;
  std::deque<std::pair<StateId, StateId>> q;
  auto start = std::make_pair(a.initial(), b.initial());
  parent[start] = {start, k};
  q.push_back(start);
  while (!q.empty()) {
    auto cur = q.front();
    q.pop_front();
    if (a.is_accepting(cur.first) != b.is_accepting(cur.second)) {
      Trace t;
      for (auto p = cur; p != start; p = parent[p].first) t.push_back(a.actions()[parent[p].second]);
      std::reverse(t.begin(), t.end());
      return t;
    }
    for (std::size_t x = 0; x < k; ++x) {
      auto nxt = std::make_pair(a.next(cur.first, x), b.next(cur.second, x));
      if (parent.count(nxt)) continue;
      parent[nxt] = {cur, x};
      q.push_back(nxt);
    }
  }
  return std::nullopt;
}

bool equivalent(const Dfa& a, const Dfa& b) { return !distinguishing_trace(a, b).has_value(); }

}  // namespace agv
