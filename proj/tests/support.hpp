// Shared fixtures and brute-force oracles for the test binaries. The oracles
// deliberately avoid the library's product/closure code.
#ifndef AGV_TEST_SUPPORT_HPP
#define AGV_TEST_SUPPORT_HPP

#include <algorithm>
#include <deque>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "agv/csm.hpp"

namespace fixture {

using namespace agv;

inline Csm chain(const Alphabet& sigma, const std::vector<std::string>& cycle, const std::string& prefix) {
  Csm m(sigma);
  for (std::size_t i = 0; i < cycle.size(); ++i) m.add_state(prefix + std::to_string(i));
  for (std::size_t i = 0; i < cycle.size(); ++i)
    m.add_transition(static_cast<StateId>(i), cycle[i], static_cast<StateId>((i + 1) % cycle.size()));
  m.set_initial(0);
  return m;
}

inline Csm sender() { return chain({"in", "send", "ack"}, {"in", "send", "ack"}, "s"); }
inline Csm receiver() { return chain({"send", "out", "ack"}, {"send", "out", "ack"}, "r"); }
inline Csm inout_property() { return chain({"in", "out"}, {"in", "out"}, "p"); }
// Emits out before it has received anything.
inline Csm receiver_bad() { return chain({"send", "out", "ack"}, {"out", "send", "ack"}, "r"); }

// ----- independent oracles ---------------------------------------------------

inline std::set<StateId> naive_closure(const Csm& m, std::set<StateId> s) {
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& t : m.transitions())
      if (t.label == tau && s.count(t.from) && !s.count(t.to)) {
        s.insert(t.to);
        grew = true;
      }
  }
  return s;
}

// Set of states reachable on t; empty when t is not a trace.
inline std::set<StateId> naive_run(const Csm& m, const Trace& t) {
  auto cur = naive_closure(m, {m.initial()});
  for (const auto& a : t) {
    std::set<StateId> next;
    for (const auto& tr : m.transitions())
      if (tr.label == a && cur.count(tr.from)) next.insert(tr.to);
    cur = naive_closure(m, next);
    if (cur.empty()) break;
  }
  return cur;
}

inline bool naive_accepts(const Csm& m, const Trace& t) { return !naive_run(m, t).empty(); }

inline void all_strings(const std::vector<Action>& sigma, std::size_t depth, std::vector<Trace>& out,
                        Trace cur = {}) {
  out.push_back(cur);
  if (cur.size() == depth) return;
  for (const auto& a : sigma) {
    cur.push_back(a);
    all_strings(sigma, depth, out, cur);
    cur.pop_back();
  }
}

inline std::vector<Trace> all_strings(const Alphabet& sigma, std::size_t depth) {
  std::vector<Trace> out;
  all_strings(std::vector<Action>(sigma.begin(), sigma.end()), depth, out);
  return out;
}

inline std::set<Trace> naive_language(const Csm& m, std::size_t depth) {
  std::set<Trace> r;
  for (auto& t : all_strings(m.alphabet(), depth))
    if (naive_accepts(m, t)) r.insert(t);
  return r;
}

// Error reachability in the synchronous product, by fixpoint over tuples.
inline bool naive_error_reachable(const std::vector<const Csm*>& parts) {
  std::set<std::vector<StateId>> seen;
  std::deque<std::vector<StateId>> q;
  std::vector<StateId> init;
  for (auto* p : parts) init.push_back(p->initial());
  seen.insert(init);
  q.push_back(init);
  Alphabet all;
  for (auto* p : parts) all = unite(all, p->alphabet());
  while (!q.empty()) {
    auto s = q.front();
    q.pop_front();
    for (std::size_t i = 0; i < parts.size(); ++i)
      if (parts[i]->is_error(s[i])) return true;
    std::vector<std::vector<StateId>> succ;
    for (std::size_t i = 0; i < parts.size(); ++i)
      for (const auto& t : parts[i]->transitions())
        if (t.label == tau && t.from == s[i]) {
          auto n = s;
          n[i] = t.to;
          succ.push_back(n);
        }
    for (const auto& a : all) {
      std::vector<std::vector<StateId>> partial{s};
      for (std::size_t i = 0; i < parts.size() && !partial.empty(); ++i) {
        if (!parts[i]->alphabet().count(a)) continue;
        std::vector<std::vector<StateId>> next;
        for (const auto& ps : partial)
          for (const auto& t : parts[i]->transitions())
            if (t.label == a && t.from == s[i]) {
              auto n = ps;
              n[i] = t.to;
              next.push_back(n);
            }
        partial = next;
      }
      bool someone = std::any_of(parts.begin(), parts.end(), [&](const Csm* p) { return p->alphabet().count(a); });
      if (someone) succ.insert(succ.end(), partial.begin(), partial.end());
    }
    for (auto& n : succ)
      if (seen.insert(n).second) q.push_back(n);
  }
  return false;
}

// Size of the minimal complete DFA, by comparing bounded residual languages
// of reachable states (length < n separates any two inequivalent states).
inline std::size_t naive_minimal_size(const Dfa& d) {
  std::set<StateId> reach{d.initial()};
  std::deque<StateId> q{d.initial()};
  while (!q.empty()) {
    auto s = q.front();
    q.pop_front();
    for (std::size_t a = 0; a < d.actions().size(); ++a)
      if (reach.insert(d.next(s, a)).second) q.push_back(d.next(s, a));
  }
  auto strings = all_strings(d.alphabet(), d.size());
  std::set<std::vector<bool>> sigs;
  for (auto s : reach) {
    std::vector<bool> sig;
    for (const auto& w : strings) {
      StateId x = s;
      for (const auto& a : w) x = d.next(x, a);
      sig.push_back(d.is_accepting(x));
    }
    sigs.insert(sig);
  }
  return sigs.size();
}

// ----- random generators -----------------------------------------------------

inline Alphabet letters(std::size_t k, std::size_t offset = 0) {
  Alphabet a;
  for (std::size_t i = 0; i < k; ++i) a.insert(std::string(1, static_cast<char>('a' + offset + i)));
  return a;
}

inline Alphabet random_subset(std::mt19937& rng, const Alphabet& from, std::size_t min_size = 1) {
  std::vector<Action> v(from.begin(), from.end());
  while (true) {
    Alphabet r;
    for (auto& a : v)
      if (rng() % 2) r.insert(a);
    if (r.size() >= min_size) return r;
  }
}

inline Csm random_csm(std::mt19937& rng, std::size_t max_states, const Alphabet& sigma, double tau_rate = 0.1,
                      double density = 0.35) {
  std::size_t n = 1 + rng() % max_states;
  Csm m(sigma);
  for (std::size_t i = 0; i < n; ++i) m.add_state();
  std::uniform_real_distribution<double> u(0, 1);
  for (StateId s = 0; s < n; ++s) {
    for (const auto& a : sigma)
      if (u(rng) < density) m.add_transition(s, a, static_cast<StateId>(rng() % n));
    if (u(rng) < tau_rate) m.add_transition(s, tau, static_cast<StateId>(rng() % n));
  }
  m.set_initial(0);
  return m;
}

inline Csm random_deterministic_csm(std::mt19937& rng, std::size_t max_states, const Alphabet& sigma,
                                    double density = 0.6) {
  std::size_t n = 1 + rng() % max_states;
  Csm m(sigma);
  for (std::size_t i = 0; i < n; ++i) m.add_state();
  std::uniform_real_distribution<double> u(0, 1);
  for (StateId s = 0; s < n; ++s)
    for (const auto& a : sigma)
      if (u(rng) < density) m.add_transition(s, a, static_cast<StateId>(rng() % n));
  m.set_initial(0);
  return m;
}

inline Dfa random_dfa(std::mt19937& rng, std::size_t max_states, const Alphabet& sigma) {
  std::size_t n = 1 + rng() % max_states;
  Dfa d(sigma, n);
  for (StateId s = 0; s < n; ++s) {
    d.set_accepting(s, rng() % 2);
    for (std::size_t a = 0; a < sigma.size(); ++a) d.set_next(s, a, static_cast<StateId>(rng() % n));
  }
  d.set_initial(0);
  return d;
}

}  // namespace fixture

#endif
