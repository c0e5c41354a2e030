#ifndef AGV_CSM_HPP
#define AGV_CSM_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "agv/error.hpp"

namespace agv {

using Action = std::string;
using Alphabet = std::set<Action>;
using Trace = std::vector<Action>;
using StateId = std::uint32_t;

// The internal action. Reserved: never a member of an alphabet.
inline const Action tau = "tau";

inline bool is_tau(const Action& a) { return a == tau; }

Alphabet unite(const Alphabet& a, const Alphabet& b);
Alphabet intersect(const Alphabet& a, const Alphabet& b);
bool subset_of(const Alphabet& a, const Alphabet& b);
std::string to_string(const Trace& t);
std::string to_string(const Alphabet& a);

struct Transition {
  StateId from = 0;
  Action label;
  StateId to = 0;
  // Index of the edge in the generating symbolic component, -1 for none.
  int origin = -1;

  friend bool operator==(const Transition&, const Transition&) = default;
};

/// Explicit communicating state machine: states, alphabet, a labelled
/// transition relation that may use tau, and an initial state. States can be
/// flagged as error states (property violations, assertion failures).
class Csm {
 public:
  Csm() = default;
  explicit Csm(Alphabet alphabet);

  StateId add_state(std::string name = {}, bool error = false);
  void add_transition(StateId from, const Action& label, StateId to, int origin = -1);
  void set_initial(StateId s);
  void set_error(StateId s, bool error = true);
  void set_name(StateId s, std::string name);

  std::size_t size() const { return names_.size(); }
  const Alphabet& alphabet() const { return alphabet_; }
  const std::vector<Transition>& transitions() const { return transitions_; }
  const Transition& transition(std::size_t i) const { return transitions_.at(i); }
  StateId initial() const { return initial_; }
  bool is_error(StateId s) const { return error_.at(s) != 0; }
  bool has_error_states() const;
  const std::string& name(StateId s) const { return names_.at(s); }
  std::optional<StateId> find_state(std::string_view name) const;

  // Indices into transitions() leaving state s.
  const std::vector<std::size_t>& outgoing(StateId s) const { return out_.at(s); }

  // No tau, and at most one successor per (state, action).
  bool is_deterministic() const;

  // Product provenance for states created by compose().
  const std::vector<std::pair<StateId, StateId>>& provenance() const { return provenance_; }
  void set_provenance(std::vector<std::pair<StateId, StateId>> p) { provenance_ = std::move(p); }

  friend bool operator==(const Csm& a, const Csm& b) {
    return a.alphabet_ == b.alphabet_ && a.names_ == b.names_ && a.error_ == b.error_ &&
           a.transitions_ == b.transitions_ && a.initial_ == b.initial_;
  }

 private:
  void check_state(StateId s) const;

  Alphabet alphabet_;
  std::vector<std::string> names_;
  std::vector<char> error_;
  std::vector<Transition> transitions_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::pair<StateId, StateId>> provenance_;
  StateId initial_ = 0;
};

/// Deterministic and complete finite automaton with accepting states and
/// optional error flags. Used for properties, assumptions and interfaces.
class Dfa {
 public:
  static constexpr StateId none = std::numeric_limits<StateId>::max();

  Dfa() = default;
  Dfa(const Alphabet& alphabet, std::size_t states);

  std::size_t size() const { return accepting_.size(); }
  const std::vector<Action>& actions() const { return actions_; }
  Alphabet alphabet() const { return Alphabet(actions_.begin(), actions_.end()); }
  std::optional<std::size_t> action_index(const Action& a) const;

  StateId initial() const { return initial_; }
  void set_initial(StateId s) { initial_ = s; }
  StateId next(StateId s, std::size_t action) const { return delta_[s * actions_.size() + action]; }
  StateId next(StateId s, const Action& a) const;
  void set_next(StateId s, std::size_t action, StateId t) { delta_[s * actions_.size() + action] = t; }
  void set_next(StateId s, const Action& a, StateId t);

  bool is_accepting(StateId s) const { return accepting_[s] != 0; }
  void set_accepting(StateId s, bool v = true) { accepting_[s] = v ? 1 : 0; }
  bool is_error(StateId s) const { return error_[s] != 0; }
  void set_error(StateId s, bool v = true) { error_[s] = v ? 1 : 0; }

  // Run from the initial state; actions outside the alphabet throw.
  StateId run(const Trace& t) const;
  bool accepts(const Trace& t) const { return is_accepting(run(t)); }
  std::size_t accepting_count() const;
  bool is_complete() const;

  // Completes a deterministic Csm with a rejecting sink. Every original state
  // accepts, so the language is the machine's (prefix-closed) trace set.
  static Dfa from_csm(const Csm& m);

  // The full automaton as a Csm (all states, error flags kept).
  Csm to_csm() const;
  // Accepting states only; as a Csm its traces are the largest prefix-closed
  // subset of the accepted language.
  Csm accepting_part() const;

 private:
  std::vector<Action> actions_;
  std::vector<StateId> delta_;
  std::vector<char> accepting_;
  std::vector<char> error_;
  StateId initial_ = 0;
};

// One step of a product run: the action and, per component, the index of the
// transition it took (nullopt when the component stayed put).
struct ProductStep {
  Action label;
  std::vector<std::optional<std::size_t>> moves;
};

struct Counterexample {
  Trace trace;  // observable actions only
  std::vector<ProductStep> path;
  std::vector<std::vector<StateId>> states;  // path.size() + 1 product states

  // Transitions taken by one component along the path, tau steps included.
  std::vector<std::size_t> component_path(std::size_t component) const;
};

struct Verdict {
  std::optional<Counterexample> cex;
  bool safe() const { return !cex.has_value(); }
};

using StatePredicate = std::function<bool(StateId)>;
using ProductPredicate = std::function<bool(std::span<const StateId>)>;

// Any component sitting in an error state.
bool any_error(std::span<const Csm* const> parts, std::span<const StateId> state);

// Breadth-first search over the on-the-fly product of the parts. Returns a
// shortest witness when a state satisfying target is reachable.
Verdict find_reachable(std::span<const Csm* const> parts, const ProductPredicate& target,
                       std::size_t max_states = 1u << 22);
Verdict find_error(std::span<const Csm* const> parts, std::size_t max_states = 1u << 22);

Trace project_trace(const Trace& t, const Alphabet& sigma);
Csm project_csm(const Csm& m, const Alphabet& sigma);
Csm compose(const Csm& m1, const Csm& m2);
Csm compose(std::span<const Csm* const> parts);
Dfa complement_property(const Dfa& p);
Dfa complement_property(const Csm& p);
Verdict check_reachability(const Csm& m, const StatePredicate& target);
Verdict check_reachability(const Csm& m);  // target: error states

struct SimResult {
  bool accepted = true;
  std::size_t failed_at = 0;
};
SimResult simulate_trace(const Csm& m, const Trace& t);

// Subset construction over tau-closures. A subset state is an error state iff
// it contains an error state of m. The empty subset is a rejecting sink.
Dfa determinize(const Csm& m, std::size_t max_states = 1u << 14);

// Linear machine with t.size()+1 states. The alphabet defaults to the actions
// occurring in t.
Csm trace_csm(const Trace& t, std::optional<Alphabet> alphabet = std::nullopt);

// Observable traces of length <= depth.
std::set<Trace> bounded_language(const Csm& m, std::size_t depth);
std::set<Trace> bounded_language(const Dfa& d, std::size_t depth);  // accepted strings

// Tau-closure of a state, memoized per state.
class TauClosure {
 public:
  explicit TauClosure(const Csm& m) : m_(m), cache_(m.size()) {}
  const std::vector<StateId>& of(StateId s);
  std::vector<StateId> of(const std::vector<StateId>& set);

 private:
  const Csm& m_;
  std::vector<std::optional<std::vector<StateId>>> cache_;
};

// Moore-style partition refinement; unreachable states dropped.
Dfa minimize(const Dfa& d);
// Shortest string accepted by exactly one of a, b (same alphabet required).
std::optional<Trace> distinguishing_trace(const Dfa& a, const Dfa& b);
bool equivalent(const Dfa& a, const Dfa& b);

}  // namespace agv

#endif  // AGV_CSM_HPP
