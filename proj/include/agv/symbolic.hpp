#ifndef AGV_SYMBOLIC_HPP
#define AGV_SYMBOLIC_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "agv/csm.hpp"
#include "agv/formula.hpp"
#include "agv/sat.hpp"

namespace agv {

// Parallel assignments, then havocs. A variable may not appear in both.
struct Update {
  std::vector<std::pair<Var, LinearTerm>> assigns;
  std::vector<Var> havocs;

  bool empty() const { return assigns.empty() && havocs.empty(); }
  std::string to_string() const;  // "x := x mod 5, havoc(y)"
};

struct Edge {
  std::size_t from = 0;
  Action label;
  Formula guard;
  Update update;
  std::size_t to = 0;
};

struct VarDecl {
  Var name;
  bool natural = true;
  std::int64_t init = 0;
};

/// Guarded-command program over integer variables. Its meaning is the
/// (usually infinite) Csm over states (location, valuation).
class SymbolicComponent {
 public:
  std::string name;
  Alphabet alphabet;
  std::vector<std::string> locations;
  std::vector<char> error;  // per location
  std::size_t initial = 0;
  std::vector<VarDecl> vars;
  std::vector<Edge> edges;

  std::size_t add_location(const std::string& loc, bool is_error = false);
  std::optional<std::size_t> find_location(const std::string& loc) const;
  // Adds the location on first use.
  std::size_t location(const std::string& loc);
  std::size_t add_edge(Edge e);

  bool is_error(std::size_t loc) const { return error.at(loc) != 0; }
  bool has_error_locations() const;
  std::set<Var> naturals() const;
  std::set<Var> variables() const;
  Valuation initial_valuation() const;

  // Checks labels, variable use and location indices; throws InputError.
  void validate() const;

  // A finite machine as a program without variables; edge i is transition i.
  static SymbolicComponent from_csm(const Csm& m, std::string name = {});

  friend bool operator==(const SymbolicComponent& a, const SymbolicComponent& b);
};

// No tau edges, no havoc, and the guards of same-labelled edges leaving a
// location are pairwise disjoint. Sufficient for every concrete state to have
// at most one successor per action.
bool is_observationally_deterministic(const SymbolicComponent& c, Solver& solver);

using PredicateSet = std::vector<Formula>;

// Appends the formulas not already present; returns how many were new.
std::size_t add_predicates(PredicateSet& preds, const std::vector<Formula>& more);
// The atoms of the guards, each with its negation.
PredicateSet guard_predicates(const SymbolicComponent& c);

struct Abstraction {
  Csm csm;  // transition origin = edge index in the component
  std::vector<std::size_t> location;  // per abstract state
  std::vector<std::uint32_t> mask;    // bit i set iff predicate i holds
  PredicateSet preds;
};

inline constexpr std::size_t max_predicates = 16;

// Literal conjunction describing an abstract valuation.
Formula valuation_formula(const PredicateSet& preds, std::uint32_t mask);

// Existential abstraction: an edge exists iff some concrete state of the
// source valuation has a successor in the target valuation. Only states
// reachable from the initial valuation are built.
Abstraction abstract_may(const SymbolicComponent& c, const PredicateSet& preds, Solver& solver);
// Universal abstraction: every concrete state of the source valuation has a
// successor in the target valuation.
Abstraction abstract_must(const SymbolicComponent& c, const PredicateSet& preds, Solver& solver);

// Weakest precondition of f over one edge: guard implies f after the update.
// Havoc is handled exactly when f's havocked part does not mix with other
// variables; otherwise the result under-approximates.
Formula wp(const Formula& f, const SymbolicComponent& c, const Edge& e, Solver& solver);
Formula wp_trace(const Formula& f, const SymbolicComponent& c, const std::vector<std::size_t>& path,
                 Solver& solver);

struct SymbolicSim {
  bool feasible = true;
  std::size_t prefix = 0;  // when infeasible: length of the shortest infeasible prefix
  // Values chosen by havocs along a feasible path, in order.
  std::vector<std::int64_t> havoc_values;
  // Concrete valuations after each step of a feasible path (path.size() + 1).
  std::vector<Valuation> valuations;
};

// Threads the guards along an edge path (strongest postcondition, fresh
// variables for havocs). Throws InputError when the path is not connected.
SymbolicSim simulate_symbolic(const SymbolicComponent& c, const std::vector<std::size_t>& path, Solver& solver);

// Edge path of one component in a product counterexample whose part is an
// abstraction of c.
std::vector<std::size_t> edge_path(const Counterexample& cex, std::size_t component, const Csm& part);

// New predicates that rule out the infeasible path: atoms of the failing
// guard and of its pull-backs through the prefix, plus negations. Throws
// InternalError when nothing new can be added.
PredicateSet refine(const SymbolicComponent& c, const PredicateSet& preds, const std::vector<std::size_t>& path,
                    std::size_t infeasible_prefix, Solver& solver);

// Concrete exploration with havocs drawn from [0, havoc_bound]. Traces of
// length <= depth, and those among them after which an error location can
// be reached.
struct BoundedExploration {
  std::set<Trace> traces;
  std::set<Trace> error_traces;
};
BoundedExploration explore_bounded(const SymbolicComponent& c, std::size_t depth, std::int64_t havoc_bound,
                                   std::size_t max_tau_steps = 256);
std::set<Trace> bounded_language(const SymbolicComponent& c, std::size_t depth, std::int64_t havoc_bound);

}  // namespace agv

#endif  // AGV_SYMBOLIC_HPP
