#ifndef AGV_AG_INFINITE_HPP
#define AGV_AG_INFINITE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "agv/csm.hpp"
#include "agv/lstar.hpp"
#include "agv/ag_finite.hpp"
#include "agv/symbolic.hpp"

namespace agv {

struct InfTask {
  SymbolicComponent c1;
  SymbolicComponent c2;
  Dfa p;
  PredicateSet preds1;  // initial predicates; the run works on copies
  PredicateSet preds2;
};

void validate(const InfTask& task);
Alphabet assumption_alphabet(const InfTask& task);

struct InfOptions {
  std::size_t max_conjectures = 1000;
  std::size_t max_refinements = 50;  // per premise check or membership query
  double recheck_fraction = 0.1;     // cached answers re-asked after a refinement
  std::uint64_t seed = 1;
  SolverOptions solver;
  LearnLog learn_log;
};

struct RefinementRecord {
  int component = 1;      // 1 or 2
  std::string phase;      // "membership", "premise1", "premise2"
  Trace trace;            // abstract counterexample
  std::size_t infeasible_at = 0;
  PredicateSet added;
};

struct InfIteration {
  std::size_t conjecture = 0;
  std::size_t states = 0;
  std::optional<Trace> premise1_cex;
  std::optional<Trace> premise2_cex;
  std::string outcome;  // "refine", "holds", "violated"
  std::size_t restarts = 0;  // premise 1 re-runs after M1 was refined
};

// A concrete violation: the interleaved trace and the edge paths each
// component takes along it (both feasible, tau edges included).
struct InfCounterexample {
  Trace trace;
  std::vector<std::size_t> path1;
  std::vector<std::size_t> path2;
};

struct InfVerdict {
  enum class Status { holds, violated, resource };
  Status status = Status::resource;
  Dfa assumption;
  PredicateSet preds1, preds2;  // final
  std::optional<InfCounterexample> cex;
  std::string reason;  // resource exhaustion diagnostics
  std::vector<InfIteration> log;
  std::vector<RefinementRecord> refinements;
  LearnStats stats;
  std::size_t membership_queries = 0;  // teacher-side, including rechecks
  std::size_t rechecks = 0;
  std::size_t recheck_inconsistencies = 0;

  bool holds() const { return status == Status::holds; }
};

/// Teacher state for one run: current predicate sets, abstractions, and the
/// membership answers given so far.
class InfSession {
 public:
  InfSession(const InfTask& task, const InfOptions& options, InfVerdict& out);

  // ⟨s⟩ M1 ⟨P⟩ decided on the may abstraction, refining M1 until the
  // answer is concrete. On false, the feasible M1 edge path is kept.
  bool membership(const Trace& s);
  const std::vector<std::size_t>& last_failure_path() const { return failure_path_; }

  struct Outcome {
    enum class Kind { holds, refine_assumption, violated };
    Kind kind;
    Trace trace;  // refine: over the assumption alphabet; violated: M2 trace
  };
  Outcome check_conjecture(const Dfa& a);

  InfCounterexample realize_violation(const Trace& assumption_trace, const std::vector<std::size_t>& m1_path,
                                      const std::vector<std::size_t>& m2_path);
  const std::vector<std::size_t>& last_m2_path() const { return m2_path_; }

  const PredicateSet& preds1() const { return preds1_; }
  const PredicateSet& preds2() const { return preds2_; }
  Solver& solver() { return solver_; }

 private:
  const Abstraction& may1();
  const Abstraction& may2();
  void refine1(const std::string& phase, const Counterexample& c, const std::vector<std::size_t>& path,
               std::size_t at);
  void refine2(const std::string& phase, const Counterexample& c, const std::vector<std::size_t>& path,
               std::size_t at);
  void recheck();

  const InfTask& task_;
  InfOptions options_;
  InfVerdict& out_;
  Solver solver_;
  Alphabet sigma_;
  Csm perr_;
  PredicateSet preds1_, preds2_;
  std::optional<Abstraction> may1_, may2_;
  std::map<Trace, bool> answered_;
  std::vector<std::size_t> failure_path_, m2_path_;
  std::mt19937_64 rng_;
  bool rechecking_ = false;
};

InfVerdict verify_infinite(const InfTask& task, const InfOptions& options = {});

// Concrete check of a counterexample: both paths feasible and consistent
// with the trace, and the property error reached.
bool confirm_violation(const InfTask& task, const InfCounterexample& cex, Solver& solver);

}  // namespace agv

#endif  // AGV_AG_INFINITE_HPP
