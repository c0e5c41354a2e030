#ifndef AGV_AG_FINITE_HPP
#define AGV_AG_FINITE_HPP

#include <optional>
#include <string>
#include <vector>

#include "agv/csm.hpp"
#include "agv/lstar.hpp"

namespace agv {

// Two components and a deterministic property over alpha(M1) ∪ alpha(M2).
struct AgTask {
  Csm m1;
  Csm m2;
  Dfa p;
};

// Throws InputError when the property alphabet escapes the components.
void validate(const AgTask& task);

// (alpha(M1) ∪ alpha(P)) ∩ alpha(M2)
Alphabet assumption_alphabet(const AgTask& task);

// True iff trace_csm(s) ∥ M1 ∥ P_err cannot reach error.
bool teacher_membership(const AgTask& task, const Trace& s);

// nullopt = premise holds.
std::optional<Counterexample> check_premise1(const Dfa& a, const AgTask& task);
std::optional<Counterexample> check_premise2(const Dfa& a, const AgTask& task);

struct CexAnalysis {
  enum class Kind { refine_assumption, real_violation };
  Kind kind;
  Trace trace;  // projection onto alpha(A) for refine_assumption, the M2 trace otherwise
};
CexAnalysis analyze_cex(const AgTask& task, const Trace& c);

struct AgIteration {
  std::size_t conjecture = 0;
  std::size_t states = 0;  // accepting states of the conjecture
  std::optional<Trace> premise1_cex;
  std::optional<Trace> premise2_cex;
  std::string outcome;  // "refine", "holds", "violated"
};

struct AgVerdict {
  bool holds = false;
  Dfa assumption;               // final assumption when holds
  std::size_t iterations = 0;   // conjectures made
  std::optional<Counterexample> cex;  // over M1 ∥ M2 ∥ P_err when violated
  std::vector<AgIteration> log;
  LearnStats stats;
};

struct AgOptions {
  std::size_t max_conjectures = 1000;
  LearnLog learn_log;
};

AgVerdict verify_compositional(const AgTask& task, const AgOptions& options = {});

// Monolithic check of M1 ∥ M2 ∥ P_err.
Verdict check_monolithic(const AgTask& task);

// Weakest assumption over sigma: accepts s iff s cannot drive M1 ∥ P_err to
// error. Strings M1 cannot follow are accepted. Minimal, no error flags.
Dfa build_weakest_assumption(const Csm& m1, const Dfa& p, const Alphabet& sigma);

// Number of assumption states counted the way reports show them: the
// rejecting sink that completes a conjecture is not a state of the assumption.
std::size_t assumption_states(const Dfa& a);

}  // namespace agv

#endif  // AGV_AG_FINITE_HPP
