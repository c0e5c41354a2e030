#ifndef AGV_SAT_HPP
#define AGV_SAT_HPP

#include <cstddef>
#include <map>
#include <set>
#include <string>

#include "agv/formula.hpp"

namespace agv {

struct SatResult {
  bool sat = false;
  Valuation witness;  // values for the formula's variables when sat
  explicit operator bool() const { return sat; }
};

struct SolverOptions {
  std::size_t max_cubes = 1u << 16;        // disjuncts explored per query
  std::size_t max_constraints = 4096;      // per elimination step
  std::size_t max_branches = 1u << 12;     // integer search nodes per cube
  std::string smt_dump_dir;                // write query_<seq>.smt2 when set
};

struct SolverStats {
  std::size_t queries = 0;
  std::size_t cache_hits = 0;
  std::size_t satisfiable = 0;
};

/// Decision procedure for linear integer arithmetic with constant-modulus
/// terms: disjunctive normal form, mod elimination through quotient and
/// remainder variables, Fourier–Motzkin with integer tightening, and
/// branch-and-bound when back-substitution meets an integer gap.
///
/// `naturals` names variables ranging over N; a renamed copy `v#k` of a
/// natural variable v is natural too. All other variables range over Z.
class Solver {
 public:
  explicit Solver(SolverOptions options = {}) : options_(std::move(options)) {}

  SatResult check(const Formula& f, const std::set<Var>& naturals = {});
  bool satisfiable(const Formula& f, const std::set<Var>& naturals = {}) { return check(f, naturals).sat; }
  bool valid(const Formula& f, const std::set<Var>& naturals = {}) {
    return !check(Formula::lnot(f), naturals).sat;
  }

  const SolverStats& stats() const { return stats_; }
  const SolverOptions& options() const { return options_; }

 private:
  SolverOptions options_;
  SolverStats stats_;
  std::map<std::string, SatResult> cache_;
  std::size_t dumped_ = 0;
};

SatResult is_satisfiable(const Formula& f, const std::set<Var>& naturals = {});

bool is_natural(const Var& v, const std::set<Var>& naturals);

// QF_LIA script with declarations, non-negativity for naturals, and check-sat.
std::string to_smtlib(const Formula& f, const std::set<Var>& naturals = {});

}  // namespace agv

#endif  // AGV_SAT_HPP
