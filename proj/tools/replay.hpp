#ifndef AGV_TOOLS_REPLAY_HPP
#define AGV_TOOLS_REPLAY_HPP

#include <cstddef>
#include <vector>

#include "agv/symbolic.hpp"

namespace agv::cli {

// Longest feasible edge path of c whose observable labels are a prefix of t,
// with at most max_tau tau edges between observable ones.
struct SymbolicReplay {
  std::vector<std::size_t> path;
  std::size_t consumed = 0;  // actions of t performed
  SymbolicSim sim;           // of path
  bool error = false;        // path ends in an error location
};

SymbolicReplay replay_symbolic(const SymbolicComponent& c, const Trace& t, Solver& solver, std::size_t max_tau = 16);

}  // namespace agv::cli

#endif  // AGV_TOOLS_REPLAY_HPP
