#include "replay.hpp"

#include <functional>

namespace agv::cli {

SymbolicReplay replay_symbolic(const SymbolicComponent& c, const Trace& t, Solver& solver, std::size_t max_tau) {
  SymbolicReplay best;
  best.sim = simulate_symbolic(c, {}, solver);
  std::vector<std::size_t> path;
  // Depth first; a path that reaches an error location or consumes all of t
  // ends the search.
  std::function<bool(std::size_t, std::size_t, std::size_t)> go = [&](std::size_t loc, std::size_t consumed,
                                                                      std::size_t taus) {
    if (c.is_error(loc) || consumed == t.size()) return true;
    for (std::size_t i = 0; i < c.edges.size(); ++i) {
      const Edge& e = c.edges[i];
      if (e.from != loc) continue;
      bool silent = is_tau(e.label);
      if (silent ? taus >= max_tau : e.label != t[consumed]) continue;
      path.push_back(i);
      auto sim = simulate_symbolic(c, path, solver);
      if (sim.feasible) {
        std::size_t now = consumed + (silent ? 0 : 1);
        bool better = now > best.consumed || (now == best.consumed && c.is_error(e.to) && !best.error);
        if (better) best = {path, now, sim, c.is_error(e.to)};
        if (go(e.to, now, silent ? taus + 1 : 0)) return true;
      }
      path.pop_back();
    }
    return false;
  };
  go(c.initial, 0, 0);
  return best;
}

}  // namespace agv::cli
