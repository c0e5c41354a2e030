#include "agv/bounded.hpp"

#include <functional>
#include <set>

namespace agv {

std::optional<Trace> bounded_violation(const SymbolicComponent& c1, const SymbolicComponent& c2, const Dfa& p,
                                       std::size_t depth, std::int64_t havoc_bound) {
  auto l1 = bounded_language(c1, depth, havoc_bound);
  auto l2 = bounded_language(c2, depth, havoc_bound);
  Alphabet all = unite(c1.alphabet, c2.alphabet);
  Dfa perr = complement_property(p);
  std::optional<Trace> found;
  Trace w;
  std::function<bool()> go = [&]() {
    if (perr.is_error(perr.run(project_trace(w, p.alphabet())))) {
      found = w;
      return true;
    }
    if (w.size() == depth) return false;
    for (const auto& a : all) {
      w.push_back(a);
      bool ok = l1.count(project_trace(w, c1.alphabet)) && l2.count(project_trace(w, c2.alphabet));
      if (ok && go()) return true;
      w.pop_back();
    }
    return false;
  };
  go();
  return found;
}

BoundedInterfaceCheck check_interface_bounded(const SymbolicComponent& c, const Alphabet& sigma, const Dfa& a,
                                              std::size_t depth, std::int64_t havoc_bound) {
  auto e = explore_bounded(c, depth, havoc_bound);
  std::set<Trace> unsafe;
  for (const auto& w : e.error_traces) unsafe.insert(project_trace(w, sigma));
  BoundedInterfaceCheck r;
  for (const auto& w : unsafe)
    if (a.accepts(w)) r.unsafe_accepted.push_back(w);
  std::set<Trace> seen;
  for (const auto& w : e.traces) {
    Trace p = project_trace(w, sigma);
    if (!seen.insert(p).second) continue;
    bool clean = true;
    for (std::size_t k = 0; k <= p.size() && clean; ++k) clean = !unsafe.count(Trace(p.begin(), p.begin() + k));
    if (clean && !a.accepts(p)) r.safe_rejected.push_back(p);
  }
  return r;
}

}  // namespace agv
