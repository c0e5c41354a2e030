#ifndef AGV_BOUNDED_HPP
#define AGV_BOUNDED_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "agv/csm.hpp"
#include "agv/symbolic.hpp"

namespace agv {

// Concrete cross-checks with havocs drawn from [0, havoc_bound]. They can miss
// behaviours beyond the bounds, so they only ever confirm or refute at depth.

// A word of at most depth actions that both components can perform and whose
// projection P rejects.
std::optional<Trace> bounded_violation(const SymbolicComponent& c1, const SymbolicComponent& c2, const Dfa& p,
                                       std::size_t depth, std::int64_t havoc_bound);

struct BoundedInterfaceCheck {
  std::vector<Trace> unsafe_accepted;  // accepted, yet some run reaches error
  std::vector<Trace> safe_rejected;    // performable without error, yet rejected
  bool ok() const { return unsafe_accepted.empty() && safe_rejected.empty(); }
};
BoundedInterfaceCheck check_interface_bounded(const SymbolicComponent& c, const Alphabet& sigma, const Dfa& a,
                                              std::size_t depth, std::int64_t havoc_bound);

}  // namespace agv

#endif  // AGV_BOUNDED_HPP
