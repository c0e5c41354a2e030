#ifndef AGV_DOT_HPP
#define AGV_DOT_HPP

#include <string>

#include "agv/csm.hpp"

namespace agv {

// Graphviz rendering: one node per state, labelled edges, error states drawn
// double-circled. Rejecting Dfa states are drawn dashed.
std::string to_dot(const Csm& m, const std::string& graph_name = "csm");
std::string to_dot(const Dfa& d, const std::string& graph_name = "dfa");

}  // namespace agv

#endif  // AGV_DOT_HPP
