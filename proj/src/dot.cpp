#include "agv/dot.hpp"

#include <sstream>

namespace agv {

namespace {

std::string quote(const std::string& s) {
  std::string r = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') r += '\\';
    r += c;
  }
  return r + "\"";
}

}  // namespace

std::string to_dot(const Csm& m, const std::string& graph_name) {
  std::ostringstream os;
  os << "digraph " << quote(graph_name) << " {\n  rankdir=LR;\n";
  os << "  __start [shape=point];\n";
  for (StateId s = 0; s < m.size(); ++s) {
    os << "  n" << s << " [label=" << quote(m.name(s))
       << ", shape=" << (m.is_error(s) ? "doublecircle" : "circle") << "];\n";
  }
  if (m.size()) os << "  __start -> n" << m.initial() << ";\n";
  for (const auto& t : m.transitions())
    os << "  n" << t.from << " -> n" << t.to << " [label=" << quote(t.label) << "];\n";
  os << "}\n";
  return os.str();
}

std::string to_dot(const Dfa& d, const std::string& graph_name) {
  std::ostringstream os;
  os << "digraph " << quote(graph_name) << " {\n  rankdir=LR;\n";
  os << "  __start [shape=point];\n";
  for (StateId s = 0; s < d.size(); ++s) {
    os << "  n" << s << " [label=\"q" << s << "\", shape=" << (d.is_error(s) ? "doublecircle" : "circle");
    if (!d.is_accepting(s)) os << ", style=dashed";
    os << "];\n";
  }
  if (d.size()) os << "  __start -> n" << d.initial() << ";\n";
  for (StateId s = 0; s < d.size(); ++s)
    for (std::size_t a = 0; a < d.actions().size(); ++a)
      if (d.next(s, a) != Dfa::none)
        os << "  n" << s << " -> n" << d.next(s, a) << " [label=" << quote(d.actions()[a]) << "];\n";
  os << "}\n";
  return os.str();
}

}  // namespace agv
