#ifndef AGV_MODEL_HPP
#define AGV_MODEL_HPP

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "agv/csm.hpp"
#include "agv/symbolic.hpp"

namespace agv {

/// Contents of a model file. Blocks:
///
///   csm Name { alphabet { a, b } init s0; s0 -a-> s1; s1 -tau-> s0; }
///   property P { ... }            same syntax, must be deterministic
///   symbolic C { alphabet { ... } var x: nat = 0; init l0;
///                l0 -a-> l1 [x > 5] { x := x mod 5; havoc(y) }; }
///   preds Name { x = 0; x > 0; }
///
/// Optional `states { ... }` / `locations { ... }` lines fix the order of
/// states, and `error { ... }` marks error states. `//` starts a comment.
struct Model {
  enum class Kind { csm, property, symbolic, preds };

  std::vector<std::pair<Kind, std::string>> order;  // declaration order
  std::map<std::string, Csm> csms;                  // csm and property blocks
  std::map<std::string, SymbolicComponent> symbolics;
  std::map<std::string, PredicateSet> preds;

  std::optional<Kind> kind_of(const std::string& name) const;
  const Csm& csm(const std::string& name) const;  // csm or property block
  Dfa property(const std::string& name) const;
  // A csm block is wrapped as a program without variables.
  SymbolicComponent symbolic(const std::string& name) const;
  const PredicateSet& predicate_set(const std::string& name) const;

  friend bool operator==(const Model& a, const Model& b);
};

Model parse_model(std::string_view text);
Model load_model(const std::string& path);
std::string print_model(const Model& m);

// One block in model syntax, e.g. to reuse an interface as an assumption.
std::string print_csm_block(const std::string& keyword, const std::string& name, const Csm& m);
std::string print_symbolic_block(const SymbolicComponent& c);
std::string print_preds_block(const std::string& name, const PredicateSet& p);

}  // namespace agv

#endif  // AGV_MODEL_HPP
