#ifndef AGV_INTERFACE_GEN_HPP
#define AGV_INTERFACE_GEN_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "agv/ag_infinite.hpp"
#include "agv/csm.hpp"
#include "agv/lstar.hpp"
#include "agv/symbolic.hpp"

namespace agv {

// Interface of a component over sigma: the strings C can perform (other
// actions hidden) along which no run of C reaches an error location.
struct IfaceTask {
  SymbolicComponent c;
  Alphabet sigma;
  PredicateSet preds;
};

// sigma ⊆ alpha(C), no tau, error locations without outgoing edges.
void validate(const IfaceTask& task);

struct IfaceOptions {
  std::size_t max_conjectures = 1000;
  std::size_t max_refinements = 50;
  std::size_t max_subset_states = 1u << 14;
  SolverOptions solver;
  LearnLog learn_log;
};

struct IfaceIteration {
  std::size_t conjecture = 0;
  std::size_t states = 0;
  std::string check;  // "safety", "executable", "permissive" or "" when accepted
  std::optional<Trace> cex;
};

struct IfaceResult {
  enum class Status { ok, resource };
  Status status = Status::resource;
  Dfa interface;
  PredicateSet preds;  // final
  bool determinized = false;  // det(must) needed the subset construction
  std::string warning;
  std::string reason;
  std::vector<IfaceIteration> log;
  std::vector<RefinementRecord> refinements;  // phase: membership, safety, executable, must
  LearnStats stats;
  std::size_t membership_queries = 0;

  bool ok() const { return status == Status::ok; }
};

class IfaceSession {
 public:
  IfaceSession(const IfaceTask& task, const IfaceOptions& options, IfaceResult& out);

  bool membership(const Trace& s);
  // A feasible edge path of C along s that ends in an error location.
  std::optional<std::vector<std::size_t>> error_path(const Trace& s, const std::string& phase = "membership");

  // nullopt when a accepts only strings that cannot reach error.
  std::optional<Trace> safety_check(const Dfa& a);
  // A string a accepts that even the may abstraction cannot perform.
  std::optional<Trace> executable_check(const Dfa& a);
  // A safe string of C that a rejects. Must discrepancies are refined away.
  std::optional<Trace> permissiveness_check(const Dfa& a);

  const PredicateSet& preds() const { return preds_; }

 private:
  const Abstraction& may();
  void refine_may(const std::string& phase, const Trace& t, const std::vector<std::size_t>& path, std::size_t at);
  void refine_must(const Trace& t, const std::vector<std::size_t>& error_path);

  const IfaceTask& task_;
  IfaceOptions options_;
  IfaceResult& out_;
  Solver solver_;
  PredicateSet preds_;
  std::optional<Abstraction> may_;
};

IfaceResult gen_interface(const IfaceTask& task, const IfaceOptions& options = {});

}  // namespace agv

#endif  // AGV_INTERFACE_GEN_HPP
