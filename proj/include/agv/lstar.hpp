#ifndef AGV_LSTAR_HPP
#define AGV_LSTAR_HPP

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "agv/csm.hpp"

namespace agv {

/// Minimally adequate teacher for an unknown regular language U. Answers
/// must be those of one fixed language; equivalence returns nullopt when the
/// conjecture is accepted, or a string in the symmetric difference.
class Teacher {
 public:
  virtual ~Teacher() = default;
  virtual bool membership(const Trace& word) = 0;
  virtual std::optional<Trace> equivalence(const Dfa& conjecture) = 0;
};

struct LearnEvent {
  enum class Kind { membership, conjecture, counterexample };
  Kind kind;
  Trace word;
  bool answer = false;
  std::size_t states = 0;
  const Dfa* hypothesis = nullptr;  // conjecture and counterexample events only
};

using LearnLog = std::function<void(const LearnEvent&)>;

// Caching front for Teacher::membership; counts distinct queries.
class MembershipOracle {
 public:
  explicit MembershipOracle(Teacher& teacher, LearnLog log = {}) : teacher_(teacher), log_(std::move(log)) {}
  bool operator()(const Trace& word);
  std::size_t queries() const { return queries_; }
  const std::map<Trace, bool>& cache() const { return cache_; }

 private:
  Teacher& teacher_;
  LearnLog log_;
  std::map<Trace, bool> cache_;
  std::size_t queries_ = 0;
};

/// Prefix set S (access strings, pairwise row-distinct), suffix set E, and
/// the membership entries for (S ∪ S·Σ) × E.
class ObservationTable {
 public:
  explicit ObservationTable(const Alphabet& sigma);

  const std::vector<Action>& actions() const { return actions_; }
  const std::vector<Trace>& prefixes() const { return prefixes_; }
  const std::vector<Trace>& suffixes() const { return suffixes_; }

  std::vector<bool> row(const Trace& prefix, MembershipOracle& oracle);
  std::vector<bool> row(const Trace& prefix) const;  // entries must already be known

  // Adds every missing one-letter extension whose row is new, until closed.
  void close(MembershipOracle& oracle);
  bool is_closed() const;
  bool add_suffix(const Trace& suffix, MembershipOracle& oracle);
  void fill(MembershipOracle& oracle);
  std::optional<std::size_t> prefix_with_row(const std::vector<bool>& r) const;

 private:
  bool entry(const Trace& w) const;

  std::vector<Action> actions_;
  std::vector<Trace> prefixes_;
  std::vector<Trace> suffixes_;
  std::map<Trace, bool> entries_;
};

// States are the prefixes of S; accepting iff T(s, ε). The table must be closed.
Dfa make_conjecture(const ObservationTable& table);

// Rivest–Schapire: binary search over cex for a single distinguishing suffix,
// which is added to E. Throws InconsistentTeacher if cex does not separate
// the current conjecture from the membership answers.
void process_counterexample(ObservationTable& table, const Trace& cex, MembershipOracle& oracle);

struct LearnStats {
  std::size_t membership_queries = 0;
  std::size_t equivalence_queries = 0;
  std::size_t incorrect_conjectures = 0;
  std::size_t longest_counterexample = 0;
  std::vector<std::size_t> conjecture_sizes;
};

struct LearnOptions {
  std::size_t max_conjectures = 1000;
  LearnLog log;
};

class Learner {
 public:
  Learner(Teacher& teacher, const Alphabet& sigma, LearnOptions options = {});

  Dfa run();
  const LearnStats& stats() const { return stats_; }
  const ObservationTable& table() const { return table_; }
  const MembershipOracle& oracle() const { return oracle_; }

 private:
  Teacher& teacher_;
  Alphabet sigma_;
  LearnOptions options_;
  MembershipOracle oracle_;
  ObservationTable table_;
  LearnStats stats_;
};

Dfa learn(Teacher& teacher, const Alphabet& sigma, LearnOptions options = {});

}  // namespace agv

#endif  // AGV_LSTAR_HPP
