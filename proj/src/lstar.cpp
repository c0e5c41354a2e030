#include "agv/lstar.hpp"

#include <algorithm>

namespace agv {

namespace {

Trace concat(const Trace& a, const Trace& b) {
  Trace r = a;
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

Trace extend(const Trace& a, const Action& x) {
  Trace r = a;
  r.push_back(x);
  return r;
}

}  // namespace

bool MembershipOracle::operator()(const Trace& word) {
  auto it = cache_.find(word);
  if (it != cache_.end()) return it->second;
  bool answer = teacher_.membership(word);
  ++queries_;
  cache_.emplace(word, answer);
  if (log_) log_(LearnEvent{LearnEvent::Kind::membership, word, answer, 0});
  return answer;
}

ObservationTable::ObservationTable(const Alphabet& sigma)
    : actions_(sigma.begin(), sigma.end()), prefixes_{Trace{}}, suffixes_{Trace{}} {}

bool ObservationTable::entry(const Trace& w) const {
  auto it = entries_.find(w);
  if (it == entries_.end()) throw InternalError("observation table entry missing for " + to_string(w));
  return it->second;
}

std::vector<bool> ObservationTable::row(const Trace& prefix, MembershipOracle& oracle) {
  std::vector<bool> r;
  r.reserve(suffixes_.size());
  for (const auto& e : suffixes_) {
    auto w = concat(prefix, e);
    auto it = entries_.find(w);
    if (it == entries_.end()) it = entries_.emplace(w, oracle(w)).first;
    r.push_back(it->second);
  }
  return r;
}

std::vector<bool> ObservationTable::row(const Trace& prefix) const {
  std::vector<bool> r;
  r.reserve(suffixes_.size());
  for (const auto& e : suffixes_) r.push_back(entry(concat(prefix, e)));
  return r;
}

void ObservationTable::fill(MembershipOracle& oracle) {
  for (std::size_t i = 0; i < prefixes_.size(); ++i) {
    Trace s = prefixes_[i];
    row(s, oracle);
    for (const auto& a : actions_) row(extend(s, a), oracle);
  }
}

std::optional<std::size_t> ObservationTable::prefix_with_row(const std::vector<bool>& r) const {
  for (std::size_t i = 0; i < prefixes_.size(); ++i)
    if (row(prefixes_[i]) == r) return i;
  return std::nullopt;
}

void ObservationTable::close(MembershipOracle& oracle) {
  fill(oracle);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < prefixes_.size() && !changed; ++i) {
      for (const auto& a : actions_) {
        auto ext = extend(prefixes_[i], a);
        if (!prefix_with_row(row(ext, oracle))) {
          prefixes_.push_back(ext);
          fill(oracle);
          changed = true;
          break;
        }
      }
    }
  }
}

bool ObservationTable::is_closed() const {
  for (const auto& s : prefixes_)
    for (const auto& a : actions_) {
      auto ext = extend(s, a);
      for (const auto& e : suffixes_)
        if (!entries_.count(concat(ext, e))) return false;
      if (!prefix_with_row(row(ext))) return false;
    }
  return true;
}

bool ObservationTable::add_suffix(const Trace& suffix, MembershipOracle& oracle) {
  if (std::find(suffixes_.begin(), suffixes_.end(), suffix) != suffixes_.end()) return false;
  suffixes_.push_back(suffix);
  fill(oracle);
  return true;
}

Dfa make_conjecture(const ObservationTable& table) {
  if (!table.is_closed()) throw InternalError("conjecture requested from a table that is not closed");
  const auto& prefixes = table.prefixes();
  const auto& actions = table.actions();
  Dfa d(Alphabet(actions.begin(), actions.end()), prefixes.size());
  for (std::size_t i = 0; i < prefixes.size(); ++i) {
    auto s = static_cast<StateId>(i);
    d.set_accepting(s, table.row(prefixes[i])[0]);
    for (std::size_t a = 0; a < actions.size(); ++a) {
      auto target = table.prefix_with_row(table.row(extend(prefixes[i], actions[a])));
      d.set_next(s, a, static_cast<StateId>(*target));
    }
  }
  d.set_initial(0);
  return d;
}

void process_counterexample(ObservationTable& table, const Trace& cex, MembershipOracle& oracle) {
  const Dfa hyp = make_conjecture(table);
  const std::size_t m = cex.size();

  // alpha(i): membership of access(state after cex[0..i)) . cex[i..m)
  auto alpha = [&](std::size_t i) {
    StateId s = hyp.initial();
    for (std::size_t j = 0; j < i; ++j) s = hyp.next(s, cex[j]);
    Trace w = table.prefixes()[s];
    w.insert(w.end(), cex.begin() + static_cast<std::ptrdiff_t>(i), cex.end());
    return oracle(w);
  };

  bool lo_val = alpha(0);
  bool hi_val = hyp.accepts(cex);
  if (lo_val == hi_val)
    throw InconsistentTeacher("counterexample " + to_string(cex) + " is not distinguishing: membership says " +
                              (lo_val ? "accept" : "reject") + " and so does the conjecture");
  std::size_t lo = 0, hi = m;
  while (hi - lo > 1) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (alpha(mid) == lo_val)
      lo = mid;
    else
      hi = mid;
  }
  Trace suffix(cex.begin() + static_cast<std::ptrdiff_t>(hi), cex.end());
  if (!table.add_suffix(suffix, oracle))
    throw InconsistentTeacher("suffix " + to_string(suffix) + " from counterexample " + to_string(cex) +
                              " is already in the table; membership answers contradict earlier ones");
}

Learner::Learner(Teacher& teacher, const Alphabet& sigma, LearnOptions options)
    : teacher_(teacher), sigma_(sigma), options_(std::move(options)), oracle_(teacher, options_.log),
      table_(sigma) {}

Dfa Learner::run() {
  table_.close(oracle_);
  while (true) {
    Dfa hyp = make_conjecture(table_);
    stats_.conjecture_sizes.push_back(hyp.size());
    stats_.membership_queries = oracle_.queries();
    if (options_.log) options_.log(LearnEvent{LearnEvent::Kind::conjecture, {}, false, hyp.size(), &hyp});
    if (stats_.conjecture_sizes.size() > options_.max_conjectures)
      throw ResourceError("learning exceeded " + std::to_string(options_.max_conjectures) + " conjectures");
    ++stats_.equivalence_queries;
    auto cex = teacher_.equivalence(hyp);
    if (!cex) {
      stats_.membership_queries = oracle_.queries();
      return hyp;
    }
    for (const auto& a : *cex)
      if (!sigma_.count(a))
        throw InconsistentTeacher("counterexample " + to_string(*cex) + " uses action '" + a +
                                  "' outside the learning alphabet");
    if (options_.log) options_.log(LearnEvent{LearnEvent::Kind::counterexample, *cex, false, hyp.size(), &hyp});
    ++stats_.incorrect_conjectures;
    stats_.longest_counterexample = std::max(stats_.longest_counterexample, cex->size());
    process_counterexample(table_, *cex, oracle_);
    table_.close(oracle_);
    if (table_.prefixes().size() <= hyp.size())
      throw InconsistentTeacher("counterexample " + to_string(*cex) + " did not add a state");
  }
}

Dfa learn(Teacher& teacher, const Alphabet& sigma, LearnOptions options) {
  Learner l(teacher, sigma, std::move(options));
  return l.run();
}

}  // namespace agv
