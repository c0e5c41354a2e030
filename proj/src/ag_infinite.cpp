#include "agv/ag_infinite.hpp"

#include <algorithm>
#include <cmath>

namespace agv {

void validate(const InfTask& task) {
  task.c1.validate();
  task.c2.validate();
  Alphabet both = unite(task.c1.alphabet, task.c2.alphabet);
  Alphabet extra;
  for (const auto& a : task.p.alphabet())
    if (!both.count(a)) extra.insert(a);
  if (!extra.empty()) throw InputError("property actions " + to_string(extra) + " belong to neither component");
}

Alphabet assumption_alphabet(const InfTask& task) {
  return intersect(unite(task.c1.alphabet, task.p.alphabet()), task.c2.alphabet);
}

namespace {

Verdict error_search(std::initializer_list<const Csm*> parts) {
  std::vector<const Csm*> v(parts);
  return find_error(std::span<const Csm* const>(v));
}

Trace observable(const SymbolicComponent& c, const std::vector<std::size_t>& path) {
  Trace t;
  for (std::size_t e : path)
    if (!is_tau(c.edges.at(e).label)) t.push_back(c.edges[e].label);
  return t;
}

// Shortest prefix of path with k observable edges.
std::vector<std::size_t> observable_prefix(const SymbolicComponent& c, const std::vector<std::size_t>& path,
                                           std::size_t k) {
  std::vector<std::size_t> out;
  for (std::size_t e : path) {
    if (k == 0) break;
    out.push_back(e);
    if (!is_tau(c.edges[e].label)) --k;
  }
  return out;
}

PredicateSet difference(const PredicateSet& now, const PredicateSet& before) {
  PredicateSet out;
  for (const auto& f : now)
    if (std::find(before.begin(), before.end(), f) == before.end()) out.push_back(f);
  return out;
}

}  // namespace

InfSession::InfSession(const InfTask& task, const InfOptions& options, InfVerdict& out)
    : task_(task),
      options_(options),
      out_(out),
      solver_(options.solver),
      sigma_(assumption_alphabet(task)),
      perr_(complement_property(task.p).to_csm()),
      preds1_(task.preds1),
      preds2_(task.preds2),
      rng_(options.seed) {}

const Abstraction& InfSession::may1() {
  if (!may1_) may1_ = abstract_may(task_.c1, preds1_, solver_);
  return *may1_;
}

const Abstraction& InfSession::may2() {
  if (!may2_) may2_ = abstract_may(task_.c2, preds2_, solver_);
  return *may2_;
}

void InfSession::refine1(const std::string& phase, const Counterexample& c, const std::vector<std::size_t>& path,
                         std::size_t at) {
  PredicateSet next = refine(task_.c1, preds1_, path, at, solver_);
  out_.refinements.push_back({1, phase, c.trace, at, difference(next, preds1_)});
  preds1_ = std::move(next);
  may1_.reset();
  recheck();
}

void InfSession::refine2(const std::string& phase, const Counterexample& c, const std::vector<std::size_t>& path,
                         std::size_t at) {
  PredicateSet next = refine(task_.c2, preds2_, path, at, solver_);
  out_.refinements.push_back({2, phase, c.trace, at, difference(next, preds2_)});
  preds2_ = std::move(next);
  may2_.reset();
  recheck();
}

// Answers given to the learner must survive refinement. Re-ask a sample;
// nested refinements during the sample do not start another one.
void InfSession::recheck() {
  if (rechecking_ || answered_.empty() || options_.recheck_fraction <= 0) return;
  rechecking_ = true;
  std::vector<std::pair<Trace, bool>> all(answered_.begin(), answered_.end());
  std::shuffle(all.begin(), all.end(), rng_);
  auto k = static_cast<std::size_t>(std::ceil(options_.recheck_fraction * static_cast<double>(all.size())));
  all.resize(std::min(k, all.size()));
  for (const auto& [s, before] : all) {
    ++out_.rechecks;
    if (membership(s) != before) ++out_.recheck_inconsistencies;
  }
  rechecking_ = false;
}

bool InfSession::membership(const Trace& s) {
  ++out_.membership_queries;
  Csm t = trace_csm(s, sigma_);
  for (std::size_t round = 0;; ++round) {
    const Abstraction& m = may1();
    auto v = error_search({&t, &m.csm, &perr_});
    if (v.safe()) {
      answered_[s] = true;
      return true;
    }
    auto path = edge_path(*v.cex, 1, m.csm);
    auto sim = simulate_symbolic(task_.c1, path, solver_);
    if (sim.feasible) {
      failure_path_ = path;
      answered_[s] = false;
      return false;
    }
    if (round >= options_.max_refinements)
      throw ResourceError("membership query " + to_string(s) + " needed more than " +
                          std::to_string(options_.max_refinements) + " refinements");
    refine1("membership", *v.cex, path, sim.prefix);
  }
}

InfSession::Outcome InfSession::check_conjecture(const Dfa& a) {
  InfIteration it;
  it.conjecture = out_.log.size() + 1;
  it.states = assumption_states(a);
  auto done = [&](Outcome o, const char* what) {
    it.outcome = what;
    out_.log.push_back(it);
    return o;
  };

  Csm am = a.accepting_part();
restart:
  for (std::size_t round = 0;; ++round) {
    const Abstraction& m1 = may1();
    auto v = error_search({&am, &m1.csm, &perr_});
    if (v.safe()) break;
    auto path = edge_path(*v.cex, 1, m1.csm);
    auto sim = simulate_symbolic(task_.c1, path, solver_);
    if (sim.feasible) {
      it.premise1_cex = v.cex->trace;
      return done({Outcome::Kind::refine_assumption, project_trace(v.cex->trace, sigma_)}, "refine");
    }
    if (round >= options_.max_refinements)
      throw ResourceError("premise 1 needed more than " + std::to_string(options_.max_refinements) + " refinements");
    refine1("premise1", *v.cex, path, sim.prefix);
  }

  // A refinement of M1 during premise 2 sends us back to premise 1, even
  // though exact membership answers should make that redundant.
  Csm aerr = complement_property(a).to_csm();
  for (std::size_t round = 0;; ++round) {
    const Abstraction& m2 = may2();
    auto v = error_search({&m2.csm, &aerr});
    if (v.safe()) return done({Outcome::Kind::holds, {}}, "holds");
    auto path = edge_path(*v.cex, 0, m2.csm);
    auto sim = simulate_symbolic(task_.c2, path, solver_);
    if (!sim.feasible) {
      if (round >= options_.max_refinements)
        throw ResourceError("premise 2 needed more than " + std::to_string(options_.max_refinements) +
                            " refinements");
      refine2("premise2", *v.cex, path, sim.prefix);
      continue;
    }
    it.premise2_cex = v.cex->trace;
    Trace t = project_trace(v.cex->trace, sigma_);
    std::size_t before = out_.refinements.size();
    bool ok = membership(t);
    bool m1_refined = false;
    for (std::size_t i = before; i < out_.refinements.size(); ++i) m1_refined |= out_.refinements[i].component == 1;
    if (m1_refined) {
      ++it.restarts;
      goto restart;
    }
    if (ok) return done({Outcome::Kind::refine_assumption, t}, "refine");
    m2_path_ = path;
    return done({Outcome::Kind::violated, v.cex->trace}, "violated");
  }
}

InfCounterexample InfSession::realize_violation(const Trace& assumption_trace, const std::vector<std::size_t>& m1_path,
                                                const std::vector<std::size_t>& m2_path) {
  Trace u1 = observable(task_.c1, m1_path);
  Trace u2 = observable(task_.c2, m2_path);
  Csm g1 = trace_csm(u1, task_.c1.alphabet);
  Csm g2 = trace_csm(u2, task_.c2.alphabet);
  Csm ga = trace_csm(assumption_trace, sigma_);
  auto v = error_search({&g1, &g2, &ga, &perr_});
  if (!v.cex) throw InternalError("violation through " + to_string(assumption_trace) + " could not be realized");
  InfCounterexample c;
  c.trace = v.cex->trace;
  c.path1 = observable_prefix(task_.c1, m1_path, project_trace(c.trace, task_.c1.alphabet).size());
  c.path2 = observable_prefix(task_.c2, m2_path, project_trace(c.trace, task_.c2.alphabet).size());
  return c;
}

namespace {

class InfTeacher final : public Teacher {
 public:
  explicit InfTeacher(InfSession& s) : s_(s) {}

  bool membership(const Trace& w) override { return s_.membership(w); }

  std::optional<Trace> equivalence(const Dfa& a) override {
    auto o = s_.check_conjecture(a);
    switch (o.kind) {
      case InfSession::Outcome::Kind::holds:
        return std::nullopt;
      case InfSession::Outcome::Kind::refine_assumption:
        return o.trace;
      case InfSession::Outcome::Kind::violated:
        violation_ = o.trace;
        return std::nullopt;
    }
    return std::nullopt;
  }

  const std::optional<Trace>& violation() const { return violation_; }

 private:
  InfSession& s_;
  std::optional<Trace> violation_;
};

}  // namespace

InfVerdict verify_infinite(const InfTask& task, const InfOptions& options) {
  validate(task);
  InfVerdict v;
  InfSession session(task, options, v);
  Alphabet sigma = assumption_alphabet(task);
  try {
    if (!session.membership({})) {
      v.status = InfVerdict::Status::violated;
      v.cex = session.realize_violation({}, session.last_failure_path(), {});
    } else {
      InfTeacher teacher(session);
      Learner learner(teacher, sigma, LearnOptions{options.max_conjectures, options.learn_log});
      Dfa result = learner.run();
      v.stats = learner.stats();
      if (teacher.violation()) {
        v.status = InfVerdict::Status::violated;
        v.cex = session.realize_violation(project_trace(*teacher.violation(), sigma), session.last_failure_path(),
                                          session.last_m2_path());
      } else {
        v.status = InfVerdict::Status::holds;
        v.assumption = result;
      }
    }
  } catch (const ResourceError& e) {
    v.status = InfVerdict::Status::resource;
    v.reason = std::string(e.what()) + " (predicates: " + std::to_string(session.preds1().size()) + " for " +
               task.c1.name + ", " + std::to_string(session.preds2().size()) + " for " + task.c2.name +
               "; conjectures so far: " + std::to_string(v.log.size()) + ")";
  }
  v.preds1 = session.preds1();
  v.preds2 = session.preds2();
  return v;
}

bool confirm_violation(const InfTask& task, const InfCounterexample& cex, Solver& solver) {
  if (!simulate_symbolic(task.c1, cex.path1, solver).feasible) return false;
  if (!simulate_symbolic(task.c2, cex.path2, solver).feasible) return false;
  if (observable(task.c1, cex.path1) != project_trace(cex.trace, task.c1.alphabet)) return false;
  if (observable(task.c2, cex.path2) != project_trace(cex.trace, task.c2.alphabet)) return false;
  Dfa perr = complement_property(task.p);
  return perr.is_error(perr.run(project_trace(cex.trace, task.p.alphabet())));
}

}  // namespace agv
