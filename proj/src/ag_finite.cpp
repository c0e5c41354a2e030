#include "agv/ag_finite.hpp"

namespace agv {

namespace {

Verdict error_search(std::initializer_list<const Csm*> parts) {
  std::vector<const Csm*> v(parts);
  return find_error(std::span<const Csm* const>(v));
}

class AgTeacher final : public Teacher {
 public:
  AgTeacher(const AgTask& task, AgVerdict& verdict)
      : task_(task), verdict_(verdict), sigma_(assumption_alphabet(task)) {}

  bool membership(const Trace& s) override { return teacher_membership(task_, s); }

  std::optional<Trace> equivalence(const Dfa& a) override {
    AgIteration it;
    it.conjecture = verdict_.log.size() + 1;
    it.states = assumption_states(a);
    if (auto c1 = check_premise1(a, task_)) {
      it.premise1_cex = c1->trace;
      it.outcome = "refine";
      verdict_.log.push_back(it);
      return project_trace(c1->trace, sigma_);
    }
    auto c2 = check_premise2(a, task_);
    if (!c2) {
      it.outcome = "holds";
      verdict_.log.push_back(it);
      verdict_.holds = true;
      verdict_.assumption = a;
      return std::nullopt;
    }
    it.premise2_cex = c2->trace;
    auto analysis = analyze_cex(task_, c2->trace);
    if (analysis.kind == CexAnalysis::Kind::refine_assumption) {
      it.outcome = "refine";
      verdict_.log.push_back(it);
      return analysis.trace;
    }
    it.outcome = "violated";
    verdict_.log.push_back(it);
    violation_ = c2->trace;
    return std::nullopt;
  }

  const std::optional<Trace>& violation() const { return violation_; }

 private:
  const AgTask& task_;
  AgVerdict& verdict_;
  Alphabet sigma_;
  std::optional<Trace> violation_;
};

// Full witness on M1 ∥ M2 ∥ P_err whose M2 part follows m2_trace.
Counterexample realize_violation(const AgTask& task, const Trace& m2_trace) {
  Csm perr = complement_property(task.p).to_csm();
  Csm guide = trace_csm(m2_trace, task.m2.alphabet());
  auto v = error_search({&task.m1, &task.m2, &perr, &guide});
  if (!v.cex) throw InternalError("violation through " + to_string(m2_trace) + " could not be realized");
  // Drop the guide component from the step records.
  for (auto& st : v.cex->path) st.moves.resize(3);
  for (auto& s : v.cex->states) s.resize(3);
  return *v.cex;
}

}  // namespace

void validate(const AgTask& task) {
  Alphabet both = unite(task.m1.alphabet(), task.m2.alphabet());
  Alphabet extra;
  for (const auto& a : task.p.alphabet())
    if (!both.count(a)) extra.insert(a);
  if (!extra.empty())
    throw InputError("property actions " + to_string(extra) + " belong to neither component");
}

Alphabet assumption_alphabet(const AgTask& task) {
  return intersect(unite(task.m1.alphabet(), task.p.alphabet()), task.m2.alphabet());
}

bool teacher_membership(const AgTask& task, const Trace& s) {
  Csm perr = complement_property(task.p).to_csm();
  Csm t = trace_csm(s, assumption_alphabet(task));
  return error_search({&t, &task.m1, &perr}).safe();
}

std::optional<Counterexample> check_premise1(const Dfa& a, const AgTask& task) {
  Csm perr = complement_property(task.p).to_csm();
  Csm am = a.accepting_part();
  return error_search({&am, &task.m1, &perr}).cex;
}

std::optional<Counterexample> check_premise2(const Dfa& a, const AgTask& task) {
  Csm aerr = complement_property(a).to_csm();
  return error_search({&task.m2, &aerr}).cex;
}

CexAnalysis analyze_cex(const AgTask& task, const Trace& c) {
  Trace proj = project_trace(c, assumption_alphabet(task));
  if (teacher_membership(task, proj)) return {CexAnalysis::Kind::refine_assumption, proj};
  return {CexAnalysis::Kind::real_violation, c};
}

Verdict check_monolithic(const AgTask& task) {
  Csm perr = complement_property(task.p).to_csm();
  return error_search({&task.m1, &task.m2, &perr});
}

std::size_t assumption_states(const Dfa& a) {
  std::size_t n = a.accepting_count();
  return a.is_accepting(a.initial()) ? n : n + 1;
}

AgVerdict verify_compositional(const AgTask& task, const AgOptions& options) {
  validate(task);
  AgVerdict verdict;
  // If M1 fails even in the empty context there is nothing to learn, and an
  // assumption would have to exclude the empty trace.
  if (!teacher_membership(task, {})) {
    verdict.cex = realize_violation(task, {});
    return verdict;
  }
  AgTeacher teacher(task, verdict);
  Learner learner(teacher, assumption_alphabet(task), LearnOptions{options.max_conjectures, options.learn_log});
  Dfa result = learner.run();
  verdict.stats = learner.stats();
  verdict.iterations = verdict.stats.conjecture_sizes.size();
  if (teacher.violation()) {
    verdict.holds = false;
    verdict.cex = realize_violation(task, *teacher.violation());
  } else {
    verdict.assumption = result;
  }
  return verdict;
}

Dfa build_weakest_assumption(const Csm& m1, const Dfa& p, const Alphabet& sigma) {
  Csm perr = complement_property(p).to_csm();
  Csm prod = compose(m1, perr);
  // Actions of sigma that neither machine knows are unconstrained.
  Alphabet missing;
  for (const auto& a : sigma)
    if (!prod.alphabet().count(a)) missing.insert(a);
  if (!missing.empty()) {
    Csm wide(unite(prod.alphabet(), missing));
    for (StateId s = 0; s < prod.size(); ++s) wide.add_state(prod.name(s), prod.is_error(s));
    for (const auto& t : prod.transitions()) wide.add_transition(t.from, t.label, t.to);
    for (StateId s = 0; s < prod.size(); ++s)
      for (const auto& a : missing) wide.add_transition(s, a, s);
    wide.set_initial(prod.initial());
    prod = std::move(wide);
  }
  Dfa d = determinize(project_csm(prod, sigma));
  // Error subsets become an absorbing rejecting region; the empty subset
  // (M1 refuses the string) accepts everything from there on.
  Dfa w(d.alphabet(), d.size());
  for (StateId s = 0; s < d.size(); ++s) {
    w.set_accepting(s, !d.is_error(s));
    for (std::size_t a = 0; a < d.actions().size(); ++a) w.set_next(s, a, d.is_error(s) ? s : d.next(s, a));
  }
  w.set_initial(d.initial());
  return minimize(w);
}

}  // namespace agv
