// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <unistd.h>

#include "agv/ag_finite.hpp"
#include "agv/ag_infinite.hpp"
#include "agv/bounded.hpp"
#include "agv/interface_gen.hpp"
#include "agv/lstar.hpp"
#include "agv/model.hpp"
#include "cli.hpp"
#include "support.hpp"

using namespace agv;
using namespace fixture;
using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

std::string corpus(const std::string& f) { return std::string(AGV_CORPUS_DIR) + "/" + f; }

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (!pass) detail << "; ";
      else detail.str("");
      pass = false;
      detail << what;
    }
  }
};

// Every infinite-state run feeds criterion 8.
std::size_t total_rechecks = 0, total_inconsistencies = 0, infinite_runs = 0;

InfVerdict run_infinite(const InfTask& t, const InfOptions& o = {}) {
  InfVerdict v = verify_infinite(t, o);
  total_rechecks += v.rechecks;
  total_inconsistencies += v.recheck_inconsistencies;
  ++infinite_runs;
  return v;
}

InfTask corpus_task(const std::string& file) {
  Model m = load_model(corpus(file));
  return {m.symbolic("Sender"), m.symbolic("Receiver"), m.property("InOut"), m.predicate_set("initial"), {}};
}

Outcome criterion1() {
  Outcome o;
  auto start = Clock::now();
  auto report = std::filesystem::temp_directory_path() / ("agv_acceptance_" + std::to_string(::getpid()) + ".json");
  std::ostringstream out, err;
  int code = cli::run({"check", corpus("finprotocol.agv"), "Sender", "Receiver", "InOut", "--report", report.string()},
                      out, err);
  double secs = seconds_since(start);
  o.require(code == 0, "exit code " + std::to_string(code));
  std::ifstream in(report);
  json r = json::parse(in);
  std::filesystem::remove(report);
  o.require(r["verdict"] == "holds", "verdict " + r["verdict"].dump());
  o.require(r["assumption"]["states"] == 2, "assumption states " + r["assumption"]["states"].dump());
  o.require(r["assumption"]["alphabet"] == json::array({"ack", "out", "send"}), "alphabet");
  o.require(r["iterations"].size() <= 2, "conjectures " + std::to_string(r["iterations"].size()));
  o.require(secs < 1.0, "runtime " + std::to_string(secs));
  if (o.pass)
    o.detail << "holds, 2-state assumption over {ack, out, send}, " << r["iterations"].size() << " conjectures, "
             << secs << " s";
  return o;
}

Outcome criterion2() {
  Outcome o;
  auto start = Clock::now();
  InfTask t = corpus_task("infprotocol.agv");
  InfVerdict v = run_infinite(t);
  double secs = seconds_since(start);
  o.require(v.holds(), "verdict is not holds");
  o.require(!v.refinements.empty(), "no refinement");
  if (!v.refinements.empty()) {
    const auto& r = v.refinements.front();
    bool spurious_invalid = std::find(r.trace.begin(), r.trace.end(), "sendInvalid") != r.trace.end();
    o.require(spurious_invalid, "first spurious counterexample " + to_string(r.trace));
    // in, read, mod, sendInvalid: the guard x > 5 cannot hold after the mod
    o.require(r.infeasible_at == 4, "infeasible at " + std::to_string(r.infeasible_at));
    Solver s;
    auto nat = t.c1.naturals();
    std::vector<Formula> expect{parse_formula("x > 5"), parse_formula("x <= 5")};
    std::vector<bool> covered(expect.size());
    for (const auto& f : r.added) {
      bool match = false;
      for (std::size_t i = 0; i < expect.size(); ++i)
        if (s.valid(Formula::land({Formula::implies(f, expect[i]), Formula::implies(expect[i], f)}), nat)) {
          match = true;
          covered[i] = true;
        }
      o.require(match, "unexpected predicate " + f.to_string());
    }
    o.require(covered[0] && covered[1], "added predicates do not cover x > 5 and x <= 5");
  }
  o.require(v.refinements.size() == 1, std::to_string(v.refinements.size()) + " refinements");
  Alphabet a = v.holds() ? v.assumption.alphabet() : Alphabet{};
  o.require(a.count("sendValid") && a.count("sendInvalid") && !a.count("send"), "assumption alphabet " + to_string(a));
  o.require(secs < 5.0, "runtime " + std::to_string(secs));
  if (o.pass)
    o.detail << "spurious " << to_string(v.refinements[0].trace) << " infeasible at step 4, added x > 5 and x <= 5, holds over "
             << to_string(a) << ", " << secs << " s";
  return o;
}

bool replays_to_error(const std::vector<const Csm*>& parts, const Trace& t) {
  Csm c = *parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) c = compose(c, *parts[i]);
  auto states = naive_run(c, t);
  return std::any_of(states.begin(), states.end(), [&](StateId s) { return c.is_error(s); });
}

AgTask random_task(std::mt19937& rng) {
  Alphabet all = letters(1 + rng() % 4);
  Alphabet a1 = random_subset(rng, all);
  Alphabet a2 = random_subset(rng, all);
  Alphabet ap = random_subset(rng, unite(a1, a2));
  return {random_csm(rng, 5, a1, 0.15, 0.45), random_csm(rng, 5, a2, 0.15, 0.45),
          Dfa::from_csm(random_deterministic_csm(rng, 3, ap, 0.7))};
}

Outcome criterion3() {
  Outcome o;
  auto start = Clock::now();
  std::mt19937 rng(300);
  int discrepancies = 0, bad_cex = 0, holds = 0;
  for (int i = 0; i < 300; ++i) {
    AgTask t = random_task(rng);
    Csm perr = complement_property(t.p).to_csm();
    bool mono = !naive_error_reachable({&t.m1, &t.m2, &perr});
    AgVerdict v = verify_compositional(t);
    if (v.holds != mono) ++discrepancies;
    if (v.holds) ++holds;
    if (!v.holds && (!v.cex || !replays_to_error({&t.m1, &t.m2, &perr}, v.cex->trace))) ++bad_cex;
  }
  double secs = seconds_since(start);
  o.require(discrepancies == 0, std::to_string(discrepancies) + " discrepancies");
  o.require(bad_cex == 0, std::to_string(bad_cex) + " counterexamples do not replay");
  o.require(secs < 60.0, "runtime " + std::to_string(secs));
  if (o.pass)
    o.detail << "300 tasks (" << holds << " hold, " << 300 - holds << " violated), 0 discrepancies, " << secs << " s";
  return o;
}

Outcome criterion4() {
  Outcome o;
  Model m = load_model(corpus("symbolic_suite.agv"));
  o.require(m.symbolics.size() == 10, std::to_string(m.symbolics.size()) + " models");
  Solver s;
  int violations = 0;
  std::size_t checked = 0;
  for (const auto& [name, c] : m.symbolics) {
    auto concrete = bounded_language(c, 6, 20);
    for (const PredicateSet& preds : {PredicateSet{}, guard_predicates(c)}) {
      if (preds.size() > max_predicates) continue;
      auto must = bounded_language(abstract_must(c, preds, s).csm, 6);
      auto may = bounded_language(abstract_may(c, preds, s).csm, 6);
      for (const auto& t : must) violations += !concrete.count(t);
      for (const auto& t : concrete) violations += !may.count(t);
      checked += must.size() + concrete.size();
    }
  }
  o.require(violations == 0, std::to_string(violations) + " violations");
  if (o.pass) o.detail << "10 models, " << checked << " trace inclusions checked at depth 6, havoc bound 20";
  return o;
}

class DfaTeacher : public Teacher {
 public:
  explicit DfaTeacher(Dfa target) : target_(std::move(target)) {}
  bool membership(const Trace& w) override { return target_.accepts(w); }
  std::optional<Trace> equivalence(const Dfa& c) override { return distinguishing_trace(target_, c); }

 private:
  Dfa target_;
};

Outcome criterion5() {
  Outcome o;
  std::mt19937 rng(505);
  int wrong = 0, not_minimal = 0, too_many_conjectures = 0, too_many_queries = 0;
  for (int i = 0; i < 200; ++i) {
    Alphabet sigma = letters(1 + rng() % 3);
    Dfa target = random_dfa(rng, 6, sigma);
    DfaTeacher t(target);
    Learner l(t, sigma);
    Dfa d = l.run();
    const auto& st = l.stats();
    std::size_t n = naive_minimal_size(target);
    for (const auto& w : all_strings(sigma, 7))
      if (d.accepts(w) != target.accepts(w)) {
        ++wrong;
        break;
      }
    if (d.size() != n) ++not_minimal;
    if (st.incorrect_conjectures > n - 1) ++too_many_conjectures;
    double k = static_cast<double>(sigma.size());
    double m = static_cast<double>(std::max<std::size_t>(st.longest_counterexample, 2));
    double nn = static_cast<double>(n);
    if (static_cast<double>(st.membership_queries) > 4 * (k * nn * nn + nn * std::log2(m))) ++too_many_queries;
  }
  o.require(wrong == 0, std::to_string(wrong) + " wrong languages");
  o.require(not_minimal == 0, std::to_string(not_minimal) + " non-minimal results");
  o.require(too_many_conjectures == 0, std::to_string(too_many_conjectures) + " runs over n-1 incorrect conjectures");
  o.require(too_many_queries == 0, std::to_string(too_many_queries) + " runs over the query bound");
  if (o.pass) o.detail << "200 targets learned exactly and minimally within the conjecture and query bounds";
  return o;
}

Outcome criterion6() {
  Outcome o;
  std::mt19937 rng(606);
  int discrepancies = 0, safe_envs = 0;
  for (int i = 0; i < 50; ++i) {
    AgTask t = random_task(rng);
    Alphabet sigma = assumption_alphabet(t);
    Dfa aw = build_weakest_assumption(t.m1, t.p, sigma);
    Csm perr = complement_property(t.p).to_csm();
    Csm aw_err = complement_property(aw).to_csm();
    for (int e = 0; e < 50; ++e) {
      Csm env = random_csm(rng, 4, sigma, 0.1, 0.5);
      bool system_ok = !naive_error_reachable({&t.m1, &env, &perr});
      bool env_ok = !naive_error_reachable({&env, &aw_err});
      discrepancies += system_ok != env_ok;
      safe_envs += system_ok;
    }
  }
  o.require(discrepancies == 0, std::to_string(discrepancies) + " discrepancies");
  if (o.pass) o.detail << "2500 environments (" << safe_envs << " safe), 0 discrepancies";
  return o;
}

Outcome criterion7() {
  Outcome o;
  Model sender = load_model(corpus("ifacesender.agv"));
  Model nondet = load_model(corpus("nondet.agv"));
  Model suite = load_model(corpus("symbolic_suite.agv"));
  Solver s;
  struct Case {
    std::string label;
    IfaceTask task;
  };
  std::vector<Case> cases{
      {"Sender/{in,ack}", {sender.symbolic("Sender"), {"in", "ack"}, sender.predicate_set("initial")}},
      {"Sender/all", {sender.symbolic("Sender"), sender.symbolic("Sender").alphabet, {}}},
      {"M/{a,b}", {nondet.symbolic("M"), {"a", "b"}, {}}},
  };
  for (const auto& [name, c] : suite.symbolics) cases.push_back({name, {c, c.alphabet, guard_predicates(c)}});
  std::size_t deterministic = 0;
  for (const auto& [label, task] : cases) {
    IfaceResult r = gen_interface(task);
    o.require(r.ok(), label + ": " + r.reason);
    if (!r.ok()) continue;
    auto b = check_interface_bounded(task.c, task.sigma, r.interface, 8, 20);
    o.require(b.ok(), label + ": bounded oracle disagrees");
    if (task.sigma == task.c.alphabet && is_observationally_deterministic(task.c, s)) {
      ++deterministic;
      o.require(!r.determinized, label + ": determinized although observationally deterministic");
    }
    if (label == "Sender/{in,ack}") o.require(assumption_states(r.interface) == 2, "Sender interface size");
  }
  // Components without error locations skip learning; still exercise the
  // must side of each deterministic one.
  for (const auto& [name, c] : suite.symbolics) {
    if (!is_observationally_deterministic(c, s)) continue;
    IfaceTask t{c, c.alphabet, guard_predicates(c)};
    IfaceResult r;
    IfaceSession session(t, {}, r);
    Dfa all(c.alphabet, 1);
    all.set_accepting(0);
    for (std::size_t a = 0; a < c.alphabet.size(); ++a) all.set_next(0, a, 0);
    session.permissiveness_check(all);
    o.require(!r.determinized, name + ": must abstraction determinized");
  }
  // The blocked string a b may end in error after the hidden c.
  IfaceTask fig{nondet.symbolic("M"), {"a", "b"}, {}};
  IfaceResult scratch;
  IfaceSession session(fig, {}, scratch);
  auto cex = session.permissiveness_check(Dfa::from_csm(nondet.csm("Blocking")));
  o.require(!cex, "false permissiveness counterexample " + (cex ? to_string(*cex) : std::string()));
  if (o.pass)
    o.detail << cases.size() << " interfaces safe and permissive at depth 8, havoc bound 20; " << deterministic
             << " deterministic components never determinized; blocking <a, b> accepted as permissive";
  return o;
}

Outcome criterion8() {
  Outcome o;
  // More infinite-state runs on top of those above.
  run_infinite(corpus_task("infprotocol_bad.agv"));
  InfTask bare = corpus_task("infprotocol.agv");
  bare.preds1.clear();
  run_infinite(bare);
  for (std::int64_t k = 0; k <= 7; ++k)
    for (bool with_preds : {true, false}) {
      InfTask t = corpus_task("infprotocol.agv");
      if (!with_preds) t.preds1.clear();
      for (auto& e : t.c1.edges)
        if (e.label == "sendInvalid") e.guard = parse_formula("x > " + std::to_string(k));
      run_infinite(t);
    }
  o.require(total_rechecks > 0, "no answers were rechecked");
  o.require(total_inconsistencies == 0, std::to_string(total_inconsistencies) + " inconsistent answers");
  if (o.pass)
    o.detail << infinite_runs << " infinite-state runs, " << total_rechecks << " cached answers re-asked, 0 inconsistencies";
  return o;
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"finite protocol regression", criterion1},
      {"infinite protocol regression", criterion2},
      {"finite oracle equivalence", criterion3},
      {"abstraction inclusion chain", criterion4},
      {"L* guarantees", criterion5},
      {"weakest assumption characterization", criterion6},
      {"interface generation", criterion7},
      {"no-restart invariant", criterion8},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail.str(std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::cout << "criterion " << i + 1 << " (" << criteria[i].first << "): " << (o.pass ? "PASS" : "FAIL") << " - "
              << o.detail.str() << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
