#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "agv/ag_finite.hpp"
#include "agv/ag_infinite.hpp"
#include "agv/bounded.hpp"
#include "agv/dot.hpp"
#include "agv/interface_gen.hpp"
#include "agv/model.hpp"
#include "replay.hpp"

namespace agv::cli {

using json = nlohmann::ordered_json;

namespace {

struct Flags {
  std::size_t max_conjectures = 1000;
  std::size_t max_refinements = 50;
  std::size_t max_subset_states = 1u << 14;
  std::int64_t havoc_bound = -1;  // runs the bounded cross-check when set
  std::size_t oracle_depth = 8;
  bool trace_learning = false;
  std::string dot_dir;
  std::string smt_dir;
  std::string report_path;
  bool json_out = false;
  std::uint64_t seed = 1;
};

json dfa_json(const Dfa& d) {
  json j;
  j["alphabet"] = d.actions();
  j["states"] = assumption_states(d);
  j["initial"] = d.initial();
  json acc = json::array();
  for (StateId s = 0; s < d.size(); ++s)
    if (d.is_accepting(s)) acc.push_back(s);
  j["accepting"] = acc;
  json tr = json::array();
  for (StateId s = 0; s < d.size(); ++s)
    for (std::size_t a = 0; a < d.actions().size(); ++a) tr.push_back(json::array({s, d.actions()[a], d.next(s, a)}));
  j["transitions"] = tr;
  return j;
}

json preds_json(const PredicateSet& p) {
  json j = json::array();
  for (const auto& f : p) j.push_back(f.to_string());
  return j;
}

json stats_json(const LearnStats& s) {
  return {{"membership_queries", s.membership_queries},
          {"equivalence_queries", s.equivalence_queries},
          {"incorrect_conjectures", s.incorrect_conjectures},
          {"longest_counterexample", s.longest_counterexample},
          {"conjecture_sizes", s.conjecture_sizes}};
}

json optional_trace(const std::optional<Trace>& t) { return t ? json(*t) : json(nullptr); }

std::string edge_text(const SymbolicComponent& c, std::size_t i) {
  const Edge& e = c.edges.at(i);
  std::string s = c.locations[e.from] + " -" + e.label + "-> " + c.locations[e.to];
  if (e.guard.to_string() != "true") s += " [" + e.guard.to_string() + "]";
  if (!e.update.empty()) s += " { " + e.update.to_string() + " }";
  return s;
}

json path_json(const SymbolicComponent& c, const std::vector<std::size_t>& path) {
  json j = json::array();
  for (auto i : path) j.push_back(edge_text(c, i));
  return j;
}

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
  return s;
}

std::string preds_text(const PredicateSet& p) {
  std::vector<std::string> v;
  for (const auto& f : p) v.push_back(f.to_string());
  return v.empty() ? "(none)" : join(v, ", ");
}

Trace parse_trace(const std::string& s) {
  Trace t;
  std::string cur;
  for (char ch : s + ",") {
    if (ch == ',' || ch == ' ') {
      if (!cur.empty()) t.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  return t;
}

LearnLog learning_printer(bool on, std::ostream& err) {
  if (!on) return {};
  return [&err](const LearnEvent& e) {
    switch (e.kind) {
      case LearnEvent::Kind::membership:
        err << "  member " << to_string(e.word) << " -> " << (e.answer ? "yes" : "no") << "\n";
        break;
      case LearnEvent::Kind::conjecture:
        err << "  conjecture with " << e.states << " states\n";
        break;
      case LearnEvent::Kind::counterexample:
        err << "  counterexample " << to_string(e.word) << "\n";
        break;
    }
  };
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p);
  if (!f) throw InputError("cannot write " + p.string());
  f << text;
}

SolverOptions solver_options(const Flags& f) {
  SolverOptions o;
  if (!f.smt_dir.empty()) {
    std::filesystem::create_directories(f.smt_dir);
    o.smt_dump_dir = f.smt_dir;
  }
  return o;
}

json new_report(const std::string& command, const std::string& model) {
  json r;
  r["schema"] = 1;
  r["command"] = command;
  r["model"] = model;
  return r;
}

int finish(json& r, const Flags& f, std::chrono::steady_clock::time_point start, std::ostream& out,
           const std::string& text, int code) {
  r["timing"] = {{"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
  if (!f.report_path.empty()) write_file(f.report_path, r.dump(2) + "\n");
  if (f.json_out)
    out << r.dump(2) << "\n";
  else
    out << text;
  return code;
}

// Interface over the accepting part, in model syntax.
std::string interface_block(const std::string& keyword, const std::string& name, const Dfa& d) {
  return print_csm_block(keyword, name, d.accepting_part());
}

// ---------------------------------------------------------------------------

int cmd_check(const std::string& path, const std::string& n1, const std::string& n2, const std::string& np,
              const std::string& preds1, const std::string& preds2, const Flags& f, std::ostream& out,
              std::ostream& err) {
  auto start = std::chrono::steady_clock::now();
  Model m = load_model(path);
  Dfa p = m.property(np);
  for (const auto& n : {n1, n2})
    if (m.kind_of(n) != Model::Kind::csm && m.kind_of(n) != Model::Kind::symbolic)
      throw InputError("no component named '" + n + "'");
  bool finite = m.kind_of(n1) == Model::Kind::csm && m.kind_of(n2) == Model::Kind::csm;
  json r = new_report("check", path);
  r["mode"] = finite ? "finite" : "infinite";
  r["components"] = {n1, n2};
  r["property"] = np;
  std::ostringstream text;
  int code = Exit::error;

  if (finite) {
    AgTask task{m.csm(n1), m.csm(n2), p};
    validate(task);
    r["assumption_alphabet"] = assumption_alphabet(task);
    AgOptions o;
    o.max_conjectures = f.max_conjectures;
    o.learn_log = learning_printer(f.trace_learning, err);
    AgVerdict v;
    try {
      v = verify_compositional(task, o);
    } catch (const ResourceError& e) {
      r["verdict"] = "resource";
      r["reason"] = e.what();
      text << "resource limit: " << e.what() << "\n";
      return finish(r, f, start, out, text.str(), Exit::error);
    }
    text << "assumption alphabet: " << to_string(assumption_alphabet(task)) << "\n";
    json iters = json::array();
    for (const auto& it : v.log) {
      iters.push_back({{"conjecture", it.conjecture},
                       {"states", it.states},
                       {"premise1_cex", optional_trace(it.premise1_cex)},
                       {"premise2_cex", optional_trace(it.premise2_cex)},
                       {"outcome", it.outcome}});
      text << "conjecture " << it.conjecture << ": " << it.states << " states";
      if (it.premise1_cex) text << ", premise 1 fails on " << to_string(*it.premise1_cex);
      if (it.premise2_cex) text << ", premise 2 fails on " << to_string(*it.premise2_cex);
      text << " (" << it.outcome << ")\n";
    }
    r["iterations"] = iters;
    r["refinements"] = json::array();
    r["predicates"] = json::object();
    r["stats"] = stats_json(v.stats);
    if (v.holds) {
      r["verdict"] = "holds";
      r["assumption"] = dfa_json(v.assumption);
      r["assumption_block"] = interface_block("property", "Assumption", v.assumption);
      r["counterexample"] = nullptr;
      text << "verdict: holds\nassumption: " << assumption_states(v.assumption) << " states\n";
      if (!f.dot_dir.empty())
        write_file(std::filesystem::path(f.dot_dir) / "assumption.dot", to_dot(v.assumption, "assumption"));
      code = Exit::holds;
    } else {
      r["verdict"] = "violated";
      r["assumption"] = nullptr;
      r["counterexample"] = {{"trace", v.cex->trace}};
      text << "verdict: violated\ncounterexample: " << to_string(v.cex->trace) << "\n";
      code = Exit::violated;
    }
  } else {
    InfTask task{m.symbolic(n1), m.symbolic(n2), p, {}, {}};
    task.preds1 = preds1.empty() ? guard_predicates(task.c1) : m.predicate_set(preds1);
    task.preds2 = preds2.empty() ? guard_predicates(task.c2) : m.predicate_set(preds2);
    validate(task);
    r["assumption_alphabet"] = assumption_alphabet(task);
    r["initial_predicates"] = {{n1, preds_json(task.preds1)}, {n2, preds_json(task.preds2)}};
    InfOptions o;
    o.max_conjectures = f.max_conjectures;
    o.max_refinements = f.max_refinements;
    o.seed = f.seed;
    o.solver = solver_options(f);
    o.learn_log = learning_printer(f.trace_learning, err);
    InfVerdict v = verify_infinite(task, o);
    text << "assumption alphabet: " << to_string(assumption_alphabet(task)) << "\n";
    text << "initial predicates: " << n1 << ": " << preds_text(task.preds1) << "; " << n2 << ": "
         << preds_text(task.preds2) << "\n";
    json refs = json::array();
    for (const auto& x : v.refinements) {
      const std::string& who = x.component == 1 ? n1 : n2;
      refs.push_back({{"component", who},
                      {"phase", x.phase},
                      {"trace", x.trace},
                      {"infeasible_at", x.infeasible_at},
                      {"added", preds_json(x.added)}});
      text << "refinement of " << who << " (" << x.phase << "): " << to_string(x.trace) << " infeasible at step "
           << x.infeasible_at << ", added " << preds_text(x.added) << "\n";
    }
    json iters = json::array();
    for (const auto& it : v.log) {
      iters.push_back({{"conjecture", it.conjecture},
                       {"states", it.states},
                       {"premise1_cex", optional_trace(it.premise1_cex)},
                       {"premise2_cex", optional_trace(it.premise2_cex)},
                       {"outcome", it.outcome}});
      text << "conjecture " << it.conjecture << ": " << it.states << " states";
      if (it.premise1_cex) text << ", premise 1 fails on " << to_string(*it.premise1_cex);
      if (it.premise2_cex) text << ", premise 2 fails on " << to_string(*it.premise2_cex);
      text << " (" << it.outcome << ")\n";
    }
    r["iterations"] = iters;
    r["refinements"] = refs;
    r["predicates"] = {{n1, preds_json(v.preds1)}, {n2, preds_json(v.preds2)}};
    json stats = stats_json(v.stats);
    stats["teacher_membership_queries"] = v.membership_queries;
    stats["rechecks"] = v.rechecks;
    stats["recheck_inconsistencies"] = v.recheck_inconsistencies;
    r["stats"] = stats;
    switch (v.status) {
      case InfVerdict::Status::holds:
        r["verdict"] = "holds";
        r["assumption"] = dfa_json(v.assumption);
        r["assumption_block"] = interface_block("property", "Assumption", v.assumption);
        r["counterexample"] = nullptr;
        text << "verdict: holds\nassumption: " << assumption_states(v.assumption) << " states\n";
        if (!f.dot_dir.empty())
          write_file(std::filesystem::path(f.dot_dir) / "assumption.dot", to_dot(v.assumption, "assumption"));
        code = Exit::holds;
        break;
      case InfVerdict::Status::violated: {
        Solver s(o.solver);
        bool confirmed = confirm_violation(task, *v.cex, s);
        r["verdict"] = "violated";
        r["assumption"] = nullptr;
        r["counterexample"] = {{"trace", v.cex->trace},
                               {"path1", path_json(task.c1, v.cex->path1)},
                               {"path2", path_json(task.c2, v.cex->path2)},
                               {"confirmed", confirmed}};
        text << "verdict: violated\ncounterexample: " << to_string(v.cex->trace) << "\n";
        text << n1 << ": " << join(path_json(task.c1, v.cex->path1).get<std::vector<std::string>>(), "; ") << "\n";
        text << n2 << ": " << join(path_json(task.c2, v.cex->path2).get<std::vector<std::string>>(), "; ") << "\n";
        code = Exit::violated;
        break;
      }
      case InfVerdict::Status::resource:
        r["verdict"] = "resource";
        r["reason"] = v.reason;
        r["assumption"] = nullptr;
        r["counterexample"] = nullptr;
        text << "resource limit: " << v.reason << "\n";
        code = Exit::error;
        break;
    }
    text << "final predicates: " << n1 << ": " << preds_text(v.preds1) << "; " << n2 << ": " << preds_text(v.preds2)
         << "\n";
    if (f.havoc_bound >= 0 && v.status != InfVerdict::Status::resource) {
      auto w = bounded_violation(task.c1, task.c2, p, f.oracle_depth, f.havoc_bound);
      bool agrees = v.holds() ? !w : true;
      r["oracle"] = {{"depth", f.oracle_depth},
                     {"havoc_bound", f.havoc_bound},
                     {"violation", optional_trace(w)},
                     {"agrees", agrees}};
      text << "bounded oracle (depth " << f.oracle_depth << ", havoc in [0, " << f.havoc_bound << "]): "
           << (w ? "violation " + to_string(*w) : std::string("no violation")) << "\n";
    }
  }
  return finish(r, f, start, out, text.str(), code);
}

int cmd_interface(const std::string& path, const std::string& name, const std::string& sigma_text,
                  const std::string& preds, const Flags& f, std::ostream& out, std::ostream& err) {
  auto start = std::chrono::steady_clock::now();
  Model m = load_model(path);
  IfaceTask task{m.symbolic(name), {}, {}};
  if (sigma_text.empty()) {
    task.sigma = task.c.alphabet;
  } else {
    Trace acts = parse_trace(sigma_text);
    task.sigma = Alphabet(acts.begin(), acts.end());
  }
  task.preds = preds.empty() ? guard_predicates(task.c) : m.predicate_set(preds);
  IfaceOptions o;
  o.max_conjectures = f.max_conjectures;
  o.max_refinements = f.max_refinements;
  o.max_subset_states = f.max_subset_states;
  o.solver = solver_options(f);
  o.learn_log = learning_printer(f.trace_learning, err);
  IfaceResult res = gen_interface(task, o);

  json r = new_report("interface", path);
  r["mode"] = "interface";
  r["components"] = {name};
  r["alphabet"] = task.sigma;
  std::ostringstream text;
  if (!res.warning.empty()) err << "warning: " << res.warning << "\n";
  r["warnings"] = res.warning.empty() ? json::array() : json::array({res.warning});
  json iters = json::array();
  for (const auto& it : res.log) {
    iters.push_back({{"conjecture", it.conjecture},
                     {"states", it.states},
                     {"check", it.check.empty() ? json(nullptr) : json(it.check)},
                     {"cex", optional_trace(it.cex)},
                     {"outcome", it.cex ? "refine" : "accepted"}});
    text << "conjecture " << it.conjecture << ": " << it.states << " states";
    if (it.cex) text << ", " << it.check << " check fails on " << to_string(*it.cex);
    text << "\n";
  }
  json refs = json::array();
  for (const auto& x : res.refinements) {
    refs.push_back({{"component", name},
                    {"phase", x.phase},
                    {"trace", x.trace},
                    {"infeasible_at", x.infeasible_at},
                    {"added", preds_json(x.added)}});
    text << "refinement (" << x.phase << "): " << to_string(x.trace) << " at step " << x.infeasible_at << ", added "
         << preds_text(x.added) << "\n";
  }
  r["iterations"] = iters;
  r["refinements"] = refs;
  r["predicates"] = {{name, preds_json(res.preds)}};
  json stats = stats_json(res.stats);
  stats["teacher_membership_queries"] = res.membership_queries;
  stats["determinized"] = res.determinized;
  r["stats"] = stats;
  r["counterexample"] = nullptr;
  int code = Exit::holds;
  if (res.ok()) {
    r["verdict"] = "ok";
    r["assumption"] = dfa_json(res.interface);
    std::string block = interface_block("csm", name + "Interface", res.interface);
    r["assumption_block"] = block;
    text << "interface: " << assumption_states(res.interface) << " states over " << to_string(task.sigma)
         << (res.determinized ? " (must abstraction determinized)" : "") << "\n"
         << block;
    if (!f.dot_dir.empty())
      write_file(std::filesystem::path(f.dot_dir) / "interface.dot", to_dot(res.interface, "interface"));
    if (f.havoc_bound >= 0) {
      auto b = check_interface_bounded(task.c, task.sigma, res.interface, f.oracle_depth, f.havoc_bound);
      json unsafe = json::array(), safe = json::array();
      for (const auto& t : b.unsafe_accepted) unsafe.push_back(t);
      for (const auto& t : b.safe_rejected) safe.push_back(t);
      r["oracle"] = {{"depth", f.oracle_depth},
                     {"havoc_bound", f.havoc_bound},
                     {"unsafe_accepted", unsafe},
                     {"safe_rejected", safe},
                     {"agrees", b.ok()}};
      text << "bounded oracle: " << (b.ok() ? "safe and permissive" : "disagrees") << "\n";
    }
  } else {
    r["verdict"] = "resource";
    r["reason"] = res.reason;
    r["assumption"] = nullptr;
    text << "resource limit: " << res.reason << "\n";
    code = Exit::error;
  }
  return finish(r, f, start, out, text.str(), code);
}

// Subsets of a finite machine along a trace.
struct CsmRun {
  const Csm* m;
  TauClosure closure;
  std::vector<StateId> states;
  explicit CsmRun(const Csm& c) : m(&c), closure(c), states(closure.of(c.initial())) {}
  void step(const Action& a) {
    std::set<StateId> next;
    for (auto s : states)
      for (auto ti : m->outgoing(s))
        if (m->transition(ti).label == a)
          for (auto q : closure.of(m->transition(ti).to)) next.insert(q);
    states.assign(next.begin(), next.end());
  }
  bool error() const {
    return std::any_of(states.begin(), states.end(), [&](StateId s) { return m->is_error(s); });
  }
  std::string text() const {
    std::vector<std::string> v;
    for (auto s : states) v.push_back(m->name(s));
    return "{" + join(v, ", ") + "}";
  }
};

std::string valuation_text(const Valuation& v) {
  std::vector<std::string> parts;
  for (const auto& [k, x] : v) parts.push_back(k + "=" + std::to_string(x));
  return "[" + join(parts, ", ") + "]";
}

int cmd_replay(const std::string& path, std::vector<std::string> names, const std::string& trace_text,
               const std::string& from_report, std::ostream& out) {
  Model m = load_model(path);
  Trace t = parse_trace(trace_text);
  if (!from_report.empty()) {
    std::ifstream in(from_report);
    if (!in) throw InputError("cannot read " + from_report);
    json r = json::parse(in);
    if (r.value("command", "") != "check" || !r.contains("counterexample") || r["counterexample"].is_null())
      throw InputError(from_report + " holds no counterexample");
    if (names.empty()) {
      names = r["components"].get<std::vector<std::string>>();
      names.push_back(r["property"].get<std::string>());
    }
    t = r["counterexample"]["trace"].get<Trace>();
  }
  if (names.empty()) throw InputError("replay needs at least one block name");

  struct Part {
    std::string name;
    Alphabet alphabet;
    std::optional<CsmRun> csm;
    std::optional<Dfa> perr;
    StateId pstate = 0;
    std::optional<SymbolicComponent> sym;
    SymbolicReplay sr;
    std::vector<std::size_t> obs_index;  // position in sr.path after each observable edge
  };
  std::vector<Csm> machines;
  machines.reserve(names.size());
  std::vector<Part> parts;
  Alphabet all;
  Solver solver;
  for (const auto& n : names) {
    Part p;
    p.name = n;
    auto k = m.kind_of(n);
    if (k == Model::Kind::property) {
      p.perr = complement_property(m.property(n));
      p.pstate = p.perr->initial();
      p.alphabet = p.perr->alphabet();
    } else if (k == Model::Kind::csm) {
      machines.push_back(m.csm(n));
      p.csm.emplace(machines.back());
      p.alphabet = machines.back().alphabet();
    } else if (k == Model::Kind::symbolic) {
      p.sym = m.symbolic(n);
      p.alphabet = p.sym->alphabet;
    } else {
      throw InputError("no csm, property or symbolic block named '" + n + "'");
    }
    all = unite(all, p.alphabet);
    parts.push_back(std::move(p));
  }
  for (const auto& a : t)
    if (!all.count(a)) throw InputError("unknown action '" + a + "' (not in " + to_string(all) + ")");

  // Symbolic parts are replayed as a whole first.
  std::optional<std::size_t> stuck;  // first step that cannot be taken
  std::map<std::size_t, std::vector<std::string>> notes;
  for (auto& p : parts) {
    if (!p.sym) continue;
    Trace mine = project_trace(t, p.alphabet);
    p.sr = replay_symbolic(*p.sym, mine, solver);
    for (std::size_t i = 0; i < p.sr.path.size(); ++i)
      if (!is_tau(p.sym->edges[p.sr.path[i]].label)) p.obs_index.push_back(i + 1);
    if (p.sr.consumed < mine.size()) {
      // step in t of the first action this part cannot perform
      std::size_t seen = 0;
      for (std::size_t i = 0; i < t.size(); ++i)
        if (p.alphabet.count(t[i]) && seen++ == p.sr.consumed) {
          if (!stuck || i < *stuck) stuck = i;
          notes[i].push_back(p.name + ": infeasible at step " + std::to_string(i + 1));
          break;
        }
    }
  }

  auto show = [&](std::size_t step, const std::vector<std::size_t>& done) {
    out << "step " << step << ":";
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const Part& p = parts[i];
      out << " " << p.name << "=";
      if (p.csm) {
        out << p.csm->text();
      } else if (p.perr) {
        out << (p.perr->is_error(p.pstate) ? "error" : "q" + std::to_string(p.pstate));
      } else {
        std::size_t k = done[i] == 0 ? 0 : p.obs_index[done[i] - 1];
        std::size_t loc = k == 0 ? p.sym->initial : p.sym->edges[p.sr.path[k - 1]].to;
        out << p.sym->locations[loc];
        if (!p.sym->vars.empty() && k < p.sr.sim.valuations.size()) out << valuation_text(p.sr.sim.valuations[k]);
      }
    }
    out << "\n";
  };

  auto in_error = [&](const std::vector<std::size_t>& done) {
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const Part& p = parts[i];
      if (p.csm && p.csm->error()) return true;
      if (p.perr && p.perr->is_error(p.pstate)) return true;
      if (p.sym) {
        std::size_t k = done[i] == 0 ? 0 : p.obs_index[done[i] - 1];
        std::size_t loc = k == 0 ? p.sym->initial : p.sym->edges[p.sr.path[k - 1]].to;
        if (p.sym->is_error(loc)) return true;
      }
    }
    return false;
  };

  std::vector<std::size_t> done(parts.size(), 0);
  out << "trace: " << to_string(t) << "\n";
  show(0, done);
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (in_error(done)) break;
    if (stuck && i == *stuck) {
      for (const auto& n : notes[i]) out << n << "\n";
      out << "not performable at step " << i + 1 << " (" << t[i] << ")\n";
      return Exit::not_performable;
    }
    for (std::size_t j = 0; j < parts.size(); ++j) {
      Part& p = parts[j];
      if (!p.alphabet.count(t[i])) continue;
      if (p.csm) p.csm->step(t[i]);
      if (p.perr) p.pstate = p.perr->next(p.pstate, t[i]);
      if (p.sym) ++done[j];
    }
    for (const auto& p : parts)
      if (p.csm && p.csm->states.empty()) {
        show(i + 1, done);
        out << "not performable at step " << i + 1 << " (" << p.name << " refuses " << t[i] << ")\n";
        return Exit::not_performable;
      }
    show(i + 1, done);
  }
  if (in_error(done)) {
    out << "error reached\n";
    return Exit::violated;
  }
  out << "no error reached\n";
  return Exit::holds;
}

int cmd_compose(const std::string& path, const std::vector<std::string>& names, bool as_model, std::ostream& out) {
  Model m = load_model(path);
  std::vector<Csm> parts;
  for (const auto& n : names) {
    auto k = m.kind_of(n);
    if (k == Model::Kind::property)
      parts.push_back(complement_property(m.property(n)).to_csm());
    else if (k == Model::Kind::csm)
      parts.push_back(m.csm(n));
    else
      throw InputError("compose takes csm and property blocks; '" + n + "' is not one");
  }
  std::vector<const Csm*> ptrs;
  for (const auto& p : parts) ptrs.push_back(&p);
  Csm c = compose(std::span<const Csm* const>(ptrs));
  out << (as_model ? print_csm_block("csm", join(names, "_"), c) : to_dot(c, join(names, "_")));
  return Exit::holds;
}

int cmd_abstract(const std::string& path, const std::string& name, const std::string& preds, bool must,
                 const Flags& f, std::ostream& out, std::ostream& err) {
  Model m = load_model(path);
  SymbolicComponent c = m.symbolic(name);
  PredicateSet p = preds.empty() ? guard_predicates(c) : m.predicate_set(preds);
  Solver s(solver_options(f));
  Abstraction a = must ? abstract_must(c, p, s) : abstract_may(c, p, s);
  Csm shown = a.csm;
  for (StateId i = 0; i < shown.size(); ++i) {
    std::string label = c.locations[a.location[i]];
    std::vector<std::string> lits;
    for (std::size_t k = 0; k < p.size(); ++k)
      if (a.mask[i] >> k & 1u) lits.push_back(p[k].to_string());
    if (!lits.empty()) label += " {" + join(lits, ", ") + "}";
    shown.set_name(i, label);
  }
  out << to_dot(shown, name + (must ? "_must" : "_may"));
  err << (must ? "must" : "may") << " abstraction of " << name << ": " << shown.size() << " states, "
      << shown.transitions().size() << " transitions, " << (shown.is_deterministic() ? "deterministic" : "nondeterministic")
      << "\n";
  return Exit::holds;
}

void common_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--max-conjectures", f.max_conjectures, "Stop learning after this many conjectures");
  cmd->add_option("--max-refinements", f.max_refinements, "Refinement rounds allowed per check or query");
  cmd->add_option("--havoc-bound", f.havoc_bound, "Cross-check with concrete exploration, havocs in [0, B]");
  cmd->add_option("--oracle-depth", f.oracle_depth, "Trace length of the concrete cross-check");
  cmd->add_flag("--trace-learning", f.trace_learning, "Print learner queries to stderr");
  cmd->add_option("--dot", f.dot_dir, "Directory for DOT output");
  cmd->add_option("--smt-dump", f.smt_dir, "Directory for SMT-LIB dumps of solver queries");
  cmd->add_option("--report", f.report_path, "Write the JSON report to this file");
  cmd->add_flag("--json", f.json_out, "Print the JSON report instead of text");
  cmd->add_option("--seed", f.seed, "Seed for sampled answer rechecks");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Assume-guarantee verification and interface generation"};
  app.require_subcommand(1);
  Flags f;
  std::string model, a, b, c, preds1, preds2, sigma, trace, from_report;
  std::vector<std::string> names;
  bool may = false, must = false, as_model = false;

  auto* check = app.add_subcommand("check", "Verify M1 || M2 against a property");
  check->add_option("model", model, "Model file")->required();
  check->add_option("m1", a, "First component")->required();
  check->add_option("m2", b, "Second component")->required();
  check->add_option("property", c, "Property block")->required();
  check->add_option("--preds1", preds1, "Initial predicates of M1 (preds block)");
  check->add_option("--preds2", preds2, "Initial predicates of M2 (preds block)");
  common_flags(check, f);

  auto* iface = app.add_subcommand("interface", "Learn a safe and permissive interface of one component");
  iface->add_option("model", model, "Model file")->required();
  iface->add_option("component", a, "Component")->required();
  iface->add_option("--sigma", sigma, "Interface actions, comma separated (default: all)");
  iface->add_option("--preds", preds1, "Initial predicates (preds block)");
  iface->add_option("--max-subset-states", f.max_subset_states, "Cap for determinizing the must abstraction");
  common_flags(iface, f);

  auto* replay = app.add_subcommand("replay", "Run a trace on components and properties");
  replay->add_option("model", model, "Model file")->required();
  replay->add_option("names", names, "Blocks to run together; property blocks are checked for violation");
  replay->add_option("--trace", trace, "Actions, comma separated");
  replay->add_option("--from-report", from_report, "Take blocks and trace from a check report");

  auto* comp = app.add_subcommand("compose", "Parallel composition as DOT");
  comp->add_option("model", model, "Model file")->required();
  comp->add_option("names", names, "csm or property blocks (properties as error automata)")->required();
  comp->add_flag("--as-block", as_model, "Print a csm block instead of DOT");

  auto* abs = app.add_subcommand("abstract", "Predicate abstraction of a component as DOT");
  abs->add_option("model", model, "Model file")->required();
  abs->add_option("component", a, "Component")->required();
  abs->add_option("preds", preds1, "preds block (default: guard atoms)");
  auto* may_flag = abs->add_flag("--may", may, "May abstraction (default)");
  abs->add_flag("--must", must, "Must abstraction")->excludes(may_flag);
  abs->add_option("--smt-dump", f.smt_dir, "Directory for SMT-LIB dumps of solver queries");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? Exit::holds : Exit::error;
  }

  try {
    if (*check) return cmd_check(model, a, b, c, preds1, preds2, f, out, err);
    if (*iface) return cmd_interface(model, a, sigma, preds1, f, out, err);
    if (*replay) return cmd_replay(model, names, trace, from_report, out);
    if (*comp) return cmd_compose(model, names, as_model, out);
    if (*abs) return cmd_abstract(model, a, preds1, must, f, out, err);
  } catch (const ResourceError& e) {
    err << "resource limit: " << e.what() << "\n";
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return Exit::error;
}

}  // namespace agv::cli
