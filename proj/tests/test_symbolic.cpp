#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "agv/model.hpp"
#include "agv/symbolic.hpp"
#include "support.hpp"

using namespace agv;

namespace {

Model suite() { return load_model(AGV_CORPUS_DIR "/symbolic_suite.agv"); }
SymbolicComponent sender() { return suite().symbolic("Sender"); }

PredicateSet P(std::initializer_list<const char*> fs) {
  PredicateSet p;
  for (const char* f : fs) p.push_back(parse_formula(f));
  return p;
}

std::size_t edge_index(const SymbolicComponent& c, const Action& label) {
  for (std::size_t i = 0; i < c.edges.size(); ++i)
    if (c.edges[i].label == label) return i;
  FAIL("no edge " << label);
  return 0;
}

// Does the abstraction have a run taking exactly these component edges?
bool has_edge_path(const Abstraction& a, const std::vector<std::size_t>& path) {
  std::set<StateId> cur{a.csm.initial()};
  for (std::size_t e : path) {
    std::set<StateId> next;
    for (const auto& t : a.csm.transitions())
      if (cur.count(t.from) && t.origin == static_cast<int>(e)) next.insert(t.to);
    cur = std::move(next);
  }
  return !cur.empty();
}

bool reachable_label(const Abstraction& a, const Action& label) {
  for (const auto& t : a.csm.transitions())
    if (t.label == label) return true;
  return false;
}

}  // namespace

TEST_CASE("sender abstraction with x = 0, x > 0 has the spurious invalid send") {
  Solver s;
  auto c = sender();
  auto may = abstract_may(c, P({"x = 0", "x > 0"}), s);
  CHECK(reachable_label(may, "sendInvalid"));
  auto fine = abstract_may(c, P({"x = 0", "x > 0", "x > 5", "x <= 5"}), s);
  CHECK_FALSE(reachable_label(fine, "sendInvalid"));
  CHECK(reachable_label(fine, "sendValid"));
}

TEST_CASE("empty predicate set gives one state per location") {
  Solver s;
  auto c = sender();
  auto may = abstract_may(c, {}, s);
  CHECK(may.csm.size() == c.locations.size());
  // l3 has both sends since both guards are satisfiable on their own.
  CHECK(may.csm.transitions().size() == c.edges.size());
  auto m = suite().symbolic("Lock");
  auto lock = abstract_may(m, {}, s);
  CHECK(lock.csm.size() == 3);
  CHECK(lock.csm.has_error_states());
}

TEST_CASE("must edge through the mod update") {
  Solver s;
  auto c = sender();
  std::size_t l2 = *c.find_location("l2");
  auto must_targets = [&](const Abstraction& must, std::uint32_t mask) {
    std::vector<std::uint32_t> out;
    bool seen = false;
    for (StateId q = 0; q < must.csm.size(); ++q) {
      if (must.location[q] != l2 || must.mask[q] != mask) continue;
      seen = true;
      for (std::size_t i : must.csm.outgoing(q)) {
        CHECK(must.csm.transition(i).label == "mod");
        out.push_back(must.mask[must.csm.transition(i).to]);
      }
    }
    CHECK(seen);
    return out;
  };
  // With x > 5 alone, every such x lands in x <= 5 after the update.
  auto coarse = abstract_must(c, P({"x > 5", "x <= 5"}), s);
  CHECK(must_targets(coarse, 0b01) == std::vector<std::uint32_t>{0b10});
  // Full valuations also fix x = 0 versus x > 0, which x mod 5 does not
  // determine (10 and 7 both satisfy x > 5), so there is no must edge.
  auto full = abstract_must(c, P({"x = 0", "x > 0", "x > 5", "x <= 5"}), s);
  CHECK(must_targets(full, 0b0110).empty());
  // A single unguarded deterministic edge is a must edge without predicates.
  auto parity = abstract_must(suite().symbolic("Parity"), {}, s);
  CHECK(parity.csm.transitions().size() == 1);
  CHECK(parity.csm.transition(0).label == "step");
}

TEST_CASE("symbolic simulation") {
  Solver s;
  auto c = sender();
  std::vector<std::size_t> spurious{0, 1, 2, edge_index(c, "sendInvalid")};
  auto r = simulate_symbolic(c, spurious, s);
  CHECK_FALSE(r.feasible);
  CHECK(r.prefix == 4);
  std::vector<std::size_t> good{0, 1, 2, edge_index(c, "sendValid"), edge_index(c, "ack")};
  auto g = simulate_symbolic(c, good, s);
  REQUIRE(g.feasible);
  REQUIRE(g.havoc_values.size() == 1);
  REQUIRE(g.valuations.size() == 6);
  CHECK(g.valuations[2].at("x") == g.havoc_values[0]);
  CHECK(g.valuations[3].at("x") == g.havoc_values[0] % 5);
  CHECK(simulate_symbolic(c, {}, s).feasible);
  CHECK_THROWS_AS(simulate_symbolic(c, {1}, s), InputError);
  CHECK_THROWS_AS(simulate_symbolic(c, {99}, s), InputError);
}

TEST_CASE("weakest preconditions") {
  Solver s;
  auto c = sender();
  const Edge& mod = c.edges[2];
  CHECK(wp(parse_formula("x > 5"), c, mod, s).to_string() == "(x mod 5) > 5");
  for (const auto& e : c.edges) CHECK(wp(Formula(), c, e, s).is_true());
  SymbolicComponent inc = c;
  Edge step{0, "in", Formula(), Update{{{"x", parse_term("x + 1")}}, {}}, 1};
  CHECK(wp(parse_formula("x = 0"), inc, step, s).to_string() == "x = -1");
  Formula pulled = wp_trace(parse_formula("x > 5"), c, {1, 2}, s);
  CHECK_FALSE(s.satisfiable(pulled, c.naturals()));
  CHECK(wp_trace(parse_formula("x > 5"), c, {}, s) == parse_formula("x > 5"));
  CHECK(wp_trace(parse_formula("x > 5"), c, {2}, s) == wp(parse_formula("x > 5"), c, mod, s));
}

TEST_CASE("refinement of the spurious invalid send") {
  Solver s;
  auto c = sender();
  auto preds = P({"x = 0", "x > 0"});
  std::vector<std::size_t> path{0, 1, 2, edge_index(c, "sendInvalid")};
  REQUIRE(has_edge_path(abstract_may(c, preds, s), path));
  auto refined = refine(c, preds, path, 4, s);
  CHECK(refined.size() == 4);
  CHECK(std::find(refined.begin(), refined.end(), parse_formula("x > 5")) != refined.end());
  CHECK(std::find(refined.begin(), refined.end(), parse_formula("x <= 5")) != refined.end());
  for (std::size_t i = 0; i < preds.size(); ++i) CHECK(refined[i] == preds[i]);
  CHECK_FALSE(has_edge_path(abstract_may(c, refined, s), path));
  CHECK_THROWS_AS(refine(c, refined, path, 4, s), InternalError);
}

namespace {

// Edge paths of the may abstraction up to the given length.
void abstract_paths(const Abstraction& a, StateId q, std::size_t depth, std::vector<std::size_t>& cur,
                    std::vector<std::vector<std::size_t>>& out) {
  out.push_back(cur);
  if (cur.size() == depth) return;
  for (std::size_t i : a.csm.outgoing(q)) {
    const auto& t = a.csm.transition(i);
    cur.push_back(static_cast<std::size_t>(t.origin));
    abstract_paths(a, t.to, depth, cur, out);
    cur.pop_back();
  }
}

}  // namespace

TEST_CASE("refine removes every spurious path it is given") {
  Solver s;
  auto m = suite();
  int refined = 0;
  for (const auto& [name, c] : m.symbolics) {
    PredicateSet preds;
    for (int round = 0; round < 6; ++round) {
      auto may = abstract_may(c, preds, s);
      std::vector<std::vector<std::size_t>> paths;
      std::vector<std::size_t> cur;
      abstract_paths(may, may.csm.initial(), 5, cur, paths);
      std::optional<std::pair<std::vector<std::size_t>, std::size_t>> spurious;
      for (const auto& p : paths) {
        auto r = simulate_symbolic(c, p, s);
        if (!r.feasible) {
          spurious.emplace(p, r.prefix);
          break;
        }
      }
      if (!spurious) break;
      auto next = refine(c, preds, spurious->first, spurious->second, s);
      CHECK(next.size() > preds.size());
      if (next.size() > max_predicates) break;
      CHECK_MESSAGE(!has_edge_path(abstract_may(c, next, s), spurious->first), name);
      preds = next;
      ++refined;
    }
  }
  CHECK(refined >= 5);
}

TEST_CASE("inclusion chain on the symbolic suite") {
  Solver s;
  auto m = suite();
  REQUIRE(m.symbolics.size() == 10);
  int violations = 0;
  for (const auto& [name, c] : m.symbolics) {
    auto concrete = bounded_language(c, 6, 20);
    for (const PredicateSet& preds : {PredicateSet{}, guard_predicates(c)}) {
      if (preds.size() > max_predicates) continue;
      auto must = bounded_language(abstract_must(c, preds, s).csm, 6);
      auto may = bounded_language(abstract_may(c, preds, s).csm, 6);
      for (const auto& t : must)
        if (!concrete.count(t)) {
          ++violations;
          MESSAGE(name << ": must trace " << to_string(t) << " not concrete");
        }
      for (const auto& t : concrete)
        if (!may.count(t)) {
          ++violations;
          MESSAGE(name << ": concrete trace " << to_string(t) << " missing from may");
        }
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("wp soundness on random states and edges") {
  Solver s;
  auto m = suite();
  std::vector<SymbolicComponent> comps;
  for (const auto& [name, c] : m.symbolics)
    if (!c.vars.empty()) comps.push_back(c);
  std::mt19937 rng(2024);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  int checked = 0, nontrivial = 0;
  for (int round = 0; round < 500; ++round) {
    const auto& c = comps[static_cast<std::size_t>(pick(0, static_cast<int>(comps.size()) - 1))];
    const Edge& e = c.edges[static_cast<std::size_t>(pick(0, static_cast<int>(c.edges.size()) - 1))];
    // f: random atom over a component variable, possibly with mod.
    const auto& v = c.vars[static_cast<std::size_t>(pick(0, static_cast<int>(c.vars.size()) - 1))];
    LinearTerm lhs = pick(0, 3) == 0 ? LinearTerm::mod(LinearTerm::variable(v.name), pick(2, 5))
                                     : LinearTerm::variable(v.name, pick(1, 2));
    static const char* ops[] = {"<=", "<", ">=", ">", "=", "!="};
    Formula f = Formula::compare(lhs, ops[pick(0, 5)], LinearTerm::constant(pick(-2, 8)));
    if (pick(0, 2) == 0) f = Formula::lor({f, c.edges[0].guard});
    Formula w = wp(f, c, e, s);
    Valuation q;
    for (const auto& d : c.vars) q[d.name] = d.natural ? pick(0, 10) : pick(-10, 10);
    ++checked;
    if (!w.eval(q) || !e.guard.eval(q)) continue;
    ++nontrivial;
    // Every successor, havocs over [0, 20].
    Valuation base = q;
    for (const auto& [x, t] : e.update.assigns) base[x] = t.eval(q);
    std::vector<Valuation> succ{base};
    for (const auto& h : e.update.havocs) {
      std::vector<Valuation> next;
      for (const auto& b : succ)
        for (int k = 0; k <= 20; ++k) {
          Valuation n = b;
          n[h] = k;
          next.push_back(n);
        }
      succ = next;
    }
    for (const auto& n : succ) CHECK_MESSAGE(f.eval(n), f.to_string() << " after " << e.label);
  }
  CHECK(checked == 500);
  CHECK(nontrivial > 100);
}

TEST_CASE("must abstraction of an observationally deterministic component is deterministic") {
  Solver s;
  auto m = suite();
  std::set<std::string> det;
  for (const auto& [name, c] : m.symbolics) {
    if (!is_observationally_deterministic(c, s)) continue;
    det.insert(name);
    auto preds = guard_predicates(c);
    if (preds.size() > max_predicates) preds.resize(max_predicates);
    CHECK_MESSAGE(abstract_must(c, preds, s).csm.is_deterministic(), name);
    CHECK(abstract_must(c, {}, s).csm.is_deterministic());
  }
  CHECK(det == std::set<std::string>{"Buffer", "Counter", "Lock", "Parity", "Transfer", "Walker"});
}

TEST_CASE("bounded languages") {
  auto r = SymbolicComponent::from_csm(fixture::receiver(), "Receiver");
  CHECK(bounded_language(r, 3, 0) ==
        std::set<Trace>{{}, {"send"}, {"send", "out"}, {"send", "out", "ack"}});
  CHECK(bounded_language(r, 0, 0) == std::set<Trace>{{}});
  auto c = sender();
  auto lang = bounded_language(c, 5, 20);
  CHECK(lang.count({"in", "read", "mod", "sendValid", "ack"}));
  CHECK_FALSE(lang.count({"in", "read", "mod", "sendInvalid"}));
  Solver s;
  auto must = bounded_language(abstract_must(c, P({"x = 0", "x > 0", "x > 5", "x <= 5"}), s).csm, 5);
  auto may = bounded_language(abstract_may(c, P({"x = 0", "x > 0"}), s).csm, 5);
  for (const auto& t : must) CHECK(lang.count(t));
  for (const auto& t : lang) CHECK(may.count(t));
  auto timer = bounded_language(suite().symbolic("Timer"), 2, 0);
  CHECK(timer.count({"start", "timeout"}));
  auto lock = explore_bounded(suite().symbolic("Lock"), 3, 0);
  CHECK(lock.error_traces == std::set<Trace>{{"acquire", "fail"}});
}

TEST_CASE("validation") {
  auto c = sender();
  c.edges[0].guard = parse_formula("y > 0");
  CHECK_THROWS_AS(c.validate(), InputError);
  c = sender();
  c.edges[0].label = "nope";
  CHECK_THROWS_AS(c.validate(), InputError);
  c = sender();
  Solver s;
  CHECK_THROWS_AS(abstract_may(c, P({"y = 0"}), s), InputError);
  PredicateSet many;
  for (int i = 0; i < 17; ++i) many.push_back(parse_formula(("x = " + std::to_string(i)).c_str()));
  CHECK_THROWS_AS(abstract_may(c, many, s), ResourceError);
}
