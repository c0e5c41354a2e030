#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "agv/formula.hpp"
#include "agv/sat.hpp"

using namespace agv;

namespace {

Formula F(const char* s) { return parse_formula(s); }

}  // namespace

TEST_CASE("atoms print in a readable normal form") {
  CHECK(F("x > 5").to_string() == "x > 5");
  CHECK(F("x <= 5").to_string() == "x <= 5");
  CHECK(F("not (x <= 5)") == F("x > 5"));
  CHECK(F("!(x > 5)") == F("x <= 5"));
  CHECK(F("2*x <= 7").to_string() == "x <= 3");
  CHECK(F("3*x >= 7").to_string() == "x > 2");
  CHECK(F("x = 0").to_string() == "x = 0");
  CHECK(F("0 = x").to_string() == "x = 0");
  CHECK(F("x != 0").to_string() == "x != 0");
  CHECK(F("x mod 5 > 5").to_string() == "(x mod 5) > 5");
  CHECK(F("(x % 5) > 5") == F("x mod 5 > 5"));
  CHECK(F("x + 1 = 0").to_string() == "x = -1");
  CHECK(F("2*x = 3").is_false());
  CHECK(F("1 < 2").is_true());
  CHECK(F("x - y <= 2 and (y = 1 or x > 0)").to_string() == "x - y <= 2 and (y = 1 or x > 0)");
}

TEST_CASE("mod normalization") {
  // (7x + 12) mod 5 = (2x + 2) mod 5
  CHECK(parse_term("(7*x + 12) mod 5") == parse_term("(2*x + 2) mod 5"));
  CHECK(parse_term("13 mod 5") == LinearTerm::constant(3));
  CHECK(parse_term("(-3) mod 5") == LinearTerm::constant(2));
  CHECK(parse_term("x mod 1") == LinearTerm::constant(0));
  CHECK(parse_term("x mod 5").eval({{"x", -1}}) == 4);
  CHECK(parse_term("(x + 1) mod 4").to_string() == "((x + 1) mod 4)");
  CHECK(parse_term("(2*x) mod 4").to_string() == "((2*x) mod 4)");
  for (const char* t : {"((x + 1) mod 4 + 1) mod 4", "(2*x - y) mod 3 + x mod 2"})
    CHECK(parse_term(parse_term(t).to_string()) == parse_term(t));
}

TEST_CASE("parse errors report positions") {
  try {
    parse_formula("x >\n  y *");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_formula("x * y > 0"), ParseError);
  CHECK_THROWS_AS(parse_formula("x mod 0 > 0"), ParseError);
  CHECK_THROWS_AS(parse_formula("x mod y > 0"), ParseError);
  CHECK_THROWS_AS(parse_formula("x > "), ParseError);
  CHECK_THROWS_AS(parse_formula("(x > 0"), ParseError);
}

TEST_CASE("substitution and variables") {
  Formula f = F("x > 5");
  Formula g = f.substitute({{"x", parse_term("x mod 5")}});
  CHECK(g.to_string() == "(x mod 5) > 5");
  CHECK(F("x + y > 2 and z = 1").vars() == std::set<Var>{"x", "y", "z"});
  auto atoms = F("x > 0 and (x > 0 or y = 2) and not (y = 2)").atoms();
  REQUIRE(atoms.size() == 2);
  CHECK(atoms[0] == F("x > 0"));
  CHECK(atoms[1] == F("y = 2"));
}

TEST_CASE("satisfiability examples") {
  std::set<Var> nat{"x"};
  CHECK_FALSE(is_satisfiable(F("x mod 5 > 5 and x >= 0")).sat);
  auto r = is_satisfiable(F("x = 0"));
  REQUIRE(r.sat);
  CHECK(r.witness.at("x") == 0);
  auto r2 = is_satisfiable(F("x > 0 and x <= 5 and x mod 5 = 0"));
  REQUIRE(r2.sat);
  CHECK(r2.witness.at("x") == 5);
  CHECK_FALSE(is_satisfiable(F("x < 0"), nat).sat);
  CHECK(is_satisfiable(F("x < 0")).sat);
  CHECK_FALSE(is_satisfiable(F("2*x = 2*y + 1")).sat);
  CHECK_FALSE(is_satisfiable(F("3*x - 3*y >= 1 and 3*x - 3*y <= 2")).sat);
  CHECK_FALSE(is_satisfiable(F("2*x + 4*y >= 1 and 2*x + 4*y <= 1")).sat);
  // Needs branching: 2 <= 3x - 2y <= 2 has integer points, e.g. x = 2, y = 2.
  auto r3 = is_satisfiable(F("3*x - 2*y = 2 and x >= 1 and y >= 1"));
  REQUIRE(r3.sat);
  CHECK(3 * r3.witness.at("x") - 2 * r3.witness.at("y") == 2);
  CHECK_FALSE(is_satisfiable(F("x mod 2 = 1 and (x + 1) mod 2 = 1")).sat);
  CHECK(is_satisfiable(F("x mod 3 = 2 and x mod 4 = 3 and x > 20")).sat);
  // Every residue excluded through a chain of nested mods.
  CHECK_FALSE(is_satisfiable(F("x != 0 and (x + 1) mod 4 != 0 and ((x + 1) mod 4 + 1) mod 4 != 0 and "
                               "(((x + 1) mod 4 + 1) mod 4 + 1) mod 4 != 0 and x mod 4 != 0"),
                             {"x"})
                  .sat);
  // Integer gap that real relaxation misses.
  CHECK_FALSE(is_satisfiable(F("27 <= 11*x + 13*y and 11*x + 13*y <= 45 and -10 <= 7*x - 9*y and 7*x - 9*y <= 4"))
                  .sat);
  auto r4 = is_satisfiable(F("5*x - 3*y = 1 and 7*y - 2*z = 3 and z > 10"));
  REQUIRE(r4.sat);
}

TEST_CASE("validity") {
  Solver s;
  std::set<Var> nat{"x"};
  CHECK(s.valid(F("x mod 5 <= 4")));
  CHECK(s.valid(F("x >= 0"), nat));
  CHECK_FALSE(s.valid(F("x >= 0")));
  CHECK(s.valid(F("x > 5 or x <= 5")));
}

TEST_CASE("renamed copies of naturals are natural") {
  CHECK(is_natural("x#3", {"x"}));
  CHECK_FALSE(is_natural("y#3", {"x"}));
  CHECK_FALSE(is_satisfiable(Formula::le(LinearTerm::variable("x#1") + LinearTerm::constant(1)), {"x"}).sat);
}

TEST_CASE("budgets raise resource errors") {
  // 2^20 disjuncts.
  std::string s;
  for (int i = 0; i < 20; ++i) s += (i ? " and " : "") + std::string("(x = ") + std::to_string(2 * i) +
                                    " or x = " + std::to_string(2 * i + 1) + ")";
  Solver small(SolverOptions{64, 4096, 4096, {}});
  CHECK_THROWS_AS(small.check(F(s.c_str())), ResourceError);
  CHECK_THROWS_AS(parse_term("9223372036854775807 + x + 1").eval({{"x", 1}}), ResourceError);
}

TEST_CASE("smt-lib rendering") {
  auto text = to_smtlib(F("x mod 5 > 5"), {"x"});
  CHECK(text.find("(set-logic QF_LIA)") == 0);
  CHECK(text.find("(declare-fun |x| () Int)") != std::string::npos);
  CHECK(text.find("(assert (>= |x| 0))") != std::string::npos);
  CHECK(text.find("(mod (+ (* 1 |x|) 0) 5)") != std::string::npos);
  CHECK(text.find("(check-sat)") != std::string::npos);
}

namespace {

struct Gen {
  std::mt19937 rng;
  std::vector<Var> vars;
  int maxc = 20;

  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

  LinearTerm term() {
    LinearTerm t;
    // Unit or difference shapes keep the enumeration bound below valid.
    const Var& a = vars[static_cast<std::size_t>(pick(0, static_cast<int>(vars.size()) - 1))];
    switch (pick(0, 3)) {
      case 0:
        t = LinearTerm::variable(a, pick(0, 1) ? 1 : -1);
        break;
      case 1: {
        const Var& b = vars[static_cast<std::size_t>(pick(0, static_cast<int>(vars.size()) - 1))];
        t = LinearTerm::variable(a) - LinearTerm::variable(b);
        break;
      }
      case 2:
        t = LinearTerm::variable(a, 2);
        break;
      default:
        t = LinearTerm::mod(LinearTerm::variable(a), pick(2, 4));
    }
    return t;
  }

  Formula atom() {
    static const char* ops[] = {"<=", "<", ">=", ">", "=", "!="};
    return Formula::compare(term(), ops[pick(0, 5)], LinearTerm::constant(pick(-maxc, maxc)));
  }

  Formula formula(int depth) {
    if (depth == 0 || pick(0, 2) == 0) return atom();
    int k = pick(2, 3);
    std::vector<Formula> kids;
    for (int i = 0; i < k; ++i) kids.push_back(formula(depth - 1));
    switch (pick(0, 2)) {
      case 0:
        return Formula::land(kids);
      case 1:
        return Formula::lor(kids);
      default:
        return Formula::lnot(Formula::land(kids));
    }
  }
};

bool enumerate(const Formula& f, const std::vector<Var>& vars, std::int64_t lo, std::int64_t hi) {
  Valuation v;
  for (const auto& x : vars) v[x] = lo;
  while (true) {
    if (f.eval(v)) return true;
    std::size_t i = 0;
    for (; i < vars.size(); ++i) {
      if (++v[vars[i]] <= hi) break;
      v[vars[i]] = lo;
    }
    if (i == vars.size()) return false;
  }
}

}  // namespace

TEST_CASE("no false unsat answers with larger coefficients") {
  // Unsat answers are checked against a box; solutions outside it can only
  // hide a bug, never invent one.
  std::mt19937 rng(77);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  int unsat = 0;
  for (int round = 0; round < 300; ++round) {
    std::vector<Formula> atoms;
    int n = pick(2, 4);
    for (int i = 0; i < n; ++i) {
      LinearTerm t = LinearTerm::variable("x", pick(-5, 5)) + LinearTerm::variable("y", pick(-5, 5));
      static const char* ops[] = {"<=", ">=", "="};
      atoms.push_back(Formula::compare(t, ops[pick(0, 2)], LinearTerm::constant(pick(-20, 20))));
    }
    Formula f = Formula::land(atoms);
    std::set<Var> nat{"x", "y"};
    auto r = is_satisfiable(f, nat);
    if (r.sat) {
      CHECK(f.eval(r.witness));
      continue;
    }
    ++unsat;
    bool found = false;
    for (std::int64_t x = 0; x <= 60 && !found; ++x)
      for (std::int64_t y = 0; y <= 60 && !found; ++y) found = f.eval({{"x", x}, {"y", y}});
    CHECK_MESSAGE(!found, f.to_string());
  }
  CHECK(unsat > 20);
}

TEST_CASE("solver agrees with bounded enumeration on random formulas") {
  Gen g{std::mt19937(31337), {}, 20};
  int sat = 0, unsat = 0;
  for (int round = 0; round < 1000; ++round) {
    int n = g.pick(1, 3);
    g.vars.clear();
    for (int i = 0; i < n; ++i) g.vars.push_back(std::string(1, static_cast<char>('x' + i)));
    // Three-variable formulas run over N; smaller ones over Z half the time.
    bool natural = n == 3 || g.pick(0, 1);
    std::set<Var> nat = natural ? std::set<Var>(g.vars.begin(), g.vars.end()) : std::set<Var>{};
    Formula f = g.formula(2);
    auto r = is_satisfiable(f, nat);
    if (r.sat) {
      ++sat;
      CHECK(f.eval(r.witness));
      for (const auto& v : nat)
        if (r.witness.count(v)) CHECK(r.witness.at(v) >= 0);
      continue;
    }
    ++unsat;
    // Difference constraints with constants <= c over n variables have a
    // solution within n*c of the origin when they have one; mods by 2..4
    // add at most lcm(2,3,4) = 12 of slack.
    std::int64_t bound = static_cast<std::int64_t>(n) * g.maxc + 12;
    bool found = enumerate(f, g.vars, natural ? 0 : -bound, bound);
    CHECK_MESSAGE(!found, f.to_string());
  }
  CHECK(sat > 100);
  CHECK(unsat > 100);
}
