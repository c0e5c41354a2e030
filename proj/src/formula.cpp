#include "agv/formula.hpp"

#include <cctype>
#include <limits>
#include <numeric>

namespace agv {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw ResourceError("integer overflow in linear arithmetic");
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw ResourceError("integer overflow in linear arithmetic");
  return r;
}

std::int64_t euclid_mod(std::int64_t a, std::int64_t k) {
  std::int64_t r = a % k;
  return r < 0 ? r + k : r;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) == (b < 0))) ++q;
  return q;
}

// ---------------------------------------------------------------------------
// LinearTerm

LinearTerm LinearTerm::constant(std::int64_t c) {
  LinearTerm t;
  t.constant_ = c;
  return t;
}

LinearTerm LinearTerm::variable(const Var& v, std::int64_t coeff) {
  LinearTerm t;
  if (coeff != 0) t.vars_[v] = coeff;
  return t;
}

LinearTerm LinearTerm::mod(const LinearTerm& inner, std::int64_t k) {
  if (k <= 0) throw InputError("mod divisor must be a positive constant, got " + std::to_string(k));
  if (k == 1) return constant(0);
  LinearTerm r;
  for (const auto& [v, c] : inner.vars_)
    if (auto m = euclid_mod(c, k)) r.vars_[v] = m;
  for (const auto& [key, mc] : inner.mods_)
    if (auto m = euclid_mod(mc.second, k)) r.add_mod(mc.first, m);
  r.constant_ = euclid_mod(inner.constant_, k);
  if (r.is_constant()) return constant(r.constant_);
  LinearTerm out;
  out.add_mod(ModTerm{std::make_shared<const LinearTerm>(std::move(r)), k}, 1);
  return out;
}

void LinearTerm::add_mod(const ModTerm& m, std::int64_t coeff) {
  std::string inner = m.inner->to_string();
  bool simple = m.inner->mods().empty() && m.inner->constant_part() == 0 && m.inner->vars().size() == 1 &&
                m.inner->vars().begin()->second == 1;
  std::string key = "(" + (simple ? inner : "(" + inner + ")") + " mod " + std::to_string(m.k) + ")";
  auto it = mods_.find(key);
  if (it == mods_.end()) {
    if (coeff) mods_.emplace(key, std::make_pair(m, coeff));
    return;
  }
  it->second.second = checked_add(it->second.second, coeff);
  if (it->second.second == 0) mods_.erase(it);
}

LinearTerm LinearTerm::operator+(const LinearTerm& o) const {
  LinearTerm r = *this;
  for (const auto& [v, c] : o.vars_) {
    auto& slot = r.vars_[v];
    slot = checked_add(slot, c);
    if (slot == 0) r.vars_.erase(v);
  }
  for (const auto& [key, mc] : o.mods_) r.add_mod(mc.first, mc.second);
  r.constant_ = checked_add(r.constant_, o.constant_);
  return r;
}

LinearTerm LinearTerm::operator-(const LinearTerm& o) const { return *this + o.scaled(-1); }

LinearTerm LinearTerm::scaled(std::int64_t k) const {
  if (k == 0) return constant(0);
  LinearTerm r;
  for (const auto& [v, c] : vars_) r.vars_[v] = checked_mul(c, k);
  for (const auto& [key, mc] : mods_) r.mods_.emplace(key, std::make_pair(mc.first, checked_mul(mc.second, k)));
  r.constant_ = checked_mul(constant_, k);
  return r;
}

LinearTerm LinearTerm::without_constant() const {
  LinearTerm r = *this;
  r.constant_ = 0;
  return r;
}

LinearTerm LinearTerm::divided(std::int64_t g) const {
  LinearTerm r;
  for (const auto& [v, c] : vars_) r.vars_[v] = c / g;
  for (const auto& [key, mc] : mods_) r.mods_.emplace(key, std::make_pair(mc.first, mc.second / g));
  r.constant_ = constant_ / g;
  return r;
}

std::int64_t LinearTerm::coefficient_gcd() const {
  std::int64_t g = 0;
  for (const auto& [v, c] : vars_) g = std::gcd(g, c < 0 ? -c : c);
  for (const auto& [key, mc] : mods_) g = std::gcd(g, mc.second < 0 ? -mc.second : mc.second);
  return g;
}

std::int64_t LinearTerm::eval(const Valuation& val) const {
  std::int64_t r = constant_;
  for (const auto& [v, c] : vars_) {
    auto it = val.find(v);
    if (it == val.end()) throw InputError("no value for variable '" + v + "'");
    r = checked_add(r, checked_mul(c, it->second));
  }
  for (const auto& [key, mc] : mods_)
    r = checked_add(r, checked_mul(mc.second, euclid_mod(mc.first.inner->eval(val), mc.first.k)));
  return r;
}

LinearTerm LinearTerm::substitute(const std::map<Var, LinearTerm>& s) const {
  LinearTerm r = constant(constant_);
  for (const auto& [v, c] : vars_) {
    auto it = s.find(v);
    r = r + (it == s.end() ? variable(v, c) : it->second.scaled(c));
  }
  for (const auto& [key, mc] : mods_) r = r + mod(mc.first.inner->substitute(s), mc.first.k).scaled(mc.second);
  return r;
}

void LinearTerm::collect_vars(std::set<Var>& out) const {
  for (const auto& [v, c] : vars_) out.insert(v);
  for (const auto& [key, mc] : mods_) mc.first.inner->collect_vars(out);
}

std::string LinearTerm::to_string() const {
  std::string s;
  auto put = [&](std::int64_t c, const std::string& body) {
    bool neg = c < 0;
    std::int64_t a = neg ? -c : c;
    std::string piece = a == 1 ? body : std::to_string(a) + "*" + body;
    if (s.empty())
      s = neg ? "-" + piece : piece;
    else
      s += (neg ? " - " : " + ") + piece;
  };
  for (const auto& [v, c] : vars_) put(c, v);
  for (const auto& [key, mc] : mods_) put(mc.second, key);
  if (s.empty()) return std::to_string(constant_);
  if (constant_ > 0) s += " + " + std::to_string(constant_);
  if (constant_ < 0) s += " - " + std::to_string(-constant_);
  return s;
}

// ---------------------------------------------------------------------------
// Formula

namespace {

bool all_negative(const LinearTerm& t) {
  for (const auto& [v, c] : t.vars())
    if (c > 0) return false;
  for (const auto& [k, mc] : t.mods())
    if (mc.second > 0) return false;
  return true;
}

bool first_negative(const LinearTerm& t) {
  if (!t.vars().empty()) return t.vars().begin()->second < 0;
  if (!t.mods().empty()) return t.mods().begin()->second.second < 0;
  return false;
}

std::string atom_text(Formula::Kind kind, const LinearTerm& t, bool negated = false) {
  LinearTerm u = t.without_constant();
  std::int64_t c = t.constant_part();
  if (kind == Formula::Kind::eq) return u.to_string() + (negated ? " != " : " = ") + std::to_string(-c);
  if (all_negative(u)) return (-u).to_string() + " > " + std::to_string(c - 1);
  return u.to_string() + " <= " + std::to_string(-c);
}

}  // namespace

Formula Formula::make(Node n) {
  switch (n.kind) {
    case Kind::constant:
      n.text = n.value ? "true" : "false";
      break;
    case Kind::le:
    case Kind::eq:
      n.text = atom_text(n.kind, n.term);
      break;
    case Kind::negation: {
      const Formula& c = n.children[0];
      n.text = c.kind() == Kind::eq ? atom_text(Kind::eq, c.term(), true) : "not (" + c.to_string() + ")";
      break;
    }
    case Kind::conjunction:
    case Kind::disjunction: {
      const char* sep = n.kind == Kind::conjunction ? " and " : " or ";
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        const Formula& c = n.children[i];
        bool wrap = c.kind() == Kind::conjunction || c.kind() == Kind::disjunction;
        if (i) n.text += sep;
        n.text += wrap ? "(" + c.to_string() + ")" : c.to_string();
      }
      break;
    }
  }
  return Formula(std::make_shared<const Node>(std::move(n)));
}

Formula Formula::truth(bool value) {
  Node n;
  n.kind = Kind::constant;
  n.value = value;
  return make(std::move(n));
}

Formula Formula::le(const LinearTerm& t) {
  if (t.is_constant()) return truth(t.constant_part() <= 0);
  std::int64_t g = t.coefficient_gcd();
  LinearTerm u = t.without_constant().divided(g) + LinearTerm::constant(ceil_div(t.constant_part(), g));
  Node n;
  n.kind = Kind::le;
  n.term = std::move(u);
  return make(std::move(n));
}

Formula Formula::eq(const LinearTerm& t) {
  if (t.is_constant()) return truth(t.constant_part() == 0);
  std::int64_t g = t.coefficient_gcd();
  if (t.constant_part() % g != 0) return truth(false);
  LinearTerm u = t.divided(g);
  if (first_negative(u)) u = -u;
  Node n;
  n.kind = Kind::eq;
  n.term = std::move(u);
  return make(std::move(n));
}

Formula Formula::lnot(const Formula& f) {
  switch (f.kind()) {
    case Kind::constant:
      return truth(!f.value());
    case Kind::le:
      return le(LinearTerm::constant(1) - f.term());
    case Kind::negation:
      return f.children()[0];
    default: {
      Node n;
      n.kind = Kind::negation;
      n.children = {f};
      return make(std::move(n));
    }
  }
}

namespace {

template <class Make>
Formula junction(const std::vector<Formula>& fs, Formula::Kind kind, bool unit, Make make) {
  std::vector<Formula> kids;
  std::set<std::string> seen;
  auto add = [&](const Formula& f) {
    if (seen.insert(f.to_string()).second) kids.push_back(f);
  };
  for (const auto& f : fs) {
    if (f.kind() == Formula::Kind::constant) {
      if (f.value() == unit) continue;
      return Formula::truth(!unit);
    }
    if (f.kind() == kind)
      for (const auto& c : f.children()) add(c);
    else
      add(f);
  }
  if (kids.empty()) return Formula::truth(unit);
  if (kids.size() == 1) return kids[0];
  return make(std::move(kids));
}

}  // namespace

Formula Formula::land(const std::vector<Formula>& fs) {
  return junction(fs, Kind::conjunction, true, [](std::vector<Formula> kids) {
    Node n;
    n.kind = Kind::conjunction;
    n.children = std::move(kids);
    return make(std::move(n));
  });
}

Formula Formula::lor(const std::vector<Formula>& fs) {
  return junction(fs, Kind::disjunction, false, [](std::vector<Formula> kids) {
    Node n;
    n.kind = Kind::disjunction;
    n.children = std::move(kids);
    return make(std::move(n));
  });
}

Formula Formula::compare(const LinearTerm& lhs, std::string_view op, const LinearTerm& rhs) {
  LinearTerm d = lhs - rhs;
  if (op == "<=") return le(d);
  if (op == "<") return le(d + LinearTerm::constant(1));
  if (op == ">=") return le(-d);
  if (op == ">") return le(LinearTerm::constant(1) - d);
  if (op == "=" || op == "==") return eq(d);
  if (op == "!=") return lnot(eq(d));
  throw InputError("unknown comparison '" + std::string(op) + "'");
}

bool Formula::eval(const Valuation& v) const {
  switch (kind()) {
    case Kind::constant:
      return value();
    case Kind::le:
      return term().eval(v) <= 0;
    case Kind::eq:
      return term().eval(v) == 0;
    case Kind::negation:
      return !children()[0].eval(v);
    case Kind::conjunction:
      for (const auto& c : children())
        if (!c.eval(v)) return false;
      return true;
    case Kind::disjunction:
      for (const auto& c : children())
        if (c.eval(v)) return true;
      return false;
  }
  return false;
}

Formula Formula::substitute(const std::map<Var, LinearTerm>& s) const {
  switch (kind()) {
    case Kind::constant:
      return *this;
    case Kind::le:
      return le(term().substitute(s));
    case Kind::eq:
      return eq(term().substitute(s));
    case Kind::negation:
      return lnot(children()[0].substitute(s));
    case Kind::conjunction:
    case Kind::disjunction: {
      std::vector<Formula> kids;
      for (const auto& c : children()) kids.push_back(c.substitute(s));
      return kind() == Kind::conjunction ? land(kids) : lor(kids);
    }
  }
  return *this;
}

std::set<Var> Formula::vars() const {
  std::set<Var> out;
  if (is_atom()) term().collect_vars(out);
  for (const auto& c : children()) {
    auto sub = c.vars();
    out.insert(sub.begin(), sub.end());
  }
  return out;
}

std::vector<Formula> Formula::atoms() const {
  std::vector<Formula> out;
  std::set<std::string> seen;
  std::vector<const Formula*> stack{this};
  while (!stack.empty()) {
    const Formula* f = stack.back();
    stack.pop_back();
    if (f->is_atom()) {
      if (seen.insert(f->to_string()).second) out.push_back(*f);
      continue;
    }
    for (auto it = f->children().rbegin(); it != f->children().rend(); ++it) stack.push_back(&*it);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

struct Token {
  enum class Kind { ident, number, symbol, end } kind;
  std::string text;
  int line, column;
};

class Lexer {
 public:
  explicit Lexer(std::string_view s) {
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
      for (std::size_t j = 0; j < n; ++j) {
        if (s[i] == '\n') {
          ++line;
          col = 1;
        } else {
          ++col;
        }
        ++i;
      }
    };
    while (i < s.size()) {
      char c = s[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance(1);
        continue;
      }
      int l = line, cl = col;
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t j = i;
        while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
        tokens_.push_back({Token::Kind::ident, std::string(s.substr(i, j - i)), l, cl});
        advance(j - i);
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t j = i;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        tokens_.push_back({Token::Kind::number, std::string(s.substr(i, j - i)), l, cl});
        advance(j - i);
      } else {
        static const char* two[] = {"<=", ">=", "==", "!=", "&&", "||"};
        std::string sym(1, c);
        for (auto t : two)
          if (s.substr(i, 2) == t) sym = t;
        tokens_.push_back({Token::Kind::symbol, sym, l, cl});
        advance(sym.size());
      }
    }
    tokens_.push_back({Token::Kind::end, "", line, col});
  }
  std::vector<Token> tokens_;
};

class Parser {
 public:
  explicit Parser(std::string_view s) : toks_(Lexer(s).tokens_) {}

  Formula formula_to_end() {
    Formula f = disjunction();
    expect_end();
    return f;
  }
  LinearTerm term_to_end() {
    LinearTerm t = term();
    expect_end();
    return t;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  bool is(std::string_view text) const {
    return peek().kind != Token::Kind::end && peek().kind != Token::Kind::number && peek().text == text;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    throw ParseError(msg + (t.kind == Token::Kind::end ? " at end of input" : " near '" + t.text + "'"), t.line,
                     t.column);
  }
  void expect(std::string_view text) {
    if (!is(text)) fail("expected '" + std::string(text) + "'");
    ++pos_;
  }
  void expect_end() {
    if (peek().kind != Token::Kind::end) fail("unexpected input");
  }

  Formula disjunction() {
    std::vector<Formula> parts{conjunction()};
    while (is("or") || is("||")) {
      ++pos_;
      parts.push_back(conjunction());
    }
    return Formula::lor(parts);
  }
  Formula conjunction() {
    std::vector<Formula> parts{unary()};
    while (is("and") || is("&&")) {
      ++pos_;
      parts.push_back(unary());
    }
    return Formula::land(parts);
  }
  Formula unary() {
    if (is("not") || is("!")) {
      ++pos_;
      return Formula::lnot(unary());
    }
    if (is("true")) {
      ++pos_;
      return Formula::truth(true);
    }
    if (is("false")) {
      ++pos_;
      return Formula::truth(false);
    }
    if (is("(")) {
      // Either a parenthesized formula or a comparison whose left term starts
      // with a parenthesis; try the comparison first.
      std::size_t save = pos_;
      try {
        return comparison();
      } catch (const ParseError&) {
        pos_ = save;
      }
      ++pos_;
      Formula f = disjunction();
      expect(")");
      return f;
    }
    return comparison();
  }
  Formula comparison() {
    LinearTerm lhs = term();
    static const char* ops[] = {"<=", ">=", "==", "!=", "<", ">", "="};
    for (auto op : ops)
      if (is(op)) {
        ++pos_;
        LinearTerm rhs = term();
        return Formula::compare(lhs, op, rhs);
      }
    fail("expected a comparison operator");
  }

  LinearTerm term() {
    LinearTerm t = product();
    while (is("+") || is("-")) {
      bool minus = is("-");
      ++pos_;
      LinearTerm r = product();
      t = minus ? t - r : t + r;
    }
    return t;
  }
  LinearTerm product() {
    LinearTerm t = factor();
    while (is("*") || is("mod") || is("%")) {
      bool mul = is("*");
      const Token& optok = peek();
      ++pos_;
      LinearTerm r = factor();
      if (mul) {
        if (r.is_constant())
          t = t.scaled(r.constant_part());
        else if (t.is_constant())
          t = r.scaled(t.constant_part());
        else
          throw ParseError("nonlinear product", optok.line, optok.column);
      } else {
        if (!r.is_constant() || r.constant_part() <= 0)
          throw ParseError("mod needs a positive constant divisor", optok.line, optok.column);
        t = LinearTerm::mod(t, r.constant_part());
      }
    }
    return t;
  }
  LinearTerm factor() {
    const Token& t = peek();
    if (is("-")) {
      ++pos_;
      return -factor();
    }
    if (is("(")) {
      ++pos_;
      LinearTerm r = term();
      expect(")");
      return r;
    }
    if (t.kind == Token::Kind::number) {
      ++pos_;
      try {
        return LinearTerm::constant(std::stoll(t.text));
      } catch (const std::out_of_range&) {
        throw ParseError("integer literal out of range", t.line, t.column);
      }
    }
    if (t.kind == Token::Kind::ident) {
      static const std::set<std::string> reserved{"mod", "and", "or", "not", "true", "false", "havoc"};
      if (reserved.count(t.text)) fail("unexpected keyword");
      ++pos_;
      return LinearTerm::variable(t.text);
    }
    fail("expected a term");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

LinearTerm parse_term(std::string_view text) { return Parser(text).term_to_end(); }
Formula parse_formula(std::string_view text) { return Parser(text).formula_to_end(); }

}  // namespace agv
