#include "agv/model.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace agv {

std::optional<Model::Kind> Model::kind_of(const std::string& name) const {
  for (const auto& [k, n] : order)
    if (n == name) return k;
  return std::nullopt;
}

const Csm& Model::csm(const std::string& name) const {
  auto it = csms.find(name);
  if (it == csms.end()) throw InputError("no csm or property block named '" + name + "'");
  return it->second;
}

Dfa Model::property(const std::string& name) const {
  auto k = kind_of(name);
  if (!k || (*k != Kind::property && *k != Kind::csm)) throw InputError("no property block named '" + name + "'");
  const Csm& m = csm(name);
  if (!m.is_deterministic()) throw InputError("property '" + name + "' is not deterministic");
  return Dfa::from_csm(m);
}

SymbolicComponent Model::symbolic(const std::string& name) const {
  auto it = symbolics.find(name);
  if (it != symbolics.end()) return it->second;
  auto k = kind_of(name);
  if (k == Kind::csm) return SymbolicComponent::from_csm(csm(name), name);
  throw InputError("no component named '" + name + "'");
}

const PredicateSet& Model::predicate_set(const std::string& name) const {
  auto it = preds.find(name);
  if (it == preds.end()) throw InputError("no preds block named '" + name + "'");
  return it->second;
}

bool operator==(const Model& a, const Model& b) {
  return a.order == b.order && a.csms == b.csms && a.symbolics == b.symbolics && a.preds == b.preds;
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  Model run() {
    Model m;
    skip();
    while (pos_ < s_.size()) {
      int line = line_, col = col_;
      std::string kw = ident("block keyword");
      std::string name = ident("block name");
      if (m.kind_of(name)) fail("duplicate block name '" + name + "'", line, col);
      expect('{');
      if (kw == "csm" || kw == "property") {
        Csm c = csm_body();
        if (kw == "property" && !c.is_deterministic())
          fail("property '" + name + "' must be deterministic", line, col);
        m.csms.emplace(name, std::move(c));
        m.order.emplace_back(kw == "csm" ? Model::Kind::csm : Model::Kind::property, name);
      } else if (kw == "symbolic") {
        SymbolicComponent c = symbolic_body(name);
        try {
          c.validate();
        } catch (const InputError& e) {
          fail(e.what(), line, col);
        }
        m.symbolics.emplace(name, std::move(c));
        m.order.emplace_back(Model::Kind::symbolic, name);
      } else if (kw == "preds") {
        m.preds.emplace(name, preds_body());
        m.order.emplace_back(Model::Kind::preds, name);
      } else {
        fail("unknown block kind '" + kw + "'", line, col);
      }
      skip();
    }
    return m;
  }

 private:
  [[noreturn]] void fail(const std::string& msg, int line, int col) { throw ParseError(msg, line, col); }
  [[noreturn]] void fail(const std::string& msg) { fail(msg, line_, col_); }

  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  void advance() {
    if (s_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  void skip() {
    while (pos_ < s_.size()) {
      if (std::isspace(static_cast<unsigned char>(peek()))) {
        advance();
      } else if (s_.substr(pos_, 2) == "//") {
        while (pos_ < s_.size() && peek() != '\n') advance();
      } else {
        break;
      }
    }
  }
  bool accept(char c) {
    skip();
    if (peek() != c) return false;
    advance();
    return true;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  bool accept_word(std::string_view w) {
    skip();
    if (s_.substr(pos_, w.size()) != w) return false;
    std::size_t end = pos_ + w.size();
    if (end < s_.size() && is_ident_char(s_[end])) return false;
    for (std::size_t i = 0; i < w.size(); ++i) advance();
    return true;
  }
  static bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '\'';
  }
  std::string ident(const char* what) {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && is_ident_char(peek())) advance();
    if (start == pos_) fail(std::string("expected ") + what);
    return std::string(s_.substr(start, pos_ - start));
  }
  std::int64_t integer() {
    skip();
    bool neg = accept('-');
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(peek()))) advance();
    if (start == pos_) fail("expected an integer");
    try {
      std::int64_t v = std::stoll(std::string(s_.substr(start, pos_ - start)));
      return neg ? -v : v;
    } catch (const std::out_of_range&) {
      fail("integer out of range");
    }
  }
  // Identifiers in braces, separated by commas or whitespace.
  std::vector<std::string> name_list() {
    expect('{');
    std::vector<std::string> out;
    while (!accept('}')) {
      out.push_back(ident("a name"));
      accept(',');
    }
    accept(';');
    return out;
  }

  // Raw text up to the closing delimiter, parsed afterwards with positions
  // mapped back into the file.
  struct Raw {
    std::string text;
    int line, col;
  };
  Raw raw_until(char close) {
    Raw r{{}, line_, col_};
    while (pos_ < s_.size() && peek() != close) {
      if (peek() == '\n' || s_.substr(pos_, 2) == "//") {
        // keep line structure; drop comments
        if (peek() == '\n') {
          r.text += '\n';
          advance();
        } else {
          while (pos_ < s_.size() && peek() != '\n') advance();
        }
        continue;
      }
      r.text += peek();
      advance();
    }
    if (peek() != close) fail(std::string("missing '") + close + "'");
    advance();
    return r;
  }
  template <class F>
  auto within(const Raw& r, F f) {
    try {
      return f(r.text);
    } catch (const ParseError& e) {
      int line = r.line + e.line() - 1;
      int col = e.line() == 1 ? r.col + e.column() - 1 : e.column();
      std::string msg = e.what();
      msg = msg.substr(msg.find(": ") + 2);
      fail(msg, line, col);
    }
  }

  std::string label() {
    // after '-': action up to "->"
    std::string a = ident("an action");
    skip();
    if (s_.substr(pos_, 2) != "->") fail("expected '->'");
    advance();
    advance();
    return a;
  }

  Csm csm_body() {
    Alphabet alphabet;
    std::vector<std::string> declared, errors;
    std::optional<std::string> init;
    struct T {
      std::string from, label, to;
      int line, col;
    };
    std::vector<T> ts;
    while (!accept('}')) {
      int line = line_, col = col_;
      if (accept_word("alphabet")) {
        for (auto& a : name_list()) alphabet.insert(a);
      } else if (accept_word("states")) {
        declared = name_list();
      } else if (accept_word("error")) {
        errors = name_list();
      } else if (accept_word("init")) {
        init = ident("a state");
        expect(';');
      } else {
        std::string from = ident("a state or declaration");
        skip();
        line = line_;
        col = col_;
        expect('-');
        std::string a = label();
        std::string to = ident("a target state");
        expect(';');
        ts.push_back({from, a, to, line, col});
      }
    }
    if (alphabet.count(tau)) fail("tau cannot be in an alphabet");
    Csm m(alphabet);
    auto state = [&](const std::string& n) {
      if (auto s = m.find_state(n)) return *s;
      return m.add_state(n);
    };
    for (const auto& n : declared) state(n);
    if (!init) fail("missing init");
    m.set_initial(state(*init));
    for (const auto& t : ts) {
      if (!is_tau(t.label) && !alphabet.count(t.label))
        fail("action '" + t.label + "' not in alphabet " + to_string(alphabet), t.line, t.col);
      m.add_transition(state(t.from), t.label, state(t.to));
    }
    for (const auto& e : errors) m.set_error(state(e));
    return m;
  }

  SymbolicComponent symbolic_body(const std::string& name) {
    SymbolicComponent c;
    c.name = name;
    std::vector<std::string> declared, errors;
    std::optional<std::string> init;
    struct E {
      std::string from, label, to;
      Formula guard;
      Update update;
    };
    std::vector<E> es;
    while (!accept('}')) {
      if (accept_word("alphabet")) {
        for (auto& a : name_list()) c.alphabet.insert(a);
      } else if (accept_word("locations") || accept_word("states")) {
        declared = name_list();
      } else if (accept_word("error")) {
        errors = name_list();
      } else if (accept_word("init")) {
        init = ident("a location");
        expect(';');
      } else if (accept_word("var")) {
        VarDecl d;
        d.name = ident("a variable");
        expect(':');
        std::string type = ident("nat or int");
        if (type == "int")
          d.natural = false;
        else if (type != "nat")
          fail("variable type must be nat or int");
        if (accept('=')) d.init = integer();
        expect(';');
        c.vars.push_back(d);
      } else {
        E e;
        e.from = ident("a location or declaration");
        expect('-');
        e.label = label();
        e.to = ident("a target location");
        if (accept('[')) e.guard = within(raw_until(']'), [](const std::string& t) { return parse_formula(t); });
        if (accept('{')) e.update = update(raw_until('}'));
        expect(';');
        es.push_back(std::move(e));
      }
    }
    for (const auto& n : declared) c.location(n);
    if (!init) fail("missing init");
    c.initial = c.location(*init);
    for (auto& e : es) {
      std::size_t from = c.location(e.from);
      std::size_t to = c.location(e.to);
      c.edges.push_back(Edge{from, e.label, e.guard, std::move(e.update), to});
    }
    for (const auto& n : errors) c.error[c.location(n)] = 1;
    return c;
  }

  Update update(const Raw& r) {
    Update u;
    std::size_t start = 0;
    const std::string& t = r.text;
    while (start <= t.size()) {
      std::size_t end = t.find_first_of(";,", start);
      if (end == std::string::npos) end = t.size();
      std::string part = t.substr(start, end - start);
      Raw piece{part, r.line, r.col + static_cast<int>(start)};
      for (std::size_t i = 0; i < start; ++i)
        if (t[i] == '\n') {
          ++piece.line;
          piece.col = static_cast<int>(start - i);
        }
      auto first = part.find_first_not_of(" \t\r\n");
      if (first != std::string::npos) {
        auto last = part.find_last_not_of(" \t\r\n");
        std::string body = part.substr(first, last - first + 1);
        if (body.rfind("havoc", 0) == 0 && body.find(":=") == std::string::npos) {
          auto open = body.find('('), close = body.rfind(')');
          if (open == std::string::npos || close == std::string::npos || close < open)
            fail("malformed havoc", piece.line, piece.col);
          std::string v = body.substr(open + 1, close - open - 1);
          v.erase(0, v.find_first_not_of(" \t"));
          v.erase(v.find_last_not_of(" \t") + 1);
          u.havocs.push_back(v);
        } else {
          auto assign = body.find(":=");
          if (assign == std::string::npos) fail("expected 'var := term' or 'havoc(var)'", piece.line, piece.col);
          std::string v = body.substr(0, assign);
          v.erase(v.find_last_not_of(" \t") + 1);
          Raw rhs{part.substr(first + assign + 2), piece.line, piece.col + static_cast<int>(first + assign + 2)};
          u.assigns.emplace_back(v, within(rhs, [](const std::string& x) { return parse_term(x); }));
        }
      }
      start = end + 1;
    }
    return u;
  }

  PredicateSet preds_body() {
    PredicateSet p;
    while (!accept('}')) {
      skip();
      Raw r = raw_until(';');
      Formula f = within(r, [](const std::string& t) { return parse_formula(t); });
      add_predicates(p, {f});
    }
    return p;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

std::string list(const std::vector<std::string>& xs) {
  std::string s = "{";
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : " ") + xs[i];
  return s + (xs.empty() ? "}" : " }");
}

}  // namespace

Model parse_model(std::string_view text) { return Parser(text).run(); }

Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_model(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(e.message(), e.line(), e.column(), path);
  }
}

std::string print_csm_block(const std::string& keyword, const std::string& name, const Csm& m) {
  std::vector<std::string> names, errors;
  for (StateId s = 0; s < m.size(); ++s) {
    const std::string& n = m.name(s);
    bool plain = !n.empty() && std::all_of(n.begin(), n.end(), [](char c) {
      return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '\'';
    });
    names.push_back(plain ? n : "s" + std::to_string(s));
    if (m.is_error(s)) errors.push_back(names.back());
  }
  std::string out = keyword + " " + name + " {\n";
  out += "  alphabet " + list({m.alphabet().begin(), m.alphabet().end()}) + "\n";
  out += "  states " + list(names) + "\n";
  if (!errors.empty()) out += "  error " + list(errors) + "\n";
  out += "  init " + names.at(m.initial()) + ";\n";
  for (const auto& t : m.transitions()) out += "  " + names[t.from] + " -" + t.label + "-> " + names[t.to] + ";\n";
  return out + "}\n";
}

std::string print_symbolic_block(const SymbolicComponent& c) {
  std::string out = "symbolic " + c.name + " {\n";
  out += "  alphabet " + list({c.alphabet.begin(), c.alphabet.end()}) + "\n";
  for (const auto& v : c.vars)
    out += "  var " + v.name + ": " + (v.natural ? "nat" : "int") + " = " + std::to_string(v.init) + ";\n";
  out += "  locations " + list(c.locations) + "\n";
  std::vector<std::string> errors;
  for (std::size_t l = 0; l < c.locations.size(); ++l)
    if (c.is_error(l)) errors.push_back(c.locations[l]);
  if (!errors.empty()) out += "  error " + list(errors) + "\n";
  out += "  init " + c.locations.at(c.initial) + ";\n";
  for (const auto& e : c.edges) {
    out += "  " + c.locations[e.from] + " -" + e.label + "-> " + c.locations[e.to];
    if (!e.guard.is_true()) out += " [" + e.guard.to_string() + "]";
    if (!e.update.empty()) {
      std::string u;
      for (const auto& [v, t] : e.update.assigns) u += (u.empty() ? "" : "; ") + v + " := " + t.to_string();
      for (const auto& v : e.update.havocs) u += (u.empty() ? "" : "; ") + std::string("havoc(") + v + ")";
      out += " { " + u + " }";
    }
    out += ";\n";
  }
  return out + "}\n";
}

std::string print_preds_block(const std::string& name, const PredicateSet& p) {
  std::string out = "preds " + name + " {\n";
  for (const auto& f : p) out += "  " + f.to_string() + ";\n";
  return out + "}\n";
}

std::string print_model(const Model& m) {
  std::string out;
  for (const auto& [k, name] : m.order) {
    if (!out.empty()) out += "\n";
    switch (k) {
      case Model::Kind::csm:
        out += print_csm_block("csm", name, m.csms.at(name));
        break;
      case Model::Kind::property:
        out += print_csm_block("property", name, m.csms.at(name));
        break;
      case Model::Kind::symbolic:
        out += print_symbolic_block(m.symbolics.at(name));
        break;
      case Model::Kind::preds:
        out += print_preds_block(name, m.preds.at(name));
        break;
    }
  }
  return out;
}

}  // namespace agv
