#ifndef AGV_FORMULA_HPP
#define AGV_FORMULA_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "agv/error.hpp"

namespace agv {

using Var = std::string;
using Valuation = std::map<Var, std::int64_t>;

// Checked int64 arithmetic; overflow is reported as ResourceError.
std::int64_t checked_add(std::int64_t a, std::int64_t b);
std::int64_t checked_mul(std::int64_t a, std::int64_t b);
// Euclidean remainder and quotient for k > 0: 0 <= r < k.
std::int64_t euclid_mod(std::int64_t a, std::int64_t k);
std::int64_t floor_div(std::int64_t a, std::int64_t b);
std::int64_t ceil_div(std::int64_t a, std::int64_t b);

class LinearTerm;

struct ModTerm {
  std::shared_ptr<const LinearTerm> inner;
  std::int64_t k = 1;
};

/// Integer combination of variables and `(t mod k)` subterms plus a constant.
class LinearTerm {
 public:
  LinearTerm() = default;
  static LinearTerm constant(std::int64_t c);
  static LinearTerm variable(const Var& v, std::int64_t coeff = 1);
  // Inner coefficients are reduced modulo k; constant inners fold.
  static LinearTerm mod(const LinearTerm& inner, std::int64_t k);

  const std::map<Var, std::int64_t>& vars() const { return vars_; }
  // Keyed by the printed form of the mod subterm.
  const std::map<std::string, std::pair<ModTerm, std::int64_t>>& mods() const { return mods_; }
  std::int64_t constant_part() const { return constant_; }
  bool is_constant() const { return vars_.empty() && mods_.empty(); }

  LinearTerm operator+(const LinearTerm& o) const;
  LinearTerm operator-(const LinearTerm& o) const;
  LinearTerm operator-() const { return scaled(-1); }
  LinearTerm scaled(std::int64_t k) const;
  LinearTerm without_constant() const;
  // Divides every coefficient and the constant; caller guarantees exactness.
  LinearTerm divided(std::int64_t g) const;
  // gcd of the non-constant coefficients, 0 when constant.
  std::int64_t coefficient_gcd() const;

  std::int64_t eval(const Valuation& v) const;
  LinearTerm substitute(const std::map<Var, LinearTerm>& s) const;
  void collect_vars(std::set<Var>& out) const;

  std::string to_string() const;
  friend bool operator==(const LinearTerm& a, const LinearTerm& b) { return a.to_string() == b.to_string(); }

 private:
  void add_mod(const ModTerm& m, std::int64_t coeff);

  std::map<Var, std::int64_t> vars_;
  std::map<std::string, std::pair<ModTerm, std::int64_t>> mods_;
  std::int64_t constant_ = 0;
};

/// Quantifier-free formula over linear integer atoms. Atoms are kept in the
/// normal forms `t <= 0` and `t = 0`, with coefficients divided by their gcd.
class Formula {
 public:
  enum class Kind { constant, le, eq, negation, conjunction, disjunction };

  Formula() : Formula(truth(true)) {}
  static Formula truth(bool value);
  static Formula le(const LinearTerm& t);  // t <= 0
  static Formula eq(const LinearTerm& t);  // t = 0
  static Formula lnot(const Formula& f);
  static Formula land(const std::vector<Formula>& fs);
  static Formula lor(const std::vector<Formula>& fs);
  static Formula implies(const Formula& a, const Formula& b) { return lor({lnot(a), b}); }
  // lhs op rhs, op one of <= < >= > = == !=
  static Formula compare(const LinearTerm& lhs, std::string_view op, const LinearTerm& rhs);

  Kind kind() const { return node_->kind; }
  bool value() const { return node_->value; }
  const LinearTerm& term() const { return node_->term; }
  const std::vector<Formula>& children() const { return node_->children; }
  bool is_true() const { return kind() == Kind::constant && value(); }
  bool is_false() const { return kind() == Kind::constant && !value(); }
  bool is_atom() const { return kind() == Kind::le || kind() == Kind::eq; }

  bool eval(const Valuation& v) const;
  Formula substitute(const std::map<Var, LinearTerm>& s) const;
  std::set<Var> vars() const;
  // Atomic subformulas (le/eq), in first-occurrence order, deduplicated.
  std::vector<Formula> atoms() const;

  const std::string& to_string() const { return node_->text; }
  friend bool operator==(const Formula& a, const Formula& b) { return a.to_string() == b.to_string(); }
  friend bool operator<(const Formula& a, const Formula& b) { return a.to_string() < b.to_string(); }

 private:
  struct Node {
    Kind kind = Kind::constant;
    bool value = true;
    LinearTerm term;
    std::vector<Formula> children;
    std::string text;
  };
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Formula make(Node n);

  std::shared_ptr<const Node> node_;
};

// Parsers for the textual syntax: `x mod 5 > 5 and not (y = 0)`. Errors carry
// 1-based line/column positions within the text.
LinearTerm parse_term(std::string_view text);
Formula parse_formula(std::string_view text);

}  // namespace agv

#endif  // AGV_FORMULA_HPP
