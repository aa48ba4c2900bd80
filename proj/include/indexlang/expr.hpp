#pragma once

// Exact symbolic scalars: rationals, symbols, sums, products, integer powers
// and sin/cos applications, always held in canonical form.

#include <gmpxx.h>

#include <compare>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace indexlang::sym {

using Integer = mpz_class;
using Rational = mpq_class;

// Declaration order is the first key of the total order on expressions.
enum class Kind : unsigned char { Number, Symbol, Apply, Power, Product, Sum };

enum class Func : unsigned char { Sin, Cos };

class Expr;

namespace detail {
struct Node;
}

class Expr {
 public:
  /// Integer 0.
  Expr();

  Kind kind() const;
  bool is_number() const { return kind() == Kind::Number; }
  bool is_integer() const;
  bool is_zero() const;
  bool is_one() const;
  bool is_symbol() const { return kind() == Kind::Symbol; }

  const Rational& number() const;
  const std::string& name() const;
  Func func() const;
  const Expr& arg() const;
  const Expr& base() const;
  long exponent() const;
  /// Terms of a Sum or factors of a Product.
  std::span<const Expr> operands() const;

  std::size_t hash() const;

  friend bool operator==(const Expr& a, const Expr& b);
  friend std::strong_ordering operator<=>(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const detail::Node> node_;

  friend struct Builder;
};

// Canonical constructors. Every result satisfies the canonical-form
// invariants; see is_canonical().
Expr integer(long value);
Expr integer(const Integer& value);
Expr number(const Rational& value);
/// Reduced p/q; q == 0 raises an arithmetic error.
Expr rational(const Integer& p, const Integer& q);
Expr symbol(std::string name);
Expr apply(Func fn, Expr arg);
inline Expr sin(Expr arg) { return apply(Func::Sin, std::move(arg)); }
inline Expr cos(Expr arg) { return apply(Func::Cos, std::move(arg)); }

Expr add(const Expr& a, const Expr& b);
Expr add(std::span<const Expr> terms);
Expr mul(const Expr& a, const Expr& b);
Expr mul(std::span<const Expr> factors);
Expr neg(const Expr& a);
Expr sub(const Expr& a, const Expr& b);
/// Raises an arithmetic error when b is canonically zero.
Expr div(const Expr& a, const Expr& b);
Expr pow(const Expr& base, long exponent);

/// Uncanonical construction, used to feed canonicalize() and in tests.
namespace raw {
Expr sum(std::vector<Expr> terms);
Expr product(std::vector<Expr> factors);
Expr power(Expr base, long exponent);
/// Unreduced fraction; zero denominator raises an arithmetic error.
Expr fraction(const Integer& p, const Integer& q);
}  // namespace raw

Expr canonicalize(const Expr& e);
bool is_canonical(const Expr& e);

Expr differentiate(const Expr& e, const std::string& var);
Expr substitute(const Expr& e, const std::string& var, const Expr& replacement);

/// Distributes products over sums and multiplies out positive powers of sums.
Expr expand(const Expr& e);
/// Applies sin(u)^2 + cos(u)^2 -> 1 (with any common cofactor) at every sum,
/// bottom-up. Does not expand.
Expr simplify(const Expr& e);
/// Same rewrite, applied to the outermost sum only.
Expr collapse_pythagorean(const Expr& e);
Expr expand_and_simplify(const Expr& e);

using NumericBinding = std::map<std::string, double, std::less<>>;
using ExtendedBinding = std::map<std::string, long double, std::less<>>;

/// Raises an unbound-symbol error for free symbols missing from env.
double eval_numeric(const Expr& e, const NumericBinding& env);
long double eval_numeric_extended(const Expr& e, const ExtendedBinding& env);

std::vector<std::string> free_symbols(const Expr& e);

/// Prefix S-expression form: `(* -1 r (sin θ))`, `(/ 3 2)`, `x^2`.
std::string to_string(const Expr& e);

/// Name prefix of the scalar symbols that stand for dummy indices; printed as `#`.
inline constexpr char kDummySymbolPrefix = '#';

struct ExprHash {
  std::size_t operator()(const Expr& e) const { return e.hash(); }
};

}  // namespace indexlang::sym
