#include "indexlang/expr.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>

#include "indexlang/error.hpp"

namespace indexlang::sym {

namespace detail {

struct Node {
  Kind kind = Kind::Number;
  Rational value;
  std::string name;
  Func fn = Func::Sin;
  long exponent = 0;
  // Apply: {arg}; Power: {base}; Sum: terms; Product: factors.
  std::vector<Expr> ops;
  std::size_t hash = 0;
};

}  // namespace detail

using detail::Node;

namespace {

std::size_t mix(std::size_t seed, std::size_t value) {
  return seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t hash_rational(const Rational& q) {
  std::size_t h = std::hash<long>{}(mpz_get_si(q.get_num_mpz_t()));
  h = mix(h, mpz_size(q.get_num_mpz_t()));
  h = mix(h, std::hash<long>{}(mpz_get_si(q.get_den_mpz_t())));
  return h;
}

}  // namespace

struct Builder {
  static Expr make(Node node) {
    std::size_t h = static_cast<std::size_t>(node.kind) * 0x100000001b3ULL;
    switch (node.kind) {
      case Kind::Number: h = mix(h, hash_rational(node.value)); break;
      case Kind::Symbol: h = mix(h, std::hash<std::string>{}(node.name)); break;
      case Kind::Apply: h = mix(h, static_cast<std::size_t>(node.fn)); break;
      case Kind::Power: h = mix(h, std::hash<long>{}(node.exponent)); break;
      default: break;
    }
    for (const Expr& op : node.ops) h = mix(h, op.hash());
    node.hash = h;
    return Expr(std::make_shared<const Node>(std::move(node)));
  }

  static Expr number_node(Rational value) {
    Node n;
    n.kind = Kind::Number;
    n.value = std::move(value);
    return make(std::move(n));
  }

  static Expr nary(Kind kind, std::vector<Expr> ops) {
    Node n;
    n.kind = kind;
    n.ops = std::move(ops);
    return make(std::move(n));
  }

  static Expr power_node(Expr base, long exponent) {
    Node n;
    n.kind = Kind::Power;
    n.exponent = exponent;
    n.ops.push_back(std::move(base));
    return make(std::move(n));
  }

  static Expr apply_node(Func fn, Expr arg) {
    Node n;
    n.kind = Kind::Apply;
    n.fn = fn;
    n.ops.push_back(std::move(arg));
    return make(std::move(n));
  }

  static Expr symbol_node(std::string name) {
    Node n;
    n.kind = Kind::Symbol;
    n.name = std::move(name);
    return make(std::move(n));
  }

  static const Node& node(const Expr& e) { return *e.node_; }
  static bool same(const Expr& a, const Expr& b) { return a.node_ == b.node_; }
};

namespace {

const Expr& zero_expr() {
  static const Expr z = Builder::number_node(Rational(0));
  return z;
}

const Expr& one_expr() {
  static const Expr o = Builder::number_node(Rational(1));
  return o;
}

Rational rational_pow(const Rational& q, long n) {
  if (n < 0) {
    if (q == 0) throw Error(ErrorKind::Arithmetic, "division by zero (0 raised to a negative power)");
    Rational inv = 1 / q;
    return rational_pow(inv, -n);
  }
  Integer num, den;
  mpz_pow_ui(num.get_mpz_t(), q.get_num_mpz_t(), static_cast<unsigned long>(n));
  mpz_pow_ui(den.get_mpz_t(), q.get_den_mpz_t(), static_cast<unsigned long>(n));
  Rational r(num, den);
  r.canonicalize();
  return r;
}

// Splits a canonical term into numeric coefficient and the remaining monomial.
std::pair<Rational, Expr> split_coefficient(const Expr& term) {
  if (term.kind() == Kind::Product) {
    auto ops = term.operands();
    if (ops.front().is_number()) {
      const Rational& c = ops.front().number();
      if (ops.size() == 2) return {c, ops[1]};
      return {c, Builder::nary(Kind::Product, std::vector<Expr>(ops.begin() + 1, ops.end()))};
    }
  }
  return {Rational(1), term};
}

Expr attach_coefficient(const Rational& c, const Expr& mono) {
  if (c == 1) return mono;
  std::vector<Expr> ops{Builder::number_node(c)};
  if (mono.kind() == Kind::Product) {
    ops.insert(ops.end(), mono.operands().begin(), mono.operands().end());
  } else {
    ops.push_back(mono);
  }
  return Builder::nary(Kind::Product, std::move(ops));
}

struct Less {
  bool operator()(const Expr& a, const Expr& b) const { return (a <=> b) < 0; }
};

using TermMap = std::map<Expr, Rational, Less>;

void absorb_term(const Expr& term, TermMap& terms, Rational& constant) {
  switch (term.kind()) {
    case Kind::Number:
      constant += term.number();
      return;
    case Kind::Sum:
      for (const Expr& t : term.operands()) absorb_term(t, terms, constant);
      return;
    default: {
      auto [c, mono] = split_coefficient(term);
      terms[mono] += c;
    }
  }
}

Expr build_sum(const Rational& constant, const TermMap& terms) {
  std::vector<Expr> out;
  if (constant != 0) out.push_back(Builder::number_node(constant));
  for (const auto& [mono, c] : terms) {
    if (c != 0) out.push_back(attach_coefficient(c, mono));
  }
  if (out.empty()) return zero_expr();
  if (out.size() == 1) return out.front();
  return Builder::nary(Kind::Sum, std::move(out));
}

using PowerMap = std::map<Expr, long, Less>;

void absorb_factor(const Expr& f, PowerMap& powers, Rational& coeff) {
  switch (f.kind()) {
    case Kind::Number:
      coeff *= f.number();
      return;
    case Kind::Product:
      for (const Expr& g : f.operands()) absorb_factor(g, powers, coeff);
      return;
    case Kind::Power:
      powers[f.base()] += f.exponent();
      return;
    default:
      powers[f] += 1;
  }
}

}  // namespace

// --- Expr accessors -------------------------------------------------------

Expr::Expr() : Expr(zero_expr()) {}

Kind Expr::kind() const { return node_->kind; }
bool Expr::is_integer() const { return is_number() && node_->value.get_den() == 1; }
bool Expr::is_zero() const { return is_number() && node_->value == 0; }
bool Expr::is_one() const { return is_number() && node_->value == 1; }
const Rational& Expr::number() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
Func Expr::func() const { return node_->fn; }
const Expr& Expr::arg() const { return node_->ops.front(); }
const Expr& Expr::base() const { return node_->ops.front(); }
long Expr::exponent() const { return node_->exponent; }
std::span<const Expr> Expr::operands() const { return node_->ops; }
std::size_t Expr::hash() const { return node_->hash; }

bool operator==(const Expr& a, const Expr& b) {
  if (Builder::same(a, b)) return true;
  if (a.hash() != b.hash()) return false;
  return (a <=> b) == 0;
}

std::strong_ordering operator<=>(const Expr& a, const Expr& b) {
  if (Builder::same(a, b)) return std::strong_ordering::equal;
  if (a.kind() != b.kind()) return a.kind() <=> b.kind();
  switch (a.kind()) {
    case Kind::Number: {
      int c = cmp(a.number(), b.number());
      return c <=> 0;
    }
    case Kind::Symbol:
      return a.name().compare(b.name()) <=> 0;
    case Kind::Apply:
      if (a.func() != b.func()) return a.func() <=> b.func();
      return a.arg() <=> b.arg();
    case Kind::Power:
      if (auto c = a.base() <=> b.base(); c != 0) return c;
      return a.exponent() <=> b.exponent();
    case Kind::Product:
    case Kind::Sum: {
      auto x = a.operands();
      auto y = b.operands();
      for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
        if (auto c = x[i] <=> y[i]; c != 0) return c;
      }
      return x.size() <=> y.size();
    }
  }
  return std::strong_ordering::equal;
}

// --- canonical constructors -----------------------------------------------

Expr integer(long value) { return Builder::number_node(Rational(value)); }
Expr integer(const Integer& value) { return Builder::number_node(Rational(value)); }

Expr number(const Rational& value) {
  Rational v = value;
  v.canonicalize();
  return Builder::number_node(std::move(v));
}

Expr rational(const Integer& p, const Integer& q) {
  if (q == 0) throw Error(ErrorKind::Arithmetic, "division by zero");
  Rational v(p, q);
  v.canonicalize();
  return Builder::number_node(std::move(v));
}

Expr symbol(std::string name) { return Builder::symbol_node(std::move(name)); }

Expr apply(Func fn, Expr arg) {
  if (arg.is_zero()) return fn == Func::Sin ? zero_expr() : one_expr();
  return Builder::apply_node(fn, std::move(arg));
}

Expr add(std::span<const Expr> terms) {
  TermMap map;
  Rational constant = 0;
  for (const Expr& t : terms) absorb_term(t, map, constant);
  return build_sum(constant, map);
}

Expr add(const Expr& a, const Expr& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.is_number() && b.is_number()) return Builder::number_node(a.number() + b.number());
  const Expr both[] = {a, b};
  return add(both);
}

Expr mul(std::span<const Expr> factors) {
  PowerMap powers;
  Rational coeff = 1;
  for (const Expr& f : factors) {
    if (f.is_zero()) return zero_expr();
    absorb_factor(f, powers, coeff);
  }
  std::erase_if(powers, [](const auto& entry) { return entry.second == 0; });
  // c·(a + b) -> c·a + c·b
  if (coeff != 1 && powers.size() == 1 && powers.begin()->second == 1 &&
      powers.begin()->first.kind() == Kind::Sum) {
    std::vector<Expr> terms;
    for (const Expr& t : powers.begin()->first.operands()) terms.push_back(mul(Builder::number_node(coeff), t));
    return add(terms);
  }
  std::vector<Expr> out;
  if (coeff != 1) out.push_back(Builder::number_node(coeff));
  for (const auto& [base, e] : powers) {
    if (e == 0) continue;
    out.push_back(e == 1 ? base : Builder::power_node(base, e));
  }
  if (out.empty()) return Builder::number_node(coeff);
  if (out.size() == 1) return out.front();
  return Builder::nary(Kind::Product, std::move(out));
}

Expr mul(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return zero_expr();
  if (a.is_one()) return b;
  if (b.is_one()) return a;
  if (a.is_number() && b.is_number()) return Builder::number_node(a.number() * b.number());
  const Expr both[] = {a, b};
  return mul(both);
}

Expr neg(const Expr& a) { return mul(integer(-1), a); }

Expr sub(const Expr& a, const Expr& b) { return add(a, neg(b)); }

Expr div(const Expr& a, const Expr& b) {
  if (b.is_zero()) throw Error(ErrorKind::Arithmetic, "division by zero");
  return mul(a, pow(b, -1));
}

Expr pow(const Expr& base, long exponent) {
  if (exponent == 0) return one_expr();
  if (exponent == 1) return base;
  switch (base.kind()) {
    case Kind::Number:
      return Builder::number_node(rational_pow(base.number(), exponent));
    case Kind::Power:
      return pow(base.base(), base.exponent() * exponent);
    case Kind::Product: {
      std::vector<Expr> parts;
      parts.reserve(base.operands().size());
      for (const Expr& f : base.operands()) parts.push_back(pow(f, exponent));
      return mul(parts);
    }
    default:
      return Builder::power_node(base, exponent);
  }
}

namespace raw {

Expr sum(std::vector<Expr> terms) { return Builder::nary(Kind::Sum, std::move(terms)); }
Expr product(std::vector<Expr> factors) { return Builder::nary(Kind::Product, std::move(factors)); }
Expr power(Expr base, long exponent) { return Builder::power_node(std::move(base), exponent); }

Expr fraction(const Integer& p, const Integer& q) {
  if (q == 0) throw Error(ErrorKind::Arithmetic, "division by zero");
  Rational v;
  mpz_set(mpq_numref(v.get_mpq_t()), p.get_mpz_t());
  mpz_set(mpq_denref(v.get_mpq_t()), q.get_mpz_t());
  return Builder::number_node(std::move(v));
}

}  // namespace raw

Expr canonicalize(const Expr& e) {
  switch (e.kind()) {
    case Kind::Number: {
      if (e.number().get_den() == 0) throw Error(ErrorKind::Arithmetic, "division by zero");
      return number(e.number());
    }
    case Kind::Symbol:
      return e;
    case Kind::Apply:
      return apply(e.func(), canonicalize(e.arg()));
    case Kind::Power:
      return pow(canonicalize(e.base()), e.exponent());
    case Kind::Product:
    case Kind::Sum: {
      std::vector<Expr> ops;
      ops.reserve(e.operands().size());
      for (const Expr& op : e.operands()) ops.push_back(canonicalize(op));
      return e.kind() == Kind::Sum ? add(ops) : mul(ops);
    }
  }
  return e;
}

bool is_canonical(const Expr& e) {
  switch (e.kind()) {
    case Kind::Number: {
      Rational copy = e.number();
      copy.canonicalize();
      return cmp(copy, e.number()) == 0 && mpz_cmp(copy.get_den_mpz_t(), e.number().get_den_mpz_t()) == 0 &&
             e.number().get_den() > 0;
    }
    case Kind::Symbol:
      return true;
    case Kind::Apply:
      return is_canonical(e.arg()) && !e.arg().is_zero();
    case Kind::Power: {
      Kind bk = e.base().kind();
      return e.exponent() != 0 && e.exponent() != 1 && bk != Kind::Number && bk != Kind::Product &&
             bk != Kind::Power && is_canonical(e.base());
    }
    case Kind::Product:
    case Kind::Sum: {
      auto ops = e.operands();
      if (ops.size() < 2) return false;
      for (std::size_t i = 0; i < ops.size(); ++i) {
        if (ops[i].kind() == e.kind()) return false;
        if (ops[i].is_number() && i != 0) return false;
        if (!is_canonical(ops[i])) return false;
      }
      if (e.kind() == Kind::Product && ops.front().is_number() && ops.front().is_one()) return false;
      if (ops.front().is_zero()) return false;
      return canonicalize(e) == e;
    }
  }
  return false;
}

// --- calculus and rewriting ------------------------------------------------

namespace {

bool depends_on(const Expr& e, const std::string& var) {
  switch (e.kind()) {
    case Kind::Number: return false;
    case Kind::Symbol: return e.name() == var;
    default:
      for (const Expr& op : e.operands()) {
        if (depends_on(op, var)) return true;
      }
      return false;
  }
}

}  // namespace

Expr differentiate(const Expr& e, const std::string& var) {
  if (!depends_on(e, var)) return zero_expr();
  switch (e.kind()) {
    case Kind::Number:
      return zero_expr();
    case Kind::Symbol:
      return one_expr();
    case Kind::Apply: {
      Expr inner = differentiate(e.arg(), var);
      if (e.func() == Func::Sin) return mul(cos(e.arg()), inner);
      const Expr parts[] = {integer(-1), sin(e.arg()), inner};
      return mul(parts);
    }
    case Kind::Power: {
      const Expr parts[] = {integer(e.exponent()), pow(e.base(), e.exponent() - 1),
                            differentiate(e.base(), var)};
      return mul(parts);
    }
    case Kind::Sum: {
      std::vector<Expr> terms;
      for (const Expr& t : e.operands()) terms.push_back(differentiate(t, var));
      return add(terms);
    }
    case Kind::Product: {
      auto ops = e.operands();
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < ops.size(); ++i) {
        Expr d = differentiate(ops[i], var);
        if (d.is_zero()) continue;
        std::vector<Expr> factors(ops.begin(), ops.end());
        factors[i] = d;
        terms.push_back(mul(factors));
      }
      return add(terms);
    }
  }
  return zero_expr();
}

Expr substitute(const Expr& e, const std::string& var, const Expr& replacement) {
  switch (e.kind()) {
    case Kind::Number:
      return e;
    case Kind::Symbol:
      return e.name() == var ? replacement : e;
    case Kind::Apply:
      return apply(e.func(), substitute(e.arg(), var, replacement));
    case Kind::Power:
      return pow(substitute(e.base(), var, replacement), e.exponent());
    case Kind::Sum:
    case Kind::Product: {
      std::vector<Expr> ops;
      for (const Expr& op : e.operands()) ops.push_back(substitute(op, var, replacement));
      return e.kind() == Kind::Sum ? add(ops) : mul(ops);
    }
  }
  return e;
}

namespace {

std::vector<Expr> terms_of(const Expr& e) {
  if (e.kind() == Kind::Sum) return {e.operands().begin(), e.operands().end()};
  return {e};
}

Expr distribute(const Expr& a, const Expr& b) {
  if (a.kind() != Kind::Sum && b.kind() != Kind::Sum) return mul(a, b);
  std::vector<Expr> products;
  for (const Expr& x : terms_of(a)) {
    for (const Expr& y : terms_of(b)) products.push_back(mul(x, y));
  }
  return add(products);
}

}  // namespace

Expr expand(const Expr& e) {
  switch (e.kind()) {
    case Kind::Number:
    case Kind::Symbol:
      return e;
    case Kind::Apply:
      return apply(e.func(), expand(e.arg()));
    case Kind::Power: {
      Expr b = expand(e.base());
      if (e.exponent() > 0 && b.kind() == Kind::Sum) {
        Expr acc = b;
        for (long i = 1; i < e.exponent(); ++i) acc = distribute(acc, b);
        return acc;
      }
      return pow(b, e.exponent());
    }
    case Kind::Sum: {
      std::vector<Expr> terms;
      for (const Expr& t : e.operands()) terms.push_back(expand(t));
      return add(terms);
    }
    case Kind::Product: {
      Expr acc = one_expr();
      for (const Expr& f : e.operands()) acc = distribute(acc, expand(f));
      return acc;
    }
  }
  return e;
}

Expr collapse_pythagorean(const Expr& e) {
  if (e.kind() != Kind::Sum) return e;
  TermMap terms;
  Rational constant = 0;
  absorb_term(e, terms, constant);

  bool changed = true;
  bool any = false;
  while (changed) {
    changed = false;
    // Restart the scan after every rewrite; the rewrite erases map entries.
    for (auto it = terms.begin(); it != terms.end(); ++it) {
      const Expr mono = it->first;
      const Rational c = it->second;
      std::vector<Expr> factors =
          mono.kind() == Kind::Product ? std::vector<Expr>(mono.operands().begin(), mono.operands().end())
                                       : std::vector<Expr>{mono};
      for (const Expr& f : factors) {
        if (f.kind() != Kind::Power || f.exponent() < 2) continue;
        if (f.base().kind() != Kind::Apply || f.base().func() != Func::Sin) continue;
        const Expr& u = f.base().arg();
        const Expr inv_sin2 = pow(sin(u), -2);
        const Expr partner_parts[] = {mono, pow(cos(u), 2), inv_sin2};
        Expr partner = mul(partner_parts);
        auto [pc, pmono] = split_coefficient(partner);
        auto hit = terms.find(pmono);
        if (hit == terms.end() || hit->second != c * pc) continue;
        Expr reduced = mul(mono, inv_sin2);
        terms.erase(hit);
        terms.erase(mono);
        absorb_term(mul(number(c), reduced), terms, constant);
        changed = true;
        any = true;
        break;
      }
      if (changed) break;
    }
  }
  if (!any) return e;
  return build_sum(constant, terms);
}

Expr simplify(const Expr& e) {
  switch (e.kind()) {
    case Kind::Number:
    case Kind::Symbol:
      return e;
    case Kind::Apply:
      return apply(e.func(), simplify(e.arg()));
    case Kind::Power:
      return pow(simplify(e.base()), e.exponent());
    case Kind::Product: {
      std::vector<Expr> ops;
      for (const Expr& f : e.operands()) ops.push_back(simplify(f));
      return mul(ops);
    }
    case Kind::Sum: {
      std::vector<Expr> ops;
      for (const Expr& t : e.operands()) ops.push_back(simplify(t));
      return collapse_pythagorean(add(ops));
    }
  }
  return e;
}

Expr expand_and_simplify(const Expr& e) { return simplify(expand(e)); }

// --- numeric evaluation -----------------------------------------------------

namespace {

template <typename Real, typename Binding>
Real eval_as(const Expr& e, const Binding& env) {
  switch (e.kind()) {
    case Kind::Number:
      return static_cast<Real>(mpz_get_d(e.number().get_num_mpz_t())) /
             static_cast<Real>(mpz_get_d(e.number().get_den_mpz_t()));
    case Kind::Symbol: {
      auto it = env.find(e.name());
      if (it == env.end()) throw Error(ErrorKind::Evaluation, "no numeric value bound for symbol " + e.name());
      return static_cast<Real>(it->second);
    }
    case Kind::Apply: {
      Real x = eval_as<Real>(e.arg(), env);
      return e.func() == Func::Sin ? std::sin(x) : std::cos(x);
    }
    case Kind::Power: {
      Real b = eval_as<Real>(e.base(), env);
      long n = e.exponent();
      Real acc = 1;
      for (long i = 0; i < (n < 0 ? -n : n); ++i) acc *= b;
      return n < 0 ? Real(1) / acc : acc;
    }
    case Kind::Sum: {
      Real acc = 0;
      for (const Expr& t : e.operands()) acc += eval_as<Real>(t, env);
      return acc;
    }
    case Kind::Product: {
      Real acc = 1;
      for (const Expr& f : e.operands()) acc *= eval_as<Real>(f, env);
      return acc;
    }
  }
  return 0;
}

void collect_symbols(const Expr& e, std::vector<std::string>& out) {
  if (e.kind() == Kind::Symbol) {
    if (std::find(out.begin(), out.end(), e.name()) == out.end()) out.push_back(e.name());
    return;
  }
  for (const Expr& op : e.operands()) collect_symbols(op, out);
}

}  // namespace

double eval_numeric(const Expr& e, const NumericBinding& env) { return eval_as<double>(e, env); }

long double eval_numeric_extended(const Expr& e, const ExtendedBinding& env) {
  return eval_as<long double>(e, env);
}

std::vector<std::string> free_symbols(const Expr& e) {
  std::vector<std::string> out;
  collect_symbols(e, out);
  std::sort(out.begin(), out.end());
  return out;
}

// --- printing ----------------------------------------------------------------

namespace {

std::string print_power(const Expr& base, long n) {
  std::string b = to_string(base);
  if (n == 1) return b;
  return b + "^" + std::to_string(n);
}

std::string join_as(const char* op, const std::vector<std::string>& items) {
  if (items.empty()) return "1";
  if (items.size() == 1) return items.front();
  std::string out = "(";
  out += op;
  for (const auto& s : items) out += " " + s;
  return out + ")";
}

}  // namespace

std::string to_string(const Expr& e) {
  switch (e.kind()) {
    case Kind::Number: {
      const Rational& q = e.number();
      if (q.get_den() == 1) return q.get_num().get_str();
      return "(/ " + q.get_num().get_str() + " " + q.get_den().get_str() + ")";
    }
    case Kind::Symbol:
      if (!e.name().empty() && e.name().front() == kDummySymbolPrefix) return "#";
      return e.name();
    case Kind::Apply:
      return std::string(e.func() == Func::Sin ? "(sin " : "(cos ") + to_string(e.arg()) + ")";
    case Kind::Power:
      if (e.exponent() < 0) return "(/ 1 " + print_power(e.base(), -e.exponent()) + ")";
      return print_power(e.base(), e.exponent());
    case Kind::Product: {
      std::vector<std::string> num, den;
      for (const Expr& f : e.operands()) {
        if (f.is_number()) {
          if (f.number().get_num() != 1) num.push_back(f.number().get_num().get_str());
          if (f.number().get_den() != 1) den.push_back(f.number().get_den().get_str());
        } else if (f.kind() == Kind::Power && f.exponent() < 0) {
          den.push_back(print_power(f.base(), -f.exponent()));
        } else {
          num.push_back(to_string(f));
        }
      }
      std::string top = join_as("*", num);
      if (den.empty()) return top;
      return "(/ " + top + " " + join_as("*", den) + ")";
    }
    case Kind::Sum: {
      std::string out = "(+";
      for (const Expr& t : e.operands()) out += " " + to_string(t);
      return out + ")";
    }
  }
  return "?";
}

}  // namespace indexlang::sym
