#include <algorithm>

#include "indexlang/error.hpp"
#include "indexlang/stdlib.hpp"

namespace indexlang::stdlib {

namespace {

using tensor::ParamKind;
using Args = std::vector<Value>;
using Matrix = std::vector<std::vector<sym::Expr>>;

lang::Param scalar(std::string name) { return {ParamKind::Scalar, std::move(name)}; }
lang::Param tensor_param(std::string name) { return {ParamKind::Tensor, std::move(name)}; }
lang::Param inverted(std::string name) { return {ParamKind::InvertedScalar, std::move(name)}; }

std::vector<sym::Expr> scalars(const Args& args) {
  std::vector<sym::Expr> out;
  out.reserve(args.size());
  for (const auto& a : args) out.push_back(a.scalar());
  return out;
}

long integer_exponent(const sym::Expr& e) {
  if (!e.is_integer() || !e.number().get_num().fits_slong_p())
    throw Error(ErrorKind::Type, "exponent must be an integer, got " + sym::to_string(e));
  return e.number().get_num().get_si();
}

// Exact comparison for numbers; closed expressions (no free symbols) are
// compared numerically. Anything symbolic is incomparable.
int compare(const sym::Expr& a, const sym::Expr& b) {
  if (a.is_number() && b.is_number()) return cmp(a.number(), b.number());
  if (sym::free_symbols(a).empty() && sym::free_symbols(b).empty()) {
    double x = sym::eval_numeric(a, {});
    double y = sym::eval_numeric(b, {});
    return x < y ? -1 : (x > y ? 1 : 0);
  }
  throw Error(ErrorKind::Incomparable,
              "cannot order symbolic values " + sym::to_string(a) + " and " + sym::to_string(b));
}

sym::Expr det(const Matrix& m) {
  const std::size_t n = m.size();
  if (n == 1) return m[0][0];
  if (n == 2) return sym::sub(sym::mul(m[0][0], m[1][1]), sym::mul(m[0][1], m[1][0]));
  std::vector<sym::Expr> terms;
  for (std::size_t c = 0; c < n; ++c) {
    if (m[0][c].is_zero()) continue;
    Matrix minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<sym::Expr> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != c) row.push_back(m[r][k]);
      minor.push_back(std::move(row));
    }
    sym::Expr t = sym::mul(m[0][c], det(minor));
    terms.push_back(c % 2 ? sym::neg(t) : t);
  }
  return sym::add(terms);
}

Matrix to_matrix(const Tensor& m) {
  if (m.rank() != 2 || m.shape()[0] != m.shape()[1])
    throw Error(ErrorKind::Shape, "M.inverse needs a square matrix");
  const std::size_t n = m.shape()[0];
  if (n > 4) throw Error(ErrorKind::Shape, "M.inverse supports matrices up to 4x4");
  Matrix out(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) out[r].push_back(m.data()[r * n + c].scalar());
  return out;
}

Matrix minor_of(const Matrix& m, std::size_t row, std::size_t col) {
  Matrix out;
  for (std::size_t r = 0; r < m.size(); ++r) {
    if (r == row) continue;
    std::vector<sym::Expr> line;
    for (std::size_t c = 0; c < m.size(); ++c)
      if (c != col) line.push_back(m[r][c]);
    out.push_back(std::move(line));
  }
  return out;
}

Value flip(Interpreter&, Args& args) {
  const FunctionPtr& f = args[0].function_ptr();
  if (!f->variadic) f->kinds_for(2);
  auto flipped = std::make_shared<FunctionValue>();
  flipped->name = "flip " + f->name;
  flipped->params = f->variadic ? std::vector<lang::Param>{f->params[0], f->params[0]}
                                : std::vector<lang::Param>{f->params[1], f->params[0]};
  flipped->native = [f](Interpreter& interp, Args& a) { return interp.call_body(*f, {a[1], a[0]}); };
  return Value(FunctionPtr(std::move(flipped)));
}

}  // namespace

sym::Expr determinant(const Tensor& m) { return det(to_matrix(m)); }

Tensor matrix_inverse(const Tensor& t) {
  Matrix m = to_matrix(t);
  const std::size_t n = m.size();
  sym::Expr d = sym::simplify(det(m));
  if (d.is_zero() || sym::expand_and_simplify(d).is_zero())
    throw Error(ErrorKind::Singular, "matrix is singular: determinant simplifies to 0");
  std::vector<Value> data;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      sym::Expr cof = n == 1 ? sym::integer(1) : det(minor_of(m, c, r));
      if ((r + c) % 2) cof = sym::neg(cof);
      data.emplace_back(sym::simplify(sym::div(cof, d)));
    }
  return Tensor({n, n}, std::move(data));
}

std::string_view prelude_source() {
  return R"(
(define $min (lambda [$x $y] (if (less-than? x y) x y)))
(define $. (lambda [%t1 %t2] (contract + (* t1 t2))))
(define $inner-product (lambda [%v1 %v2] (with-symbols {i} (contract + (* v1~i v2_i)))))
(define $mat-mul (lambda [%m1 %m2] (with-symbols {j} (contract + (* m1~#~j m2_j_#)))))
(define $V.* inner-product)
)";
}

void install(Interpreter& in) {
  in.define_native(
      "+", {scalar("x")},
      [](Interpreter&, Args& a) { return Value(sym::collapse_pythagorean(sym::add(scalars(a)))); }, true);
  in.define_native(
      "*", {scalar("x")}, [](Interpreter&, Args& a) { return Value(sym::mul(scalars(a))); }, true);
  in.define_native(
      "-", {scalar("x")},
      [](Interpreter&, Args& a) {
        auto xs = scalars(a);
        if (xs.size() == 1) return Value(sym::neg(xs[0]));
        std::vector<sym::Expr> terms{xs[0]};
        for (std::size_t i = 1; i < xs.size(); ++i) terms.push_back(sym::neg(xs[i]));
        return Value(sym::collapse_pythagorean(sym::add(terms)));
      },
      true);
  in.define_native("/", {scalar("x"), scalar("y")},
                   [](Interpreter&, Args& a) { return Value(sym::div(a[0].scalar(), a[1].scalar())); });
  in.define_native("^", {scalar("x"), scalar("n")}, [](Interpreter&, Args& a) {
    return Value(sym::pow(a[0].scalar(), integer_exponent(a[1].scalar())));
  });
  in.define_native("sin", {scalar("x")}, [](Interpreter&, Args& a) { return Value(sym::sin(a[0].scalar())); });
  in.define_native("cos", {scalar("x")}, [](Interpreter&, Args& a) { return Value(sym::cos(a[0].scalar())); });
  in.define_native("less-than?", {scalar("x"), scalar("y")}, [](Interpreter&, Args& a) {
    return Value(compare(a[0].scalar(), a[1].scalar()) < 0);
  });
  in.define_native("eq?", {scalar("x"), scalar("y")}, [](Interpreter&, Args& a) {
    if (a[0].is_bool() && a[1].is_bool()) return Value(a[0].boolean() == a[1].boolean());
    const sym::Expr& x = a[0].scalar();
    const sym::Expr& y = a[1].scalar();
    if (x == y) return Value(true);
    return Value(compare(x, y) == 0);
  });
  in.define_native("∂/∂", {scalar("f"), inverted("x")}, [](Interpreter&, Args& a) {
    const sym::Expr& x = a[1].scalar();
    if (!x.is_symbol())
      throw Error(ErrorKind::Type, "cannot differentiate with respect to " + sym::to_string(x) + ", not a symbol");
    return Value(sym::simplify(sym::differentiate(a[0].scalar(), x.name())));
  });
  in.define_native("flip", {tensor_param("f")}, flip);
  in.define_native("M.inverse", {tensor_param("m")},
                   [](Interpreter&, Args& a) { return Value(matrix_inverse(a[0].tensor())); });
  in.define_native("expand", {scalar("x")}, [](Interpreter&, Args& a) { return Value(sym::expand(a[0].scalar())); });
  in.define_native("simplify", {scalar("x")},
                   [](Interpreter&, Args& a) { return Value(sym::expand_and_simplify(a[0].scalar())); });

  in.run(prelude_source());
}

}  // namespace indexlang::stdlib
