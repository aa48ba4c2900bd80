// One line per acceptance criterion; exit status is nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <map>
#include <variant>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include <gmpxx.h>

#include "../support/oracles.hpp"
#include "indexlang/error.hpp"
#include "indexlang/evaluator.hpp"
#include "indexlang/golden.hpp"
#include "indexlang/tensor.hpp"
#include "indexlang/torus.hpp"

using namespace indexlang;
using oracle::Dense;
using oracle::Ix;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;
  void fail(const std::string& why) {
    if (passed) detail = why;
    passed = false;
  }
};

int failures = 0;

void report(int n, const std::string& title, const Outcome& o, Clock::time_point start, double budget_s) {
  double secs = std::chrono::duration<double>(Clock::now() - start).count();
  bool ok = o.passed && secs < budget_s;
  if (!ok) ++failures;
  std::printf("%s [%d] %s (%.2fs, budget %.0fs)%s%s\n", ok ? "PASS" : "FAIL", n, title.c_str(), secs, budget_s,
              o.detail.empty() ? "" : ": ", o.detail.c_str());
}

std::optional<ErrorKind> error_kind(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

Dense random_dense(std::mt19937_64& rng, std::vector<std::size_t> shape, long lo, long hi) {
  Dense d;
  d.shape = std::move(shape);
  std::size_t size = 1;
  for (auto s : d.shape) size *= s;
  std::uniform_int_distribution<long> v(lo, hi);
  for (std::size_t k = 0; k < size; ++k) d.data.push_back(v(rng));
  return d;
}

// 1 ---------------------------------------------------------------------------

void golden_corpus() {
  auto start = Clock::now();
  Outcome o;
  auto cases = cli::load_corpus(GOLDEN_DIR);
  auto results = cli::run_suite(cases);
  std::size_t passed = 0;
  for (const auto& r : results) {
    if (r.passed)
      ++passed;
    else
      o.fail(r.name + " printed " + r.actual);
  }
  if (cases.size() < 30) o.fail("only " + std::to_string(cases.size()) + " cases");
  o.detail = std::to_string(passed) + "/" + std::to_string(cases.size()) + " cases" + (o.passed ? "" : "; " + o.detail);
  report(1, "golden corpus reproduces every case", o, start, 5);
}

// 2 ---------------------------------------------------------------------------

void reduction_engine() {
  auto start = Clock::now();
  Outcome o;
  std::mt19937_64 rng(1001);
  const char* names[] = {"i", "j"};
  int mismatches = 0;
  for (int n = 0; n < 1000 && o.passed; ++n) {
    std::size_t rank = 1 + rng() % 4;
    std::vector<std::size_t> shape;
    std::size_t dim = 1 + rng() % 3;
    for (std::size_t a = 0; a < rank; ++a) shape.push_back(rng() % 6 == 0 ? 1 + rng() % 3 : dim);
    Dense d = random_dense(rng, shape, -50, 50);
    std::vector<Ix> ix;
    std::size_t count = 1 + rng() % rank;
    for (std::size_t a = 0; a < count; ++a) {
      int r = static_cast<int>(rng() % 7);
      int code = r < 3 ? 1 : r < 6 ? -1 : 0;
      ix.push_back(Ix{names[rng() % 2], 0, code});
    }
    auto want = oracle::attach(d, ix);
    auto idx = oracle::to_indices(ix);
    const std::string what = oracle::literal(Dense{d.shape, d.data, ix});
    try {
      Value got = tensor::append_indices(oracle::to_tensor(d), idx);
      if (want.dimension_mismatch) {
        o.fail(what + ": expected a dimension mismatch");
        break;
      }
      auto dense = oracle::to_dense(got);
      if (!dense || dense->shape != want.tensor.shape || dense->data != want.tensor.data ||
          !oracle::same_indices(dense->indices, want.tensor.indices))
        o.fail(what + " reduced to " + to_string(got));
    } catch (const Error& e) {
      if (!(want.dimension_mismatch && e.kind() == ErrorKind::DimensionMismatch)) o.fail(what + ": " + e.what());
      ++mismatches;
    }
  }
  if (o.passed) o.detail = "1000 tensors, " + std::to_string(mismatches) + " dimension mismatches";
  report(2, "index reduction equals the enumeration oracle", o, start, 30);
}

// 3 ---------------------------------------------------------------------------

struct BinaryFn {
  std::string body;  // in x and y
  std::function<long(long, long)> eval;
};

BinaryFn random_binary(std::mt19937_64& rng) {
  long a = static_cast<long>(rng() % 7) - 3, b = static_cast<long>(rng() % 7) - 3, c = static_cast<long>(rng() % 5) - 2;
  switch (rng() % 4) {
    case 0:
      return {"(+ (* " + std::to_string(a) + " x) (* " + std::to_string(b) + " y) (* " + std::to_string(c) + " x y))",
              [=](long x, long y) { return a * x + b * y + c * x * y; }};
    case 1: return {"(min x y)", [](long x, long y) { return std::min(x, y); }};
    case 2: return {"(- x y)", [](long x, long y) { return x - y; }};
    default:
      return {"(* x x " + std::to_string(a) + " y)", [=](long x, long y) { return x * x * a * y; }};
  }
}

// Operand description: literal source plus its dense form; a rank-0 operand is
// a plain number.
struct Operand {
  Dense d;
  bool scalar = false;
  long value = 0;
  std::string source() const { return scalar ? std::to_string(value) : oracle::literal(d); }
};

Operand random_operand(std::mt19937_64& rng, bool indexed, std::map<std::string, std::size_t>& dims) {
  Operand op;
  if (rng() % 8 == 0) {
    op.scalar = true;
    op.value = static_cast<long>(rng() % 19) - 9;
    return op;
  }
  const char* names[] = {"i", "j", "k"};
  std::size_t rank = 1 + rng() % 2;
  std::vector<std::size_t> shape;
  std::vector<Ix> ix;
  for (std::size_t a = 0; a < rank; ++a) {
    std::string name = names[rng() % 3];
    auto [it, fresh] = dims.try_emplace(name, 1 + rng() % 3);
    std::size_t dim = rng() % 10 == 0 ? 1 + rng() % 3 : it->second;  // occasionally inconsistent
    shape.push_back(dim);
    ix.push_back(Ix{name, 0, rng() % 2 ? 1 : -1});
  }
  op.d = random_dense(rng, shape, -9, 9);
  if (indexed) op.d.indices = ix;
  return op;
}

// Each argument is evaluated (and so reduced) on its own first.
std::optional<Operand> evaluated(const Operand& op, bool& mismatch) {
  if (op.scalar || op.d.indices.empty()) return op;
  Dense bare = op.d;
  bare.indices.clear();
  auto r = oracle::attach(bare, op.d.indices);
  if (r.dimension_mismatch) {
    mismatch = true;
    return std::nullopt;
  }
  Operand out;
  out.d = r.tensor;
  return out;
}

// Outer product F(a, b) followed by the reduction oracle.
oracle::Reduced double_loop(const Operand& a_src, const Operand& b_src, const BinaryFn& f) {
  oracle::Reduced r;
  auto a_eval = evaluated(a_src, r.dimension_mismatch);
  auto b_eval = evaluated(b_src, r.dimension_mismatch);
  if (r.dimension_mismatch) return r;
  const Operand& a = *a_eval;
  const Operand& b = *b_eval;
  Dense outer;
  std::vector<long> av = a.scalar ? std::vector<long>{a.value} : a.d.data;
  std::vector<long> bv = b.scalar ? std::vector<long>{b.value} : b.d.data;
  if (!a.scalar) outer.shape = a.d.shape;
  if (!b.scalar) outer.shape.insert(outer.shape.end(), b.d.shape.begin(), b.d.shape.end());
  for (long x : av)
    for (long y : bv) outer.data.push_back(f.eval(x, y));
  std::vector<Ix> ix;
  if (!a.scalar) ix = a.d.indices;
  if (!b.scalar) ix.insert(ix.end(), b.d.indices.begin(), b.d.indices.end());
  if (outer.shape.empty()) {
    r.scalar = true;
    r.scalar_value = outer.data.front();
    return r;
  }
  if (ix.empty()) {
    r.tensor = outer;
    return r;
  }
  return oracle::attach(outer, ix);
}

bool matches(const Value& v, const oracle::Reduced& want) {
  if (want.scalar) return v.is_scalar() && v.scalar() == sym::integer(want.scalar_value);
  auto d = oracle::to_dense(v);
  return d && d->shape == want.tensor.shape && d->data == want.tensor.data &&
         oracle::same_indices(d->indices, want.tensor.indices);
}

void scalar_apply_equivalence() {
  auto start = Clock::now();
  Outcome o;
  std::mt19937_64 rng(303);
  int errors = 0;
  for (int n = 0; n < 500 && o.passed; ++n) {
    BinaryFn f = random_binary(rng);
    bool indexed = rng() % 5 != 0;
    std::map<std::string, std::size_t> dims;
    Operand a = random_operand(rng, indexed, dims), b = random_operand(rng, indexed, dims);
    auto want = double_loop(a, b, f);
    const std::string call = "(f " + a.source() + " " + b.source() + ")";
    const std::string nested = "(g " + a.source() + " " + b.source() + ")";
    Interpreter in;
    in.run("(define $f (lambda [$x $y] " + f.body + "))");
    in.run("(define $g (lambda [%x %y] (tensor-map (lambda [%x] (tensor-map (lambda [%y] " + f.body +
           ") y)) x)))");
    auto run = [&](const std::string& src) -> std::variant<Value, ErrorKind> {
      try {
        return in.run(src).back();
      } catch (const Error& e) {
        return e.kind();
      }
    };
    auto got = run(call), expl = run(nested);
    if (want.dimension_mismatch) {
      ++errors;
      auto is_mismatch = [](const auto& r) {
        return std::holds_alternative<ErrorKind>(r) && std::get<ErrorKind>(r) == ErrorKind::DimensionMismatch;
      };
      if (!is_mismatch(got) || !is_mismatch(expl)) o.fail(call + ": expected a dimension mismatch from both");
      continue;
    }
    if (!std::holds_alternative<Value>(got) || !matches(std::get<Value>(got), want)) {
      o.fail(call + " disagrees with the double loop" +
             (std::holds_alternative<Value>(got) ? ": " + to_string(std::get<Value>(got)) : ""));
    } else if (!std::holds_alternative<Value>(expl) || !matches(std::get<Value>(expl), want)) {
      o.fail(nested + " disagrees with the double loop" +
             (std::holds_alternative<Value>(expl) ? ": " + to_string(std::get<Value>(expl)) : ""));
    }
  }
  if (o.passed) o.detail = "500 cases, " + std::to_string(errors) + " dimension mismatches";
  report(3, "scalar-parameter broadcasting equals nested tensor-map and the double loop", o, start, 30);
}

// 4 ---------------------------------------------------------------------------

void einstein_sums() {
  auto start = Clock::now();
  Outcome o;
  std::mt19937_64 rng(404);
  for (int n = 0; n < 200 && o.passed; ++n) {
    std::size_t len = 1 + rng() % 6;
    std::string xs = "[|", ys = "[|";
    mpq_class want = 0;
    for (std::size_t k = 0; k < len; ++k) {
      mpq_class x(static_cast<long>(rng() % 41) - 20, 1 + rng() % 9), y(static_cast<long>(rng() % 41) - 20, 1 + rng() % 9);
      x.canonicalize();
      y.canonicalize();
      want += x * y;
      xs += (k ? " " : "") + x.get_str();
      ys += (k ? " " : "") + y.get_str();
    }
    xs += "|]";
    ys += "|]";
    Interpreter in;
    Value got = in.run("(contract + (* " + xs + "~i " + ys + "_i))").back();
    if (!got.is_scalar() || !got.scalar().is_number() || got.scalar().number() != want)
      o.fail(xs + "·" + ys + " gave " + to_string(got) + ", expected " + want.get_str());
  }
  if (o.passed) o.detail = "200 rational vectors, exact";
  report(4, "Einstein summation equals the explicit sum", o, start, 30);
}

// 5 ---------------------------------------------------------------------------

// Independent torus reference: tangent vectors by hand, metric as their dot
// products, then Christoffel symbols and curvature by central differences.
class TorusReference {
 public:
  TorusReference(long double a, long double b, long double h) : a_(a), b_(b), h_(h) {}

  long double g(int i, int j, long double th, long double ph) const {
    long double r = b_ + a_ * std::cos(th);
    long double e[2][3] = {{-a_ * std::sin(th) * std::cos(ph), -a_ * std::sin(th) * std::sin(ph), a_ * std::cos(th)},
                           {-r * std::sin(ph), r * std::cos(ph), 0}};
    return e[i][0] * e[j][0] + e[i][1] * e[j][1] + e[i][2] * e[j][2];
  }

  template <typename F>
  long double d(int k, long double th, long double ph, F f) const {
    return k == 0 ? (f(th + h_, ph) - f(th - h_, ph)) / (2 * h_) : (f(th, ph + h_) - f(th, ph - h_)) / (2 * h_);
  }

  long double first(int i, int j, int k, long double th, long double ph) const {
    auto G = [this](int p, int q) { return [=, this](long double t, long double f) { return g(p, q, t, f); }; };
    return (d(k, th, ph, G(i, j)) + d(j, th, ph, G(i, k)) - d(i, th, ph, G(j, k))) / 2;
  }

  long double second(int i, int k, int l, long double th, long double ph) const {
    long double m[2][2] = {{g(0, 0, th, ph), g(0, 1, th, ph)}, {g(1, 0, th, ph), g(1, 1, th, ph)}};
    long double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    long double inv[2][2] = {{m[1][1] / det, -m[0][1] / det}, {-m[1][0] / det, m[0][0] / det}};
    return inv[i][0] * first(0, k, l, th, ph) + inv[i][1] * first(1, k, l, th, ph);
  }

  long double riemann(int i, int j, int k, int l, long double th, long double ph) const {
    auto S = [this](int p, int q, int r) { return [=, this](long double t, long double f) { return second(p, q, r, t, f); }; };
    long double v = d(k, th, ph, S(i, j, l)) - d(l, th, ph, S(i, j, k));
    for (int m = 0; m < 2; ++m)
      v += second(m, j, l, th, ph) * second(i, m, k, th, ph) - second(m, j, k, th, ph) * second(i, m, l, th, ph);
    return v;
  }

 private:
  long double a_, b_, h_;
};

void torus() {
  auto start = Clock::now();
  Outcome o;
  cli::TorusTensors t;
  try {
    t = cli::evaluate_torus();
  } catch (const Error& e) {
    o.fail(std::string("program failed: ") + e.what());
    report(5, "torus curvature matches the finite-difference reference", o, start, 60);
    return;
  }
  auto comp = [](const Value& v, std::vector<std::size_t> p) -> const sym::Expr& { return v.tensor().at(p).scalar(); };
  const std::vector<std::vector<std::size_t>> nonzero = {{0, 1, 0, 1}, {0, 1, 1, 0}, {1, 0, 1, 0}, {1, 0, 0, 1}};
  for (const auto& p : nonzero)
    if (comp(t.R, p).is_zero()) o.fail("a structurally nonzero component is symbolically zero");

  double worst = 0, worst_zero = 0, worst_gamma = 0;
  std::mt19937_64 rng(20240);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int s = 0; s < 20; ++s) {
    double a = 0.5 + 1.5 * u(rng), b = a + 0.5 + 2.5 * u(rng);
    double th = 2 * std::numbers::pi * u(rng), ph = 2 * std::numbers::pi * u(rng);
    sym::NumericBinding env{{"a", a}, {"b", b}, {"θ", th}, {"φ", ph}};
    TorusReference ref(a, b, 1e-5L);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
          std::vector<std::size_t> p{std::size_t(i), std::size_t(j), std::size_t(k)};
          worst_gamma = std::max(worst_gamma, cli::relative_error(sym::eval_numeric(comp(t.gamma2, p), env),
                                                                  ref.second(i, j, k, th, ph)));
          for (int l = 0; l < 2; ++l) {
            std::vector<std::size_t> q{std::size_t(i), std::size_t(j), std::size_t(k), std::size_t(l)};
            double got = sym::eval_numeric(comp(t.R, q), env);
            double err = cli::relative_error(got, ref.riemann(i, j, k, l, th, ph));
            worst = std::max(worst, err);
            if (err > 1e-4) o.fail("R component off by " + std::to_string(err));
            if (k == l) {
              worst_zero = std::max(worst_zero, std::fabs(got));
              if (std::fabs(got) > 1e-6) o.fail("R with k = l is " + std::to_string(got));
            }
          }
        }
    for (const auto& p : nonzero)
      if (std::fabs(sym::eval_numeric(comp(t.R, p), env)) < 1e-9) o.fail("a nonzero component vanished numerically");
  }
  if (worst_gamma > 1e-4) o.fail("Γ second kind off by " + std::to_string(worst_gamma));
  if (o.passed) {
    std::ostringstream s;
    s << "20 bindings, worst relative error " << std::scientific << std::setprecision(1) << worst << " (R), "
      << worst_gamma << " (Γ), max |R^i_jkk| " << worst_zero;
    o.detail = s.str();
  }
  report(5, "torus curvature matches the finite-difference reference", o, start, 60);
}

// 6 ---------------------------------------------------------------------------

void derivatives() {
  auto start = Clock::now();
  Outcome o;
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const long double h = 1e-5L;
  double worst = 0;
  for (int n = 0; n < 100; ++n) {
    sym::Expr e = sym::canonicalize(oracle::random_expr(rng, {"x", "y"}, 4));
    std::string var = n % 2 ? "y" : "x";
    sym::Expr de = sym::differentiate(e, var);
    double x = u(rng), y = u(rng);
    sym::ExtendedBinding lo{{"x", x}, {"y", y}}, hi = lo;
    lo[var] -= h;
    hi[var] += h;
    long double fd = (sym::eval_numeric_extended(e, hi) - sym::eval_numeric_extended(e, lo)) / (2 * h);
    double err = cli::relative_error(sym::eval_numeric(de, {{"x", x}, {"y", y}}), fd);
    worst = std::max(worst, err);
    if (err > 1e-6) o.fail("d/d" + var + " " + sym::to_string(e) + " off by " + std::to_string(err));
  }
  if (o.passed) {
    std::ostringstream s;
    s << "100 expressions, worst relative error " << std::scientific << std::setprecision(1) << worst;
    o.detail = s.str();
  }
  report(6, "symbolic derivatives match central differences", o, start, 30);
}

// 7 ---------------------------------------------------------------------------

void hygiene() {
  auto start = Clock::now();
  Outcome o;
  auto cases = cli::load_corpus(GOLDEN_DIR);
  std::size_t scoped = 0;
  for (const auto& r : cli::run_suite(cases)) {
    if (!r.hygienic || Interpreter::is_local_symbol_name(r.actual)) o.fail(r.name + " leaked " + r.actual);
  }
  for (const auto& c : cases)
    if (c.source.find("with-symbols") != std::string::npos || c.source.find("inner-product") != std::string::npos ||
        c.source.find("mat-mul") != std::string::npos)
      ++scoped;
  if (o.passed) o.detail = std::to_string(cases.size()) + " results checked, " + std::to_string(scoped) + " use with-symbols";
  report(7, "no local symbol appears in any printed result", o, start, 30);
}

// 8 ---------------------------------------------------------------------------

void error_cases() {
  auto start = Clock::now();
  Outcome o;
  struct Case {
    const char* src;
    ErrorKind want;
  } cases[] = {
      {"[|1 2 3|]_1_2", ErrorKind::Rank},
      {"[|[|1 2|] [|3 4|]|]_i_j_k", ErrorKind::Rank},
      {"[|[|1 2|] [|3|]|]", ErrorKind::Shape},
      {"[|[|1 2|] 3|]", ErrorKind::Shape},
      {"(+ [|1 2|]_i [|1 2 3|]_i)", ErrorKind::DimensionMismatch},
      {"[|[|1 2 3|] [|4 5 6|]|]_i_i", ErrorKind::DimensionMismatch},
      {"(M.inverse [|[|1 2|] [|2 4|]|])", ErrorKind::Singular},
      {"(M.inverse [|[|(sin x)^2 1|] [|(- 1 (cos x)^2) 1|]|])", ErrorKind::Singular},
  };
  for (const auto& c : cases) {
    try {
      auto got = error_kind([&] {
        Interpreter in;
        in.run(c.src);
      });
      if (!got)
        o.fail(std::string(c.src) + " raised nothing");
      else if (*got != c.want)
        o.fail(std::string(c.src) + " raised " + std::string(to_string(*got)));
    } catch (const std::exception& e) {
      o.fail(std::string(c.src) + " crashed: " + e.what());
    }
  }
  if (o.passed) o.detail = std::to_string(std::size(cases)) + " programs";
  report(8, "rank, shape, dimension-mismatch and singular errors", o, start, 30);
}

}  // namespace

int main() {
  golden_corpus();
  reduction_engine();
  scalar_apply_equivalence();
  einstein_sums();
  torus();
  derivatives();
  hygiene();
  error_cases();
  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
