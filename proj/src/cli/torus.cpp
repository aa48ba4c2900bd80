#include "indexlang/torus.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "indexlang/error.hpp"
#include "indexlang/evaluator.hpp"

namespace indexlang::cli {

std::string_view torus_program() {
  return R"(;; Coordinates for the torus
(define $x [|θ φ|])
(define $X [|(* '(+ (* a (cos θ)) b) (cos φ))
             (* '(+ (* a (cos θ)) b) (sin φ))
             (* a (sin θ))|])

;; Local basis
(define $e ((flip ∂/∂) x~# X_#))

;; Metric tensor and its inverse
(define $g__ (generate-tensor 2#(V.* e_%1 e_%2) {2 2}))
(define $g~~ (M.inverse g_#_#))

;; Christoffel symbols of the first kind
(define $Γ_i_j_k
  (* (/ 1 2)
     (+ (∂/∂ g_i_j x_k)
        (∂/∂ g_i_k x_j)
        (* -1 (∂/∂ g_j_k x_i)))))

;; Christoffel symbols of the second kind
(define $Γ~__ (with-symbols {i} (. g~#~i Γ_i_#_#)))

;; Riemann curvature tensor
(define $R~i_j_k_l
  (with-symbols {m}
    (+ (- (∂/∂ Γ~i_j_l x_k) (∂/∂ Γ~i_j_k x_l))
       (- (. Γ~m_j_l Γ~i_m_k) (. Γ~m_j_k Γ~i_m_l)))))

R~i_j_k_l
)";
}

namespace {

Value fetch(const Interpreter& in, const std::string& name, const std::string& signature) {
  auto v = in.lookup(name, signature);
  if (!v || !v->is_tensor())
    throw Error(ErrorKind::Evaluation, "torus program did not define " + name + signature + " as a tensor");
  return *v;
}

void expect_shape(const Value& v, std::size_t rank, const char* what) {
  const auto& shape = v.tensor().shape();
  if (shape.size() != rank || std::any_of(shape.begin(), shape.end(), [](auto d) { return d != 2; }))
    throw Error(ErrorKind::Shape, std::string(what) + " does not have shape 2^" + std::to_string(rank));
}

const sym::Expr& component(const Value& t, std::initializer_list<int> pos) {
  std::size_t off = 0;
  for (int p : pos) off = off * 2 + static_cast<std::size_t>(p);
  return t.tensor().data()[off].scalar();
}

}  // namespace

TorusTensors evaluate_torus() {
  Interpreter in;
  in.run(torus_program());
  TorusTensors t{fetch(in, "g", "__"), fetch(in, "g", "~~"), fetch(in, "Γ", "___"), fetch(in, "Γ", "~__"),
                 fetch(in, "R", "~___")};
  expect_shape(t.g, 2, "g");
  expect_shape(t.g_inv, 2, "g inverse");
  expect_shape(t.gamma1, 3, "Γ (first kind)");
  expect_shape(t.gamma2, 3, "Γ (second kind)");
  expect_shape(t.R, 4, "R");
  return t;
}

sym::NumericBinding TorusBinding::as_map() const { return {{"a", a}, {"b", b}, {"θ", theta}, {"φ", phi}}; }

std::vector<TorusBinding> sample_bindings(std::uint64_t seed, std::size_t count) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<TorusBinding> out;
  for (std::size_t i = 0; i < count; ++i) {
    TorusBinding s{};
    s.a = 0.5 + 1.5 * unit(rng);
    s.b = s.a + 0.5 + 2.5 * unit(rng);
    s.theta = 2 * std::numbers::pi * unit(rng);
    s.phi = 2 * std::numbers::pi * unit(rng);
    out.push_back(s);
  }
  return out;
}

TorusOracle::TorusOracle(const TorusBinding& at, const Value& metric, long double h)
    : at_(at), metric_(&metric.tensor()), h_(h) {}

long double TorusOracle::g(int i, int j, long double theta, long double phi) const {
  sym::ExtendedBinding env{{"a", at_.a}, {"b", at_.b}, {"θ", theta}, {"φ", phi}};
  return sym::eval_numeric_extended(metric_->data()[static_cast<std::size_t>(i * 2 + j)].scalar(), env);
}

// Central difference of f along coordinate k (0 = θ, 1 = φ).
template <typename F>
static long double partial(int k, long double theta, long double phi, long double h, F&& f) {
  if (k == 0) return (f(theta + h, phi) - f(theta - h, phi)) / (2 * h);
  return (f(theta, phi + h) - f(theta, phi - h)) / (2 * h);
}

long double TorusOracle::metric_from_embedding(int i, int j) const {
  const long double a = at_.a, b = at_.b;
  auto X = [&](int c, long double th, long double ph) {
    long double r = a * std::cos(th) + b;
    if (c == 0) return r * std::cos(ph);
    if (c == 1) return r * std::sin(ph);
    return a * std::sin(th);
  };
  long double sum = 0;
  for (int c = 0; c < 3; ++c) {
    auto Xc = [&](long double th, long double ph) { return X(c, th, ph); };
    sum += partial(i, at_.theta, at_.phi, h_, Xc) * partial(j, at_.theta, at_.phi, h_, Xc);
  }
  return sum;
}

long double TorusOracle::gamma1_at(int i, int j, int k, long double theta, long double phi) const {
  auto gij = [&](int p, int q) { return [this, p, q](long double t, long double f) { return g(p, q, t, f); }; };
  return (partial(k, theta, phi, h_, gij(i, j)) + partial(j, theta, phi, h_, gij(i, k)) -
          partial(i, theta, phi, h_, gij(j, k))) /
         2;
}

long double TorusOracle::gamma2_at(int i, int k, int l, long double theta, long double phi) const {
  long double g00 = g(0, 0, theta, phi), g01 = g(0, 1, theta, phi);
  long double g10 = g(1, 0, theta, phi), g11 = g(1, 1, theta, phi);
  long double det = g00 * g11 - g01 * g10;
  long double inv[2][2] = {{g11 / det, -g01 / det}, {-g10 / det, g00 / det}};
  long double sum = 0;
  for (int j = 0; j < 2; ++j) sum += inv[i][j] * gamma1_at(j, k, l, theta, phi);
  return sum;
}

long double TorusOracle::gamma1(int i, int j, int k) const { return gamma1_at(i, j, k, at_.theta, at_.phi); }
long double TorusOracle::gamma2(int i, int k, int l) const { return gamma2_at(i, k, l, at_.theta, at_.phi); }

long double TorusOracle::riemann(int i, int j, int k, int l) const {
  const long double th = at_.theta, ph = at_.phi;
  auto G2 = [&](int p, int q, int r) {
    return [this, p, q, r](long double t, long double f) { return gamma2_at(p, q, r, t, f); };
  };
  long double value = partial(k, th, ph, h_, G2(i, j, l)) - partial(l, th, ph, h_, G2(i, j, k));
  for (int m = 0; m < 2; ++m)
    value += gamma2(m, j, l) * gamma2(i, m, k) - gamma2(m, j, k) * gamma2(i, m, l);
  return value;
}

double relative_error(long double x, long double y) {
  return static_cast<double>(std::fabs(x - y) / (1 + std::fabs(y)));
}

TorusReport run_torus_demo(std::uint64_t seed, std::size_t samples, double tolerance) {
  TorusReport r;
  r.samples = samples;
  TorusTensors t = evaluate_torus();

  const int nonzero[4][4] = {{0, 1, 0, 1}, {0, 1, 1, 0}, {1, 0, 1, 0}, {1, 0, 0, 1}};
  for (const auto& n : nonzero) {
    if (component(t.R, {n[0], n[1], n[2], n[3]}).is_zero()) {
      r.nonzero_components_ok = false;
      r.failures.push_back("R component is symbolically zero");
    }
  }

  auto track = [&](double err, double& worst, const std::string& what) {
    worst = std::max(worst, err);
    if (!(err <= tolerance)) r.failures.push_back(what + ": relative error " + std::to_string(err));
  };

  for (const auto& at : sample_bindings(seed, samples)) {
    const auto env = at.as_map();
    TorusOracle oracle(at, t.g);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        track(relative_error(sym::eval_numeric(component(t.g, {i, j}), env), oracle.metric_from_embedding(i, j)),
              r.worst_metric, "g");
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
          track(relative_error(sym::eval_numeric(component(t.gamma1, {i, j, k}), env), oracle.gamma1(i, j, k)),
                r.worst_gamma1, "Γ (first kind)");
          track(relative_error(sym::eval_numeric(component(t.gamma2, {i, j, k}), env), oracle.gamma2(i, j, k)),
                r.worst_gamma2, "Γ (second kind)");
        }
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l) {
            double value = sym::eval_numeric(component(t.R, {i, j, k, l}), env);
            track(relative_error(value, oracle.riemann(i, j, k, l)), r.worst_riemann, "R");
            if (k == l) {
              r.worst_antisymmetric_zero = std::max(r.worst_antisymmetric_zero, std::fabs(value));
              if (std::fabs(value) > 1e-6) r.failures.push_back("R with k = l is not zero");
            }
          }
    for (const auto& n : nonzero) {
      if (std::fabs(sym::eval_numeric(component(t.R, {n[0], n[1], n[2], n[3]}), env)) < 1e-12) {
        r.nonzero_components_ok = false;
        r.failures.push_back("R component vanishes numerically");
      }
    }
  }
  r.passed = r.failures.empty();
  return r;
}

void print_report(const TorusReport& r, std::ostream& out) {
  auto line = [&](const char* what, double v) {
    out << "  " << std::left << std::setw(28) << what << std::scientific << std::setprecision(2) << v << "\n";
  };
  out << "torus curvature check over " << r.samples << " random bindings\n";
  line("g vs embedding", r.worst_metric);
  line("Gamma first kind", r.worst_gamma1);
  line("Gamma second kind", r.worst_gamma2);
  line("R", r.worst_riemann);
  line("max |R^i_jkk|", r.worst_antisymmetric_zero);
  out << "  four nonzero R components  " << (r.nonzero_components_ok ? "ok" : "FAILED") << "\n";
  for (std::size_t i = 0; i < std::min<std::size_t>(r.failures.size(), 10); ++i) out << "  " << r.failures[i] << "\n";
  out << (r.passed ? "PASS" : "FAIL") << "\n";
}

}  // namespace indexlang::cli
