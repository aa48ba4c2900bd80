#pragma once

// Riemann curvature of a torus computed by the interpreter, checked against
// a numeric finite-difference evaluation of the textbook component formulas.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "indexlang/expr.hpp"
#include "indexlang/value.hpp"

namespace indexlang::cli {

/// The torus program (coordinates, local basis, metric, Christoffel symbols
/// of both kinds, curvature). Same text as programs/torus.il.
std::string_view torus_program();

struct TorusTensors {
  Value g;       // g__
  Value g_inv;   // g~~
  Value gamma1;  // Γ___
  Value gamma2;  // Γ~__
  Value R;       // R~___
};

/// Runs the program in a fresh interpreter and fetches the results.
TorusTensors evaluate_torus();

struct TorusBinding {
  double a, b, theta, phi;
  sym::NumericBinding as_map() const;
};

/// a in [0.5, 2], b in [a + 0.5, a + 3], angles in [0, 2π).
std::vector<TorusBinding> sample_bindings(std::uint64_t seed, std::size_t count);

/// Finite-difference reference values; step h on every derivative.
class TorusOracle {
 public:
  /// `metric` supplies g_ij at (θ, φ); the derived tensors only see it through
  /// numeric evaluation.
  TorusOracle(const TorusBinding& at, const Value& metric, long double h = 1e-5L);

  /// g_ij from dot products of finite-difference tangent vectors of the embedding.
  long double metric_from_embedding(int i, int j) const;
  long double gamma1(int i, int j, int k) const;
  long double gamma2(int i, int k, int l) const;
  long double riemann(int i, int j, int k, int l) const;

 private:
  long double g(int i, int j, long double theta, long double phi) const;
  long double gamma1_at(int i, int j, int k, long double theta, long double phi) const;
  long double gamma2_at(int i, int k, int l, long double theta, long double phi) const;

  TorusBinding at_;
  const Tensor* metric_;
  long double h_;
};

struct TorusReport {
  bool passed = true;
  std::size_t samples = 0;
  double worst_metric = 0;
  double worst_gamma1 = 0;
  double worst_gamma2 = 0;
  double worst_riemann = 0;
  double worst_antisymmetric_zero = 0;
  bool nonzero_components_ok = true;
  std::vector<std::string> failures;
};

/// Relative deviation |x - y| / (1 + |y|).
double relative_error(long double x, long double y);

TorusReport run_torus_demo(std::uint64_t seed, std::size_t samples, double tolerance = 1e-4);
void print_report(const TorusReport& r, std::ostream& out);

}  // namespace indexlang::cli
