#pragma once

#include <string_view>

#include "indexlang/evaluator.hpp"

namespace indexlang::stdlib {

/// Registers the native builtins, then evaluates the prelude.
void install(Interpreter& interp);

/// Library functions written in the language itself (min, ., inner-product,
/// mat-mul, V.*).
std::string_view prelude_source();

/// Cofactor-expansion inverse of a square rank-2 tensor of size <= 4.
/// Raises a singular error when the determinant is canonically zero.
Tensor matrix_inverse(const Tensor& m);

/// Determinant by cofactor expansion, unsimplified.
sym::Expr determinant(const Tensor& m);

}  // namespace indexlang::stdlib
