#pragma once

// Index reduction and the primitive tensor operations: diagonal extraction,
// contraction, index flipping, transposition, component-wise mapping with
// index hoisting, generation, and scalar-parameter broadcasting.

#include <atomic>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "indexlang/index.hpp"
#include "indexlang/value.hpp"

namespace indexlang::tensor {

using UnaryFn = std::function<Value(const Value&)>;
using BinaryFn = std::function<Value(const Value&, const Value&)>;

enum class ParamKind { Scalar, Tensor, InvertedScalar };

/// Source of fresh dummy labels. Safe to share between threads.
class DummySource {
 public:
  Index fresh(Variance variance = Variance::Sub, bool automatic = false);
  std::uint64_t next_id() { return next_.fetch_add(1, std::memory_order_relaxed); }

 private:
  std::atomic<std::uint64_t> next_{1};
};

/// Builds a tensor from literal elements. Elements that are tensors form the
/// next nesting level (their indices are dropped); siblings must agree in shape.
Tensor from_nested(std::span<const Value> elements);

/// Number-labelled indices select 1-based slices immediately; the rest are
/// attached and reduced. Returns the scalar component when every axis is
/// selected. When the tensor already carries indices and the combined count
/// exceeds its rank, the existing indices are replaced.
Value append_indices(const Tensor& t, std::span<const Index> indices);

/// Merges same-label indices pairwise, leftmost pair first, until none clash.
Tensor reduce_indices(const Tensor& t);

/// Diagonal over 1-based axes k < j; axis j is removed. Indices attached to
/// the tensor lose their entry j.
Tensor diag(std::size_t k, std::size_t j, const Tensor& t);

/// Folds every supersubscript axis with f, left to right.
Value contract(const BinaryFn& f, const Value& t);

Value flip_indices(const Value& v);

/// `order` must be a permutation of the tensor's index labels.
Tensor transpose(std::span<const Label> order, const Tensor& t);

/// Applies f to every component. Tensor-valued results are hoisted: their
/// axes and indices move to the end, then the result is reduced.
Value tensor_map(const UnaryFn& f, const Tensor& t, DummySource& dummies);

/// Component at 1-based (i1..in) is f(i1..in).
Tensor generate(const std::function<Value(std::span<const long>)>& f, std::span<const std::size_t> shape);

/// Calls `body` with every scalar parameter mapped over the components of its
/// tensor argument (outermost first), flipping indices of inverted-scalar
/// arguments beforehand. Tensor parameters are passed through untouched.
Value scalar_apply(std::span<const ParamKind> kinds, std::vector<Value> args,
                   const std::function<Value(std::vector<Value>)>& body, DummySource& dummies);

}  // namespace indexlang::tensor
