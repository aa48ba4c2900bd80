#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "indexlang/expr.hpp"
#include "indexlang/index.hpp"

namespace indexlang {

class Tensor;
struct FunctionValue;  // defined by the language layer

using TensorPtr = std::shared_ptr<const Tensor>;
using FunctionPtr = std::shared_ptr<const FunctionValue>;

/// Runtime value: a symbolic scalar, a tensor, a boolean or a function.
class Value {
 public:
  Value() = default;
  Value(sym::Expr scalar) : v_(std::move(scalar)) {}
  Value(Tensor tensor);
  Value(TensorPtr tensor) : v_(std::move(tensor)) {}
  explicit Value(bool b) : v_(b) {}
  Value(FunctionPtr fn) : v_(std::move(fn)) {}

  bool is_scalar() const { return std::holds_alternative<sym::Expr>(v_); }
  bool is_tensor() const { return std::holds_alternative<TensorPtr>(v_); }
  bool is_bool() const { return std::holds_alternative<bool>(v_); }
  bool is_function() const { return std::holds_alternative<FunctionPtr>(v_); }

  // Accessors raise a type error on the wrong alternative.
  const sym::Expr& scalar() const;
  const Tensor& tensor() const;
  const TensorPtr& tensor_ptr() const;
  bool boolean() const;
  const FunctionValue& function() const;
  const FunctionPtr& function_ptr() const;

  std::string type_name() const;

 private:
  std::variant<sym::Expr, TensorPtr, bool, FunctionPtr> v_;
};

/// Dense row-major tensor of values plus the ordered list of indices attached
/// to its leading axes. A tensor always has rank >= 1.
class Tensor {
 public:
  Tensor(std::vector<std::size_t> shape, std::vector<Value> data, std::vector<Index> indices = {});

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  const std::vector<Value>& data() const { return data_; }
  const std::vector<Index>& indices() const { return indices_; }

  /// Zero-based multi-index.
  const Value& at(std::span<const std::size_t> position) const;
  std::size_t offset(std::span<const std::size_t> position) const;

  Tensor with_indices(std::vector<Index> indices) const;

 private:
  std::vector<std::size_t> shape_;
  std::vector<Value> data_;
  std::vector<Index> indices_;
};

inline Value::Value(Tensor tensor) : v_(std::make_shared<const Tensor>(std::move(tensor))) {}

/// Advances a zero-based row-major multi-index; returns false after the last one.
bool next_position(std::vector<std::size_t>& position, std::span<const std::size_t> shape);

/// Printed form: scalars as S-expressions, tensors as `[|[|11 12|] [|21 22|]|]~i_j`,
/// supersubscripts `~_i`, dummies `_#`.
std::string to_string(const Value& v);

/// Structural equality. Dummy labels compare by their pairing pattern when
/// ignore_dummy_ids is set, so results differing only in generated ids agree.
bool equivalent(const Value& a, const Value& b, bool ignore_dummy_ids = true);

}  // namespace indexlang
