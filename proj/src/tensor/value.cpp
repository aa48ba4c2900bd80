#include "indexlang/value.hpp"

#include <functional>
#include <map>

#include "indexlang/error.hpp"

namespace indexlang {

namespace {
[[noreturn]] void wrong_type(const Value& v, const char* wanted) {
  throw Error(ErrorKind::Type, std::string("expected ") + wanted + ", got " + v.type_name());
}
}  // namespace

const sym::Expr& Value::scalar() const {
  if (!is_scalar()) wrong_type(*this, "scalar");
  return std::get<sym::Expr>(v_);
}

const Tensor& Value::tensor() const { return *tensor_ptr(); }

const TensorPtr& Value::tensor_ptr() const {
  if (!is_tensor()) wrong_type(*this, "tensor");
  return std::get<TensorPtr>(v_);
}

bool Value::boolean() const {
  if (!is_bool()) wrong_type(*this, "boolean");
  return std::get<bool>(v_);
}

const FunctionValue& Value::function() const { return *function_ptr(); }

const FunctionPtr& Value::function_ptr() const {
  if (!is_function()) wrong_type(*this, "function");
  return std::get<FunctionPtr>(v_);
}

std::string Value::type_name() const {
  if (is_scalar()) return "scalar";
  if (is_tensor()) return "tensor";
  if (is_bool()) return "boolean";
  return "function";
}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<Value> data, std::vector<Index> indices)
    : shape_(std::move(shape)), data_(std::move(data)), indices_(std::move(indices)) {
  if (shape_.empty()) throw Error(ErrorKind::Shape, "tensor of rank 0");
  std::size_t n = 1;
  for (auto d : shape_) {
    if (d == 0) throw Error(ErrorKind::Shape, "tensor dimension 0");
    n *= d;
  }
  if (n != data_.size())
    throw Error(ErrorKind::Shape,
                "tensor has " + std::to_string(data_.size()) + " components, shape needs " + std::to_string(n));
  if (indices_.size() > shape_.size())
    throw Error(ErrorKind::Rank, std::to_string(indices_.size()) + " indices on a rank-" +
                                     std::to_string(shape_.size()) + " tensor");
  for (const auto& c : data_)
    if (c.is_tensor()) throw Error(ErrorKind::Shape, "tensor component is itself a tensor");
}

std::size_t Tensor::offset(std::span<const std::size_t> position) const {
  if (position.size() != shape_.size()) throw Error(ErrorKind::Rank, "position rank mismatch");
  std::size_t off = 0;
  for (std::size_t a = 0; a < shape_.size(); ++a) {
    if (position[a] >= shape_[a]) throw Error(ErrorKind::Bounds, "position out of range");
    off = off * shape_[a] + position[a];
  }
  return off;
}

const Value& Tensor::at(std::span<const std::size_t> position) const { return data_[offset(position)]; }

Tensor Tensor::with_indices(std::vector<Index> indices) const { return Tensor(shape_, data_, std::move(indices)); }

bool next_position(std::vector<std::size_t>& position, std::span<const std::size_t> shape) {
  for (std::size_t a = shape.size(); a-- > 0;) {
    if (++position[a] < shape[a]) return true;
    position[a] = 0;
  }
  return false;
}

namespace {

void print_axis(const Tensor& t, std::size_t axis, std::size_t& cursor, std::string& out) {
  out += "[|";
  for (std::size_t i = 0; i < t.shape()[axis]; ++i) {
    if (i) out += ' ';
    if (axis + 1 == t.rank()) out += to_string(t.data()[cursor++]);
    else print_axis(t, axis + 1, cursor, out);
  }
  out += "|]";
}

}  // namespace

std::string to_string(const Value& v) {
  if (v.is_scalar()) return sym::to_string(v.scalar());
  if (v.is_bool()) return v.boolean() ? "#t" : "#f";
  if (v.is_function()) return "#<lambda>";
  const Tensor& t = v.tensor();
  std::string out;
  std::size_t cursor = 0;
  print_axis(t, 0, cursor, out);
  return out + to_string(t.indices());
}

namespace {

struct DummyMatcher {
  bool ignore_ids;
  std::map<std::uint64_t, std::uint64_t> forward, backward;

  bool labels(const Label& a, const Label& b) {
    const auto* x = std::get_if<DummyLabel>(&a);
    const auto* y = std::get_if<DummyLabel>(&b);
    if (!x || !y || !ignore_ids) return a == b;
    auto f = forward.emplace(x->id, y->id).first;
    auto r = backward.emplace(y->id, x->id).first;
    return f->second == y->id && r->second == x->id;
  }
};

}  // namespace

bool equivalent(const Value& a, const Value& b, bool ignore_dummy_ids) {
  if (a.is_scalar() && b.is_scalar()) return a.scalar() == b.scalar();
  if (a.is_bool() && b.is_bool()) return a.boolean() == b.boolean();
  if (a.is_function() && b.is_function()) return a.function_ptr() == b.function_ptr();
  if (!a.is_tensor() || !b.is_tensor()) return false;
  const Tensor& x = a.tensor();
  const Tensor& y = b.tensor();
  if (x.shape() != y.shape() || x.indices().size() != y.indices().size()) return false;
  DummyMatcher m{ignore_dummy_ids, {}, {}};
  for (std::size_t i = 0; i < x.indices().size(); ++i) {
    if (x.indices()[i].variance != y.indices()[i].variance) return false;
    if (!m.labels(x.indices()[i].label, y.indices()[i].label)) return false;
  }
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!equivalent(x.data()[i], y.data()[i], ignore_dummy_ids)) return false;
  return true;
}

}  // namespace indexlang
