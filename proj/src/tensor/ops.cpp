#include <algorithm>
#include <numeric>

#include "indexlang/error.hpp"
#include "indexlang/tensor.hpp"

namespace indexlang::tensor {

namespace {

std::string shape_string(std::span<const std::size_t> shape) {
  std::string s = "{";
  for (std::size_t i = 0; i < shape.size(); ++i) s += (i ? " " : "") + std::to_string(shape[i]);
  return s + "}";
}

std::vector<std::size_t> drop_axis(std::span<const std::size_t> v, std::size_t axis) {
  std::vector<std::size_t> out(v.begin(), v.end());
  out.erase(out.begin() + static_cast<std::ptrdiff_t>(axis));
  return out;
}

// Every multi-index of `shape`, in row-major order.
template <typename F>
void for_each_position(std::span<const std::size_t> shape, F&& f) {
  std::vector<std::size_t> pos(shape.size(), 0);
  do f(pos);
  while (next_position(pos, shape));
}

}  // namespace

Index DummySource::fresh(Variance variance, bool automatic) {
  return Index{variance, DummyLabel{next_id(), automatic}};
}

Tensor from_nested(std::span<const Value> elements) {
  if (elements.empty()) throw Error(ErrorKind::Shape, "empty tensor literal");
  const bool nested = elements.front().is_tensor();
  std::vector<std::size_t> shape{elements.size()};
  std::vector<Value> data;
  if (!nested) {
    for (const auto& e : elements) {
      if (e.is_tensor()) throw Error(ErrorKind::Shape, "tensor literal mixes nesting depths");
      data.push_back(e);
    }
    return Tensor(std::move(shape), std::move(data));
  }
  const auto& inner = elements.front().tensor().shape();
  shape.insert(shape.end(), inner.begin(), inner.end());
  for (const auto& e : elements) {
    if (!e.is_tensor()) throw Error(ErrorKind::Shape, "tensor literal mixes nesting depths");
    if (e.tensor().shape() != inner)
      throw Error(ErrorKind::Shape, "ragged tensor literal: " + shape_string(inner) + " vs " +
                                        shape_string(e.tensor().shape()));
    const auto& d = e.tensor().data();
    data.insert(data.end(), d.begin(), d.end());
  }
  return Tensor(std::move(shape), std::move(data));
}

Value append_indices(const Tensor& t, std::span<const Index> ix) {
  std::vector<Index> all;
  if (t.indices().size() + ix.size() <= t.rank()) all = t.indices();
  if (ix.size() > t.rank())
    throw Error(ErrorKind::Rank, std::to_string(ix.size()) + " indices on a rank-" + std::to_string(t.rank()) +
                                     " tensor");
  all.insert(all.end(), ix.begin(), ix.end());

  // Axis a is either fixed by a number index or kept.
  std::vector<long> fixed(t.rank(), -1);
  std::vector<Index> kept;
  std::vector<std::size_t> kept_shape;
  for (std::size_t a = 0; a < t.rank(); ++a) {
    if (a < all.size() && all[a].is_number()) {
      long n = std::get<NumberLabel>(all[a].label).value;
      if (n < 1 || static_cast<std::size_t>(n) > t.shape()[a])
        throw Error(ErrorKind::Bounds, "index " + std::to_string(n) + " out of range 1.." +
                                           std::to_string(t.shape()[a]));
      fixed[a] = n - 1;
      continue;
    }
    if (a < all.size()) kept.push_back(all[a]);
    kept_shape.push_back(t.shape()[a]);
  }

  std::vector<std::size_t> src(t.rank(), 0);
  auto source_of = [&](std::span<const std::size_t> pos) -> const Value& {
    for (std::size_t a = 0, k = 0; a < t.rank(); ++a)
      src[a] = fixed[a] >= 0 ? static_cast<std::size_t>(fixed[a]) : pos[k++];
    return t.at(src);
  };
  if (kept_shape.empty()) return source_of({});

  std::vector<Value> data;
  for_each_position(kept_shape, [&](const auto& pos) { data.push_back(source_of(pos)); });
  return reduce_indices(Tensor(std::move(kept_shape), std::move(data), std::move(kept)));
}

Tensor diag(std::size_t k, std::size_t j, const Tensor& t) {
  if (k < 1 || k >= j || j > t.rank())
    throw Error(ErrorKind::Bounds, "diag positions " + std::to_string(k) + ", " + std::to_string(j) +
                                       " invalid for rank " + std::to_string(t.rank()));
  const std::size_t ak = k - 1, aj = j - 1;
  if (t.shape()[ak] != t.shape()[aj])
    throw Error(ErrorKind::DimensionMismatch, "axes " + std::to_string(k) + " and " + std::to_string(j) +
                                                  " have dimensions " + std::to_string(t.shape()[ak]) + " and " +
                                                  std::to_string(t.shape()[aj]));
  auto shape = drop_axis(t.shape(), aj);
  std::vector<Value> data;
  data.reserve(t.size() / t.shape()[aj]);
  std::vector<std::size_t> src(t.rank());
  for_each_position(shape, [&](const auto& pos) {
    for (std::size_t a = 0, p = 0; a < t.rank(); ++a) src[a] = a == aj ? pos[ak] : pos[p++];
    data.push_back(t.at(src));
  });
  auto indices = t.indices();
  if (aj < indices.size()) indices.erase(indices.begin() + static_cast<std::ptrdiff_t>(aj));
  return Tensor(std::move(shape), std::move(data), std::move(indices));
}

Tensor reduce_indices(const Tensor& input) {
  Tensor t = input;
  for (;;) {
    for (const auto& i : t.indices())
      if (i.is_number()) throw Error(ErrorKind::Type, "number index survived selection");
    auto pairs = assoc::clashing_pairs(t.indices());
    if (pairs.empty()) return t;
    auto [k, j] = pairs.front();
    int ck = assoc::variance_code(k, t.indices());
    int cj = assoc::variance_code(j, t.indices());
    int merged = (ck == cj || ck == 0 || cj == 0) ? ck : 0;
    Tensor d = diag(k, j, t);
    t = d.with_indices(assoc::update(k, merged, d.indices()));
  }
}

Value contract(const BinaryFn& f, const Value& v) {
  if (!v.is_tensor()) return v;
  Tensor t = v.tensor();
  for (;;) {
    const auto& ix = t.indices();
    auto it = std::find_if(ix.begin(), ix.end(), [](const Index& i) { return i.variance == Variance::SupSub; });
    if (it == ix.end()) return t;
    const std::size_t axis = static_cast<std::size_t>(it - ix.begin());
    auto shape = drop_axis(t.shape(), axis);
    std::vector<Index> indices = ix;
    indices.erase(indices.begin() + static_cast<std::ptrdiff_t>(axis));

    std::vector<std::size_t> src(t.rank());
    auto fold_at = [&](std::span<const std::size_t> pos) {
      for (std::size_t a = 0, p = 0; a < t.rank(); ++a) src[a] = a == axis ? 0 : pos[p++];
      Value acc = t.at(src);
      for (std::size_t i = 1; i < t.shape()[axis]; ++i) {
        src[axis] = i;
        acc = f(acc, t.at(src));
      }
      return acc;
    };
    if (shape.empty()) return fold_at({});
    std::vector<Value> data;
    for_each_position(shape, [&](const auto& pos) { data.push_back(fold_at(pos)); });
    t = Tensor(std::move(shape), std::move(data), std::move(indices));
  }
}

Value flip_indices(const Value& v) {
  if (!v.is_tensor()) return v;
  auto indices = v.tensor().indices();
  for (auto& i : indices) {
    if (i.variance == Variance::Sup) i.variance = Variance::Sub;
    else if (i.variance == Variance::Sub) i.variance = Variance::Sup;
  }
  return v.tensor().with_indices(std::move(indices));
}

Tensor transpose(std::span<const Label> order, const Tensor& t) {
  const auto& ix = t.indices();
  if (order.size() != ix.size())
    throw Error(ErrorKind::Rank, "transpose lists " + std::to_string(order.size()) + " labels, tensor has " +
                                     std::to_string(ix.size()) + " indices");
  // perm[p]: the original axis that becomes axis p.
  std::vector<std::size_t> perm(t.rank());
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<bool> used(ix.size(), false);
  for (std::size_t p = 0; p < order.size(); ++p) {
    auto it = std::find_if(ix.begin(), ix.end(), [&](const Index& i) {
      return same_label(i.label, order[p]) && !used[static_cast<std::size_t>(&i - ix.data())];
    });
    if (it == ix.end()) throw Error(ErrorKind::Type, "transpose order is not a permutation of the tensor's indices");
    perm[p] = static_cast<std::size_t>(it - ix.begin());
    used[perm[p]] = true;
  }
  std::vector<std::size_t> shape(t.rank());
  std::vector<Index> indices(ix.size());
  for (std::size_t p = 0; p < t.rank(); ++p) shape[p] = t.shape()[perm[p]];
  for (std::size_t p = 0; p < ix.size(); ++p) indices[p] = ix[perm[p]];
  std::vector<Value> data;
  data.reserve(t.size());
  std::vector<std::size_t> src(t.rank());
  for_each_position(shape, [&](const auto& pos) {
    for (std::size_t p = 0; p < t.rank(); ++p) src[perm[p]] = pos[p];
    data.push_back(t.at(src));
  });
  return Tensor(std::move(shape), std::move(data), std::move(indices));
}

namespace {

bool compatible_indices(const std::vector<Index>& a, const std::vector<Index>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].variance != b[i].variance) return false;
    if (a[i].is_dummy() && b[i].is_dummy()) continue;
    if (!(a[i].label == b[i].label)) return false;
  }
  return true;
}

}  // namespace

Value tensor_map(const UnaryFn& f, const Tensor& t, DummySource& dummies) {
  std::vector<Value> results;
  results.reserve(t.size());
  for (const auto& c : t.data()) results.push_back(f(c));

  const bool tensors = results.front().is_tensor();
  for (const auto& r : results)
    if (r.is_tensor() != tensors) throw Error(ErrorKind::Broadcast, "mapped function returned tensors and scalars");
  if (!tensors) return Tensor(t.shape(), std::move(results), t.indices());

  const Tensor& first = results.front().tensor();
  for (const auto& r : results) {
    if (r.tensor().shape() != first.shape())
      throw Error(ErrorKind::Broadcast, "mapped results have shapes " + shape_string(first.shape()) + " and " +
                                            shape_string(r.tensor().shape()));
    if (!compatible_indices(r.tensor().indices(), first.indices()))
      throw Error(ErrorKind::Broadcast, "mapped results carry different indices");
  }

  auto shape = t.shape();
  shape.insert(shape.end(), first.shape().begin(), first.shape().end());
  auto indices = t.indices();
  if (!first.indices().empty())
    while (indices.size() < t.rank()) indices.push_back(dummies.fresh(Variance::Sub, true));
  indices.insert(indices.end(), first.indices().begin(), first.indices().end());

  std::vector<Value> data;
  data.reserve(t.size() * first.size());
  for (const auto& r : results) data.insert(data.end(), r.tensor().data().begin(), r.tensor().data().end());

  Tensor out = reduce_indices(Tensor(std::move(shape), std::move(data), std::move(indices)));
  auto ix = out.indices();
  while (!ix.empty() && ix.back().is_automatic()) ix.pop_back();
  return out.with_indices(std::move(ix));
}

Tensor generate(const std::function<Value(std::span<const long>)>& f, std::span<const std::size_t> shape) {
  std::vector<std::size_t> dims(shape.begin(), shape.end());
  if (dims.empty()) throw Error(ErrorKind::Shape, "generate-tensor needs at least one dimension");
  for (auto d : dims)
    if (d == 0) throw Error(ErrorKind::Shape, "generate-tensor dimension 0");
  std::vector<Value> data;
  std::vector<long> one_based(dims.size());
  for_each_position(dims, [&](const auto& pos) {
    for (std::size_t a = 0; a < dims.size(); ++a) one_based[a] = static_cast<long>(pos[a]) + 1;
    Value v = f(one_based);
    if (v.is_tensor()) throw Error(ErrorKind::Type, "generate-tensor function returned a tensor");
    data.push_back(std::move(v));
  });
  return Tensor(std::move(dims), std::move(data));
}

namespace {

Value apply_from(std::size_t k, std::span<const ParamKind> kinds, std::vector<Value>& args,
                 const std::function<Value(std::vector<Value>)>& body, DummySource& dummies) {
  if (k == args.size()) return body(args);
  if (kinds[k] == ParamKind::Tensor) return apply_from(k + 1, kinds, args, body, dummies);
  Value a = kinds[k] == ParamKind::InvertedScalar ? flip_indices(args[k]) : args[k];
  if (!a.is_tensor()) {
    args[k] = std::move(a);
    return apply_from(k + 1, kinds, args, body, dummies);
  }
  return tensor_map(
      [&](const Value& component) {
        std::vector<Value> inner = args;
        inner[k] = component;
        return apply_from(k + 1, kinds, inner, body, dummies);
      },
      a.tensor(), dummies);
}

}  // namespace

Value scalar_apply(std::span<const ParamKind> kinds, std::vector<Value> args,
                   const std::function<Value(std::vector<Value>)>& body, DummySource& dummies) {
  if (kinds.size() != args.size())
    throw Error(ErrorKind::Arity, "expected " + std::to_string(kinds.size()) + " arguments, got " +
                                      std::to_string(args.size()));
  Value r = apply_from(0, kinds, args, body, dummies);
  if (r.is_tensor()) return reduce_indices(r.tensor());
  return r;
}

}  // namespace indexlang::tensor
