#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "../support/oracles.hpp"
#include "indexlang/error.hpp"
#include "indexlang/tensor.hpp"

using namespace indexlang;
using oracle::Dense;
using oracle::Ix;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::Evaluation;
}

Value num(long v) { return Value(sym::integer(v)); }

Tensor vec(std::vector<long> xs, std::vector<Index> ix = {}) {
  return Tensor({xs.size()}, [&] {
    std::vector<Value> d;
    for (long x : xs) d.push_back(num(x));
    return d;
  }(), std::move(ix));
}

Tensor mat(std::vector<std::vector<long>> rows, std::vector<Index> ix = {}) {
  std::vector<Value> d;
  for (const auto& r : rows)
    for (long x : r) d.push_back(num(x));
  return Tensor({rows.size(), rows.front().size()}, std::move(d), std::move(ix));
}

Tensor cube() { return oracle::to_tensor(Dense{{2, 2, 2}, {1, 2, 3, 4, 5, 6, 7, 8}, {}}); }
Tensor grid3() { return mat({{11, 12, 13}, {21, 22, 23}, {31, 32, 33}}); }

std::string show(const Value& v) { return to_string(v); }
std::string show(const Tensor& t) { return to_string(Value(t)); }

Index sup(const char* n) { return Index::sup(n); }
Index sub(const char* n) { return Index::sub(n); }

}  // namespace

TEST_CASE("tensor literals") {
  std::vector<Value> rows{Value(vec({11, 12})), Value(vec({21, 22}))};
  Tensor t = tensor::from_nested(rows);
  CHECK(t.shape() == std::vector<std::size_t>{2, 2});
  CHECK(show(t) == "[|[|11 12|] [|21 22|]|]");
  std::vector<Value> flat{num(1), num(2), num(3)};
  CHECK(tensor::from_nested(flat).shape() == std::vector<std::size_t>{3});
  std::vector<Value> ragged{Value(vec({1, 2})), Value(vec({3}))};
  CHECK(kind_of([&] { tensor::from_nested(ragged); }) == ErrorKind::Shape);
}

TEST_CASE("appending indices") {
  std::vector<Index> two{Index::number(Variance::Sub, 2)};
  CHECK(show(tensor::append_indices(grid3(), two)) == "[|21 22 23|]");
  std::vector<Index> two_one{Index::number(Variance::Sub, 2), Index::number(Variance::Sub, 1)};
  CHECK(show(tensor::append_indices(grid3(), two_one)) == "21");
  std::vector<Index> too_many{Index::number(Variance::Sub, 1), Index::number(Variance::Sub, 2)};
  CHECK(kind_of([&] { tensor::append_indices(vec({1, 2, 3}), too_many); }) == ErrorKind::Rank);
  std::vector<Index> out_of_range{Index::number(Variance::Sub, 4)};
  CHECK(kind_of([&] { tensor::append_indices(vec({1, 2, 3}), out_of_range); }) == ErrorKind::Bounds);
  // existing indices are replaced when the new ones would overflow the rank
  std::vector<Index> k{sub("k")};
  CHECK(show(tensor::append_indices(vec({1, 2}, {sub("i")}), k)) == "[|1 2|]_k");
}

TEST_CASE("index reduction") {
  CHECK(show(tensor::reduce_indices(grid3().with_indices({sub("i"), sub("i")}))) == "[|11 22 33|]_i");
  Tensor walk = tensor::reduce_indices(cube().with_indices({sup("i"), sup("j"), sub("i")}));
  CHECK(show(walk) == "[|[|1 3|] [|6 8|]|]~_i~j");
  REQUIRE(walk.indices().size() == 2);
  CHECK(code(walk.indices()[0].variance) == 0);
  CHECK(code(walk.indices()[1].variance) == 1);
  CHECK(show(tensor::reduce_indices(cube().with_indices({sub("i"), sub("i"), sub("i")}))) == "[|1 8|]_i");
  CHECK(show(tensor::reduce_indices(grid3().with_indices({sup("i"), sub("i")}))) == "[|11 22 33|]~_i");
  CHECK(show(tensor::reduce_indices(cube().with_indices({sup("i"), sup("i"), sub("i")}))) == "[|1 8|]~_i");
  // a supersubscript meeting anything keeps the left code
  CHECK(show(tensor::reduce_indices(grid3().with_indices({Index::supsub("i"), sup("i")}))) == "[|11 22 33|]~_i");
  CHECK(show(tensor::reduce_indices(grid3().with_indices({sub("i"), Index::supsub("i")}))) == "[|11 22 33|]_i");

  Tensor uneven = oracle::to_tensor(Dense{{2, 3}, {1, 2, 3, 4, 5, 6}, {}});
  CHECK(kind_of([&] { tensor::reduce_indices(uneven.with_indices({sub("i"), sub("i")})); }) ==
        ErrorKind::DimensionMismatch);
}

TEST_CASE("distinct dummies never merge") {
  tensor::DummySource dummies;
  Index a = dummies.fresh(), b = dummies.fresh();
  CHECK_FALSE(a == b);
  Tensor t = tensor::reduce_indices(grid3().with_indices({a, b}));
  CHECK(t.rank() == 2);
  CHECK(tensor::reduce_indices(grid3().with_indices({a, a})).rank() == 1);
}

TEST_CASE("diag") {
  CHECK(show(tensor::diag(1, 2, mat({{11, 12}, {21, 22}}))) == "[|11 22|]");
  CHECK(show(tensor::diag(1, 2, mat({{1, 0}, {0, 1}}))) == "[|1 1|]");
  Dense d{{2, 3, 2}, {}, {}};
  for (long v = 0; v < 12; ++v) d.data.push_back(v);
  CHECK(tensor::diag(1, 3, oracle::to_tensor(d)).shape() == std::vector<std::size_t>{2, 3});
  CHECK(kind_of([&] { tensor::diag(1, 2, oracle::to_tensor(d)); }) == ErrorKind::DimensionMismatch);
  CHECK(kind_of([&] { tensor::diag(1, 4, oracle::to_tensor(d)); }) == ErrorKind::Bounds);
}

TEST_CASE("diag component property, exhaustive on small tensors") {
  for (std::size_t rank = 2; rank <= 4; ++rank) {
    Dense d;
    d.shape.assign(rank, 2);
    for (long v = 0; v < (1L << rank); ++v) d.data.push_back(v * 7 + 1);
    Tensor t = oracle::to_tensor(d);
    for (std::size_t k = 1; k <= rank; ++k)
      for (std::size_t j = k + 1; j <= rank; ++j) {
        Tensor r = tensor::diag(k, j, t);
        REQUIRE(r.rank() == rank - 1);
        std::vector<std::size_t> pos(rank - 1, 0);
        do {
          std::vector<std::size_t> full;
          for (std::size_t a = 0, b = 0; a < rank; ++a) full.push_back(a + 1 == j ? pos[k - 1] : pos[b++]);
          CHECK(r.at(pos).scalar().number() == d.at(full));
        } while (next_position(pos, r.shape()));
      }
  }
}

TEST_CASE("assoc helpers") {
  std::vector<Index> xs{sup("i"), sub("j"), sup("i")};
  CHECK(assoc::clashing_pairs(xs) == std::vector<std::pair<std::size_t, std::size_t>>{{1, 3}});
  std::vector<Index> ij{sup("i"), sub("j")};
  CHECK(assoc::variance_code(2, ij) == -1);
  CHECK(assoc::remove(2, ij) == std::vector<Index>{sup("i")});
  CHECK(assoc::update(2, 0, ij) == std::vector<Index>{sup("i"), Index::supsub("j")});
  CHECK(kind_of([&] { assoc::remove(3, ij); }) == ErrorKind::Bounds);
  CHECK(kind_of([&] { assoc::variance_code(0, ij); }) == ErrorKind::Bounds);
  std::vector<Index> numbers{Index::number(Variance::Sub, 1), Index::number(Variance::Sub, 1)};
  CHECK(assoc::clashing_pairs(numbers).empty());
}

TEST_CASE("contraction") {
  tensor::BinaryFn plus = [](const Value& a, const Value& b) { return Value(sym::add(a.scalar(), b.scalar())); };
  CHECK(show(tensor::contract(plus, Value(vec({11, 22, 33}, {Index::supsub("i")})))) == "66");
  CHECK(show(tensor::contract(plus, Value(vec({1, 2, 3}, {sub("i")})))) == "[|1 2 3|]_i");
  CHECK(show(tensor::contract(plus, num(5))) == "5");
  Tensor m = grid3().with_indices({Index::supsub("i"), sub("j")});
  CHECK(show(tensor::contract(plus, Value(m))) == "[|63 66 69|]_j");
}

TEST_CASE("flip-indices") {
  Value x(Tensor({2}, {Value(sym::symbol("r")), Value(sym::symbol("θ"))}, {sup("l")}));
  CHECK(show(tensor::flip_indices(x)) == "[|r θ|]_l");
  CHECK(equivalent(tensor::flip_indices(tensor::flip_indices(x)), x, false));
  Value s(vec({11, 22, 33}, {Index::supsub("i")}));
  CHECK(show(tensor::flip_indices(s)) == "[|11 22 33|]~_i");
  CHECK(show(tensor::flip_indices(num(3))) == "3");
}

TEST_CASE("transpose") {
  std::vector<Label> ji{SymbolLabel{"j"}, SymbolLabel{"i"}};
  std::vector<Label> ij{SymbolLabel{"i"}, SymbolLabel{"j"}};
  Tensor m = mat({{1, 2}, {3, 4}}, {sub("i"), sub("j")});
  CHECK(show(tensor::transpose(ji, m)) == "[|[|1 3|] [|2 4|]|]_j_i");
  CHECK(equivalent(Value(tensor::transpose(ij, m)), Value(m), false));
  std::vector<Label> ik{SymbolLabel{"i"}, SymbolLabel{"k"}};
  CHECK(kind_of([&] { tensor::transpose(ik, m); }) == ErrorKind::Type);
  std::vector<Label> one{SymbolLabel{"i"}};
  CHECK(kind_of([&] { tensor::transpose(one, m); }) == ErrorKind::Rank);
}

TEST_CASE("rank-3 transpose against index enumeration") {
  Dense d{{2, 3, 4}, {}, {}};
  for (long v = 0; v < 24; ++v) d.data.push_back(v);
  Tensor t = oracle::to_tensor(d).with_indices({sub("i"), sub("j"), sup("k")});
  std::vector<Label> kij{SymbolLabel{"k"}, SymbolLabel{"i"}, SymbolLabel{"j"}};
  Tensor r = tensor::transpose(kij, t);
  CHECK(r.shape() == std::vector<std::size_t>{4, 2, 3});
  CHECK(to_string(r.indices()) == "~k_i_j");
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 4; ++k) {
        std::vector<std::size_t> p{k, i, j};
        CHECK(r.at(p).scalar().number() == d.at({i, j, k}));
      }
}

TEST_CASE("tensor-map") {
  tensor::DummySource dummies;
  tensor::UnaryFn inc = [](const Value& v) { return Value(sym::add(v.scalar(), sym::integer(1))); };
  CHECK(show(tensor::tensor_map(inc, vec({1, 2, 3}, {sub("i")}), dummies)) == "[|2 3 4|]_i");
  // tensor-valued results are hoisted
  Tensor inner = vec({10, 20}, {sub("j")});
  tensor::UnaryFn scale = [&](const Value& v) {
    std::vector<Value> d;
    for (const auto& c : inner.data()) d.push_back(Value(sym::mul(v.scalar(), c.scalar())));
    return Value(Tensor(inner.shape(), std::move(d), inner.indices()));
  };
  CHECK(show(tensor::tensor_map(scale, vec({1, 2}, {sub("i")}), dummies)) == "[|[|10 20|] [|20 40|]|]_i_j");
  int n = 0;
  tensor::UnaryFn ragged = [&](const Value&) { return ++n == 1 ? Value(vec({1})) : Value(vec({1, 2})); };
  CHECK(kind_of([&] { tensor::tensor_map(ragged, vec({1, 2}), dummies); }) == ErrorKind::Broadcast);
}

TEST_CASE("generate") {
  std::vector<std::size_t> two{2};
  auto id = [](std::span<const long> ix) { return num(ix[0]); };
  CHECK(show(tensor::generate(id, two)) == "[|1 2|]");
  std::vector<std::size_t> sq{3, 3};
  auto unit = [](std::span<const long> ix) { return num(ix[0] == ix[1] ? 1 : 0); };
  CHECK(show(tensor::generate(unit, sq)) == "[|[|1 0 0|] [|0 1 0|] [|0 0 1|]|]");
}

TEST_CASE("scalar-apply broadcasting") {
  tensor::DummySource dummies;
  std::vector<tensor::ParamKind> ss{tensor::ParamKind::Scalar, tensor::ParamKind::Scalar};
  auto plus = [](std::vector<Value> a) { return Value(sym::add(a[0].scalar(), a[1].scalar())); };
  auto apply = [&](Value a, Value b) { return show(tensor::scalar_apply(ss, {a, b}, plus, dummies)); };
  CHECK(apply(Value(vec({1, 2, 3}, {sub("i")})), Value(vec({10, 20, 30}, {sub("j")}))) ==
        "[|[|11 21 31|] [|12 22 32|] [|13 23 33|]|]_i_j");
  CHECK(apply(Value(vec({1, 2, 3}, {sub("i")})), Value(vec({10, 20, 30}, {sub("i")}))) == "[|11 22 33|]_i");
  CHECK(apply(Value(mat({{11, 12}, {21, 22}, {31, 32}}, {sub("i"), sub("j")})),
              Value(vec({100, 200, 300}, {sub("i")}))) == "[|[|111 112|] [|221 222|] [|331 332|]|]_i_j");
  CHECK(apply(Value(vec({1, 2, 3})), num(10)) == "[|11 12 13|]");
  CHECK(apply(Value(vec({1, 2, 3})), Value(vec({10, 20, 30}))) == "[|[|11 21 31|] [|12 22 32|] [|13 23 33|]|]");

  std::vector<tensor::ParamKind> inv{tensor::ParamKind::Scalar, tensor::ParamKind::InvertedScalar};
  auto first = [](std::vector<Value> a) { return a[0]; };
  CHECK(show(tensor::scalar_apply(inv, {Value(vec({1, 2}, {sub("i")})), Value(vec({5, 6}, {sub("j")}))}, first,
                                  dummies)) == "[|[|1 1|] [|2 2|]|]_i~j");
  std::vector<tensor::ParamKind> one{tensor::ParamKind::Scalar};
  CHECK(kind_of([&] { tensor::scalar_apply(one, {num(1), num(2)}, first, dummies); }) == ErrorKind::Arity);
}

TEST_CASE("reduction matches the brute-force oracle and is a fixpoint") {
  std::mt19937_64 rng(5);
  const char* names[] = {"i", "j", "k"};
  for (int n = 0; n < 400; ++n) {
    std::size_t rank = 1 + rng() % 4;
    std::size_t dim = 1 + rng() % 3;
    Dense d;
    for (std::size_t a = 0; a < rank; ++a) d.shape.push_back(rng() % 5 == 0 ? 1 + rng() % 3 : dim);
    std::size_t size = 1;
    for (auto s : d.shape) size *= s;
    for (std::size_t v = 0; v < size; ++v) d.data.push_back(static_cast<long>(v) + 1);
    std::vector<Ix> ix;
    for (std::size_t a = 0; a < rank; ++a) ix.push_back(Ix{names[rng() % 3], 0, static_cast<int>(rng() % 3) - 1});
    if (ix.front().code == 0) ix.front().code = 1;  // the parser only admits ~_ on its own
    auto want = oracle::attach(d, ix);
    Tensor t = oracle::to_tensor(d).with_indices(oracle::to_indices(ix));
    CAPTURE(oracle::literal(Dense{d.shape, d.data, ix}));
    if (want.dimension_mismatch) {
      CHECK(kind_of([&] { tensor::reduce_indices(t); }) == ErrorKind::DimensionMismatch);
      continue;
    }
    Tensor got = tensor::reduce_indices(t);
    auto dense = oracle::to_dense(Value(got));
    REQUIRE(dense);
    CHECK(dense->shape == want.tensor.shape);
    CHECK(dense->data == want.tensor.data);
    CHECK(oracle::same_indices(dense->indices, want.tensor.indices));
    CHECK(equivalent(Value(tensor::reduce_indices(got)), Value(got), false));
  }
}

TEST_CASE("contracting a product matches the explicit sum") {
  std::mt19937_64 rng(8);
  tensor::DummySource dummies;
  std::vector<tensor::ParamKind> ss{tensor::ParamKind::Scalar, tensor::ParamKind::Scalar};
  auto times = [](std::vector<Value> a) { return Value(sym::mul(a[0].scalar(), a[1].scalar())); };
  tensor::BinaryFn plus = [](const Value& a, const Value& b) { return Value(sym::add(a.scalar(), b.scalar())); };
  for (int n = 0; n < 100; ++n) {
    std::size_t len = 1 + rng() % 5;
    std::vector<long> x, y;
    long want = 0;
    for (std::size_t k = 0; k < len; ++k) {
      x.push_back(static_cast<long>(rng() % 21) - 10);
      y.push_back(static_cast<long>(rng() % 21) - 10);
      want += x.back() * y.back();
    }
    Value prod = tensor::scalar_apply(ss, {Value(vec(x, {sup("i")})), Value(vec(y, {sub("i")}))}, times, dummies);
    CHECK(tensor::contract(plus, prod).scalar() == sym::integer(want));
  }
}
