#include "indexlang/index.hpp"

#include "indexlang/error.hpp"

namespace indexlang {

Variance variance_from_code(int c) {
  switch (c) {
    case 1: return Variance::Sup;
    case -1: return Variance::Sub;
    case 0: return Variance::SupSub;
  }
  throw Error(ErrorKind::Type, "invalid variance code " + std::to_string(c));
}

bool Index::is_automatic() const {
  const auto* d = std::get_if<DummyLabel>(&label);
  return d && d->automatic;
}

bool same_label(const Label& a, const Label& b) {
  if (const auto* x = std::get_if<SymbolLabel>(&a)) {
    const auto* y = std::get_if<SymbolLabel>(&b);
    return y && x->name == y->name;
  }
  if (const auto* x = std::get_if<DummyLabel>(&a)) {
    const auto* y = std::get_if<DummyLabel>(&b);
    return y && x->id == y->id;
  }
  return false;
}

std::string to_string(const Index& index) {
  std::string out;
  switch (index.variance) {
    case Variance::Sup: out = "~"; break;
    case Variance::Sub: out = "_"; break;
    case Variance::SupSub: out = "~_"; break;
  }
  std::visit(
      [&](const auto& l) {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, SymbolLabel>) out += l.name;
        else if constexpr (std::is_same_v<L, NumberLabel>) out += std::to_string(l.value);
        else out += "#";
      },
      index.label);
  return out;
}

std::string to_string(const std::vector<Index>& indices) {
  std::string out;
  for (const auto& i : indices) out += to_string(i);
  return out;
}

namespace assoc {

namespace {
void check(Position k, const std::vector<Index>& xs) {
  if (k < 1 || k > xs.size())
    throw Error(ErrorKind::Bounds,
                "index position " + std::to_string(k) + " out of range 1.." + std::to_string(xs.size()));
}
}  // namespace

std::vector<std::pair<Position, Position>> clashing_pairs(const std::vector<Index>& xs) {
  std::vector<std::pair<Position, Position>> out;
  for (Position k = 0; k < xs.size(); ++k)
    for (Position j = k + 1; j < xs.size(); ++j)
      if (same_label(xs[k].label, xs[j].label)) out.emplace_back(k + 1, j + 1);
  return out;
}

int variance_code(Position k, const std::vector<Index>& xs) {
  check(k, xs);
  return code(xs[k - 1].variance);
}

std::vector<Index> remove(Position k, std::vector<Index> xs) {
  check(k, xs);
  xs.erase(xs.begin() + static_cast<std::ptrdiff_t>(k - 1));
  return xs;
}

std::vector<Index> update(Position k, int c, std::vector<Index> xs) {
  check(k, xs);
  xs[k - 1].variance = variance_from_code(c);
  return xs;
}

}  // namespace assoc

}  // namespace indexlang
