#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace indexlang {

/// Index position. The underlying values are the 1 / -1 / 0 codes used by the
/// reduction rules for superscript, subscript and supersubscript.
enum class Variance : int { Sub = -1, SupSub = 0, Sup = 1 };

inline int code(Variance v) { return static_cast<int>(v); }
Variance variance_from_code(int code);

struct SymbolLabel {
  std::string name;
  friend bool operator==(const SymbolLabel&, const SymbolLabel&) = default;
};

struct NumberLabel {
  long value = 1;
  friend bool operator==(const NumberLabel&, const NumberLabel&) = default;
};

/// `#`: every instance is distinct. Automatic dummies stand in for omitted
/// indices and are dropped again when they end up trailing in a result.
struct DummyLabel {
  std::uint64_t id = 0;
  bool automatic = false;
  friend bool operator==(const DummyLabel& a, const DummyLabel& b) { return a.id == b.id; }
};

using Label = std::variant<SymbolLabel, NumberLabel, DummyLabel>;

struct Index {
  Variance variance = Variance::Sub;
  Label label;

  static Index sup(std::string name) { return {Variance::Sup, SymbolLabel{std::move(name)}}; }
  static Index sub(std::string name) { return {Variance::Sub, SymbolLabel{std::move(name)}}; }
  static Index supsub(std::string name) { return {Variance::SupSub, SymbolLabel{std::move(name)}}; }
  static Index number(Variance v, long n) { return {v, NumberLabel{n}}; }

  bool is_number() const { return std::holds_alternative<NumberLabel>(label); }
  bool is_dummy() const { return std::holds_alternative<DummyLabel>(label); }
  bool is_automatic() const;

  friend bool operator==(const Index&, const Index&) = default;
};

/// Two indices clash when they carry the same symbol or the same dummy.
/// Number labels never clash.
bool same_label(const Label& a, const Label& b);

std::string to_string(const Index& index);
std::string to_string(const std::vector<Index>& indices);

// Helpers over the ordered index list (the assoc list of the reduction rules).
// Positions are 1-based; out-of-range positions raise a bounds error.
namespace assoc {

using Position = std::size_t;

/// Every pair (k, j), k < j, of positions carrying the same label, ordered by k then j.
std::vector<std::pair<Position, Position>> clashing_pairs(const std::vector<Index>& xs);
int variance_code(Position k, const std::vector<Index>& xs);
std::vector<Index> remove(Position k, std::vector<Index> xs);
std::vector<Index> update(Position k, int code, std::vector<Index> xs);

}  // namespace assoc

}  // namespace indexlang
