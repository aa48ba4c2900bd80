#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace indexlang {

enum class ErrorKind {
  Arithmetic,
  Shape,
  Rank,
  Bounds,
  DimensionMismatch,
  Arity,
  Type,
  Parse,
  Unbound,
  Ambiguous,
  Singular,
  Broadcast,
  Incomparable,
  Evaluation,
};

std::string_view to_string(ErrorKind kind);

struct SourceLocation {
  int line = 0;
  int column = 0;

  bool known() const { return line > 0; }
};

/// Every failure raised by the interpreter. The kind is stable and is what
/// tests and the CLI dispatch on; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, SourceLocation where = {});

  ErrorKind kind() const { return kind_; }
  SourceLocation where() const { return where_; }
  const std::string& detail() const { return detail_; }

  // Attaches a location if none was recorded yet.
  Error located(SourceLocation where) const;

 private:
  ErrorKind kind_;
  SourceLocation where_;
  std::string detail_;
};

}  // namespace indexlang
