#include "indexlang/error.hpp"

namespace indexlang {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Arithmetic: return "arithmetic error";
    case ErrorKind::Shape: return "shape error";
    case ErrorKind::Rank: return "rank error";
    case ErrorKind::Bounds: return "bounds error";
    case ErrorKind::DimensionMismatch: return "dimension mismatch";
    case ErrorKind::Arity: return "arity error";
    case ErrorKind::Type: return "type error";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Unbound: return "unbound symbol";
    case ErrorKind::Ambiguous: return "ambiguous reference";
    case ErrorKind::Singular: return "singular matrix";
    case ErrorKind::Broadcast: return "broadcast error";
    case ErrorKind::Incomparable: return "incomparable arguments";
    case ErrorKind::Evaluation: return "evaluation error";
  }
  return "error";
}

namespace {

std::string render(ErrorKind kind, const std::string& message, SourceLocation where) {
  std::string out(to_string(kind));
  if (where.known()) {
    out += " at " + std::to_string(where.line) + ":" + std::to_string(where.column);
  }
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorKind kind, const std::string& message, SourceLocation where)
    : std::runtime_error(render(kind, message, where)), kind_(kind), where_(where), detail_(message) {}

Error Error::located(SourceLocation where) const {
  if (where_.known() || !where.known()) return *this;
  return Error(kind_, detail_, where);
}

}  // namespace indexlang
