#pragma once

#include <memory>
#include <string>
#include <vector>

#include "indexlang/error.hpp"
#include "indexlang/expr.hpp"
#include "indexlang/index.hpp"
#include "indexlang/tensor.hpp"

namespace indexlang::lang {

/// One `~x`, `_x` or `~_x` suffix as written. A Marker has no label and only
/// occurs in index signatures such as `g__` or `Γ~__`.
struct IndexSuffix {
  enum class Label { Marker, Name, Number, Dummy };

  Variance variance = Variance::Sub;
  Label label = Label::Marker;
  std::string name;
  long number = 0;
};

/// Signature key built from the variances of a suffix list, e.g. "~__".
std::string signature_of(const std::vector<IndexSuffix>& suffixes);

enum class NodeKind {
  Number,
  Boolean,
  Identifier,
  Indexed,         // children[0] with suffixes
  Apply,           // children[0] applied to the rest
  Lambda,          // params, children[0] = body
  Shorthand,       // n#body: arity, children[0] = body
  Define,          // name + suffixes, children[0] = body
  WithSymbols,     // names, children[0] = body
  If,              // condition, then, else
  TensorLiteral,   // elements
  Contract,        // function, tensor
  TensorMap,       // function, tensor
  FlipIndices,     // tensor
  Transpose,       // names, children[0] = tensor
  GenerateTensor,  // function, children[1..] = dimensions
  Quote,           // children[0]
};

struct Param {
  tensor::ParamKind kind = tensor::ParamKind::Scalar;
  std::string name;
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind = NodeKind::Number;
  SourceLocation loc;

  sym::Rational number;
  bool boolean = false;
  std::string name;
  long arity = 0;
  std::vector<IndexSuffix> suffixes;
  std::vector<Param> params;
  std::vector<std::string> names;
  std::vector<NodePtr> children;
};

/// Parses a whole source text into its top-level forms. Errors carry the
/// line and column of the offending token.
std::vector<NodePtr> parse(std::string_view source);

}  // namespace indexlang::lang
