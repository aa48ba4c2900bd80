#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "indexlang/ast.hpp"
#include "indexlang/tensor.hpp"
#include "indexlang/value.hpp"

namespace indexlang {

namespace lang {
class Frame;
}
using FramePtr = std::shared_ptr<lang::Frame>;

class Interpreter;

using NativeFn = std::function<Value(Interpreter&, std::vector<Value>&)>;

/// A closure over a lambda body or a native implementation. Scalar and
/// inverted-scalar parameters are broadcast over tensor arguments before the
/// body runs; the body only ever sees their components.
struct FunctionValue {
  std::string name;
  std::vector<lang::Param> params;
  /// Natives only: any number (>= 1) of arguments, all of params[0]'s kind.
  bool variadic = false;

  lang::NodePtr body;
  FramePtr env;
  NativeFn native;

  std::vector<tensor::ParamKind> kinds_for(std::size_t argc) const;
};

namespace lang {

/// One lexical scope. Variables are keyed by name plus index signature
/// ("" for plain names, "__" for `g__`).
class Frame {
 public:
  explicit Frame(FramePtr parent = nullptr) : parent_(std::move(parent)) {}

  void define(const std::string& name, const std::string& signature, Value v);

  /// Exact signature first, then the plain name. A plain lookup of a name
  /// bound only under signatures succeeds when exactly one exists.
  std::optional<Value> lookup(const std::string& name, const std::string& signature) const;

 private:
  std::optional<Value> find_exact(const std::string& name, const std::string& signature) const;
  std::optional<Value> find_plain(const std::string& name) const;

  FramePtr parent_;
  std::map<std::pair<std::string, std::string>, Value> vars_;
};

}  // namespace lang

/// An evaluator instance: global environment, dummy counter and local-symbol
/// counter. Not thread-safe; use one instance per thread.
class Interpreter {
 public:
  /// Installs the builtins and the prelude unless `bare` is set.
  explicit Interpreter(bool bare = false);

  /// Evaluates every top-level form; returns the values of the non-define forms.
  std::vector<Value> run(std::string_view source);
  /// nullopt for define.
  std::optional<Value> eval_toplevel(const lang::Node& form);
  Value eval(const lang::Node& node, const FramePtr& env);

  Value apply(const Value& fn, std::vector<Value> args);
  /// Runs the body directly, skipping scalar-parameter broadcasting.
  Value call_body(const FunctionValue& fn, std::vector<Value> args);

  void define_native(const std::string& name, std::vector<lang::Param> params, NativeFn fn, bool variadic = false);
  void define(const std::string& name, Value v, const std::string& signature = "");
  std::optional<Value> lookup(const std::string& name, const std::string& signature = "") const;

  tensor::DummySource& dummies() { return dummies_; }
  const FramePtr& globals() const { return globals_; }

  /// Local symbols created by with-symbols are named `<name>'<n>`; the
  /// quote character cannot occur inside a source identifier.
  static bool is_local_symbol_name(std::string_view name);

 private:
  Value eval_node(const lang::Node& node, const FramePtr& env);
  Value eval_identifier(const lang::Node& node, const std::string& signature, const FramePtr& env);
  Value eval_indexed(const lang::Node& node, const FramePtr& env);
  Index eval_index(const lang::IndexSuffix& s, const FramePtr& env, SourceLocation loc);
  Label eval_label(const std::string& name, const FramePtr& env, SourceLocation loc);
  Value eval_with_symbols(const std::vector<std::string>& names, const lang::Node& body, const FramePtr& env);
  Value eval_transpose(const lang::Node& node, const FramePtr& env);
  Value eval_generate(const lang::Node& node, const FramePtr& env);
  void eval_define(const lang::Node& node, const FramePtr& env);

  FramePtr globals_;
  tensor::DummySource dummies_;
  std::uint64_t next_local_ = 1;
};

}  // namespace indexlang
