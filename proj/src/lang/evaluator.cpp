#include "indexlang/evaluator.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>

#include "indexlang/error.hpp"
#include "indexlang/stdlib.hpp"

namespace indexlang {

using lang::Node;
using lang::NodeKind;
using lang::NodePtr;

std::vector<tensor::ParamKind> FunctionValue::kinds_for(std::size_t argc) const {
  if (variadic) {
    if (argc == 0) throw Error(ErrorKind::Arity, "`" + name + "` needs at least one argument");
    return std::vector<tensor::ParamKind>(argc, params.front().kind);
  }
  if (argc != params.size())
    throw Error(ErrorKind::Arity, "`" + name + "` takes " + std::to_string(params.size()) + " argument" +
                                      (params.size() == 1 ? "" : "s") + ", got " + std::to_string(argc));
  std::vector<tensor::ParamKind> kinds;
  for (const auto& p : params) kinds.push_back(p.kind);
  return kinds;
}

namespace lang {

void Frame::define(const std::string& name, const std::string& signature, Value v) {
  vars_[{name, signature}] = std::move(v);
}

std::optional<Value> Frame::find_exact(const std::string& name, const std::string& signature) const {
  for (const Frame* f = this; f; f = f->parent_.get()) {
    auto it = f->vars_.find({name, signature});
    if (it != f->vars_.end()) return it->second;
  }
  return std::nullopt;
}

std::optional<Value> Frame::find_plain(const std::string& name) const {
  for (const Frame* f = this; f; f = f->parent_.get()) {
    auto it = f->vars_.lower_bound({name, ""});
    if (it == f->vars_.end() || it->first.first != name) continue;
    if (it->first.second.empty()) return it->second;
    auto next = std::next(it);
    if (next != f->vars_.end() && next->first.first == name)
      throw Error(ErrorKind::Ambiguous, "`" + name + "` is bound under several index signatures");
    return it->second;
  }
  return std::nullopt;
}

std::optional<Value> Frame::lookup(const std::string& name, const std::string& signature) const {
  if (!signature.empty())
    if (auto v = find_exact(name, signature)) return v;
  return find_plain(name);
}

}  // namespace lang

Interpreter::Interpreter(bool bare) : globals_(std::make_shared<lang::Frame>()) {
  if (!bare) stdlib::install(*this);
}

bool Interpreter::is_local_symbol_name(std::string_view name) {
  for (std::size_t i = 0; i + 1 < name.size(); ++i)
    if (name[i] == '\'' && std::isdigit(static_cast<unsigned char>(name[i + 1]))) return true;
  return false;
}

void Interpreter::define_native(const std::string& name, std::vector<lang::Param> params, NativeFn fn, bool variadic) {
  auto f = std::make_shared<FunctionValue>();
  f->name = name;
  f->params = std::move(params);
  f->variadic = variadic;
  f->native = std::move(fn);
  define(name, Value(FunctionPtr(std::move(f))));
}

void Interpreter::define(const std::string& name, Value v, const std::string& signature) {
  globals_->define(name, signature, std::move(v));
}

std::optional<Value> Interpreter::lookup(const std::string& name, const std::string& signature) const {
  return globals_->lookup(name, signature);
}

std::vector<Value> Interpreter::run(std::string_view source) {
  std::vector<Value> results;
  for (const auto& form : lang::parse(source))
    if (auto v = eval_toplevel(*form)) results.push_back(std::move(*v));
  return results;
}

std::optional<Value> Interpreter::eval_toplevel(const Node& form) {
  if (form.kind == NodeKind::Define) {
    try {
      eval_define(form, globals_);
    } catch (const Error& e) {
      throw e.located(form.loc);
    }
    return std::nullopt;
  }
  return eval(form, globals_);
}

Value Interpreter::eval(const Node& node, const FramePtr& env) {
  try {
    return eval_node(node, env);
  } catch (const Error& e) {
    throw e.located(node.loc);
  }
}

Value Interpreter::apply(const Value& fn, std::vector<Value> args) {
  if (!fn.is_function()) throw Error(ErrorKind::Type, "cannot apply a " + fn.type_name() + ": " + to_string(fn));
  const FunctionValue& f = fn.function();
  auto kinds = f.kinds_for(args.size());
  if (std::all_of(kinds.begin(), kinds.end(), [](auto k) { return k == tensor::ParamKind::Tensor; }))
    return call_body(f, std::move(args));
  FunctionPtr keep = fn.function_ptr();
  return tensor::scalar_apply(
      kinds, std::move(args), [&](std::vector<Value> a) { return call_body(*keep, std::move(a)); }, dummies_);
}

Value Interpreter::call_body(const FunctionValue& f, std::vector<Value> args) {
  if (f.native) return f.native(*this, args);
  auto frame = std::make_shared<lang::Frame>(f.env);
  for (std::size_t i = 0; i < f.params.size(); ++i) frame->define(f.params[i].name, "", std::move(args[i]));
  return eval(*f.body, frame);
}

Value Interpreter::eval_node(const Node& node, const FramePtr& env) {
  switch (node.kind) {
    case NodeKind::Number: return sym::number(node.number);
    case NodeKind::Boolean: return Value(node.boolean);
    case NodeKind::Identifier: return eval_identifier(node, "", env);
    case NodeKind::Indexed: return eval_indexed(node, env);
    case NodeKind::Quote: return eval(*node.children[0], env);

    case NodeKind::Apply: {
      Value fn = eval(*node.children[0], env);
      if (!fn.is_function()) {
        if (node.children[0]->kind == NodeKind::Identifier && fn.is_scalar() && fn.scalar().is_symbol())
          throw Error(ErrorKind::Unbound, "unbound function `" + node.children[0]->name + "`");
        throw Error(ErrorKind::Type, "cannot apply a " + fn.type_name() + ": " + to_string(fn));
      }
      std::vector<Value> args;
      args.reserve(node.children.size() - 1);
      for (std::size_t i = 1; i < node.children.size(); ++i) args.push_back(eval(*node.children[i], env));
      return apply(fn, std::move(args));
    }

    case NodeKind::Lambda:
    case NodeKind::Shorthand: {
      auto f = std::make_shared<FunctionValue>();
      f->name = "lambda";
      f->params = node.params;
      f->body = node.children[0];
      f->env = env;
      return Value(FunctionPtr(std::move(f)));
    }

    case NodeKind::Define: return (eval_define(node, env), Value(true));
    case NodeKind::WithSymbols: return eval_with_symbols(node.names, *node.children[0], env);

    case NodeKind::If: {
      Value c = eval(*node.children[0], env);
      if (!c.is_bool()) throw Error(ErrorKind::Type, "if condition is a " + c.type_name() + ", not a boolean");
      return eval(*node.children[c.boolean() ? 1 : 2], env);
    }

    case NodeKind::TensorLiteral: {
      std::vector<Value> elements;
      for (const auto& c : node.children) elements.push_back(eval(*c, env));
      return tensor::from_nested(elements);
    }

    case NodeKind::Contract: {
      Value f = eval(*node.children[0], env);
      Value t = eval(*node.children[1], env);
      if (!f.is_function()) throw Error(ErrorKind::Type, "contract needs a function");
      if (!f.function().variadic) f.function().kinds_for(2);
      return tensor::contract([&](const Value& a, const Value& b) { return apply(f, {a, b}); }, t);
    }

    case NodeKind::TensorMap: {
      Value f = eval(*node.children[0], env);
      Value t = eval(*node.children[1], env);
      if (!t.is_tensor()) return apply(f, {t});
      return tensor::tensor_map([&](const Value& c) { return apply(f, {c}); }, t.tensor(), dummies_);
    }

    case NodeKind::FlipIndices: return tensor::flip_indices(eval(*node.children[0], env));
    case NodeKind::Transpose: return eval_transpose(node, env);
    case NodeKind::GenerateTensor: return eval_generate(node, env);
  }
  throw Error(ErrorKind::Evaluation, "unknown node");
}

Value Interpreter::eval_identifier(const Node& node, const std::string& signature, const FramePtr& env) {
  if (auto v = env->lookup(node.name, signature)) return *v;
  return sym::symbol(node.name);
}

Value Interpreter::eval_indexed(const Node& node, const FramePtr& env) {
  const Node& base = *node.children[0];
  Value v = base.kind == NodeKind::Identifier ? eval_identifier(base, lang::signature_of(node.suffixes), env)
                                              : eval(base, env);
  if (node.suffixes.front().label == lang::IndexSuffix::Label::Marker) return v;
  std::vector<Index> indices;
  for (const auto& s : node.suffixes) indices.push_back(eval_index(s, env, node.loc));
  if (!v.is_tensor()) throw Error(ErrorKind::Type, "cannot index a " + v.type_name() + ": " + to_string(v));
  return tensor::append_indices(v.tensor(), indices);
}

Index Interpreter::eval_index(const lang::IndexSuffix& s, const FramePtr& env, SourceLocation loc) {
  switch (s.label) {
    case lang::IndexSuffix::Label::Dummy: return dummies_.fresh(s.variance);
    case lang::IndexSuffix::Label::Number: return Index::number(s.variance, s.number);
    case lang::IndexSuffix::Label::Name: return Index{s.variance, eval_label(s.name, env, loc)};
    case lang::IndexSuffix::Label::Marker: break;
  }
  throw Error(ErrorKind::Parse, "index signature marker used as an index", loc);
}

Label Interpreter::eval_label(const std::string& name, const FramePtr& env, SourceLocation loc) {
  auto v = env->lookup(name, "");
  if (!v) return SymbolLabel{name};
  if (v->is_scalar()) {
    const sym::Expr& e = v->scalar();
    if (e.is_symbol()) return SymbolLabel{e.name()};
    if (e.is_integer()) {
      if (!e.number().get_num().fits_slong_p()) throw Error(ErrorKind::Bounds, "index out of range", loc);
      return NumberLabel{e.number().get_num().get_si()};
    }
  }
  throw Error(ErrorKind::Type, "index `" + name + "` is bound to " + to_string(*v), loc);
}

namespace {

// Rewrites the local symbols of one with-symbols scope to dummies.
class LocalRewriter {
 public:
  LocalRewriter(const std::vector<std::string>& locals, tensor::DummySource& dummies)
      : locals_(locals), dummies_(dummies) {}

  Value operator()(const Value& v) {
    if (v.is_scalar()) return scalar(v.scalar());
    if (!v.is_tensor()) return v;
    const Tensor& t = v.tensor();
    bool changed = false;
    auto indices = t.indices();
    for (auto& i : indices) {
      const auto* s = std::get_if<SymbolLabel>(&i.label);
      if (s && is_local(s->name)) {
        i.label = DummyLabel{id_for(s->name), false};
        changed = true;
      }
    }
    std::vector<Value> data;
    data.reserve(t.size());
    for (const auto& c : t.data()) {
      data.push_back(c.is_scalar() ? Value(scalar(c.scalar())) : c);
      if (c.is_scalar() && !(data.back().scalar() == c.scalar())) changed = true;
    }
    if (!changed) return v;
    return Tensor(t.shape(), std::move(data), std::move(indices));
  }

 private:
  bool is_local(const std::string& name) const {
    return std::find(locals_.begin(), locals_.end(), name) != locals_.end();
  }

  std::uint64_t id_for(const std::string& name) {
    auto [it, fresh] = ids_.emplace(name, 0);
    if (fresh) it->second = dummies_.next_id();
    return it->second;
  }

  sym::Expr scalar(const sym::Expr& e) {
    sym::Expr out = e;
    for (const auto& name : sym::free_symbols(e))
      if (is_local(name))
        out = sym::substitute(out, name, sym::symbol(sym::kDummySymbolPrefix + std::to_string(id_for(name))));
    return out;
  }

  const std::vector<std::string>& locals_;
  tensor::DummySource& dummies_;
  std::unordered_map<std::string, std::uint64_t> ids_;
};

}  // namespace

Value Interpreter::eval_with_symbols(const std::vector<std::string>& names, const Node& body, const FramePtr& env) {
  auto frame = std::make_shared<lang::Frame>(env);
  std::vector<std::string> locals;
  for (const auto& n : names) {
    locals.push_back(n + "'" + std::to_string(next_local_++));
    frame->define(n, "", sym::symbol(locals.back()));
  }
  return LocalRewriter(locals, dummies_)(eval(body, frame));
}

Value Interpreter::eval_transpose(const Node& node, const FramePtr& env) {
  std::vector<Label> order;
  for (const auto& n : node.names) order.push_back(eval_label(n, env, node.loc));
  Value t = eval(*node.children[0], env);
  if (!t.is_tensor()) {
    if (order.empty()) return t;
    throw Error(ErrorKind::Type, "transpose of a " + t.type_name());
  }
  return tensor::transpose(order, t.tensor());
}

Value Interpreter::eval_generate(const Node& node, const FramePtr& env) {
  Value f = eval(*node.children[0], env);
  if (!f.is_function()) throw Error(ErrorKind::Type, "generate-tensor needs a function");
  std::vector<std::size_t> shape;
  for (std::size_t i = 1; i < node.children.size(); ++i) {
    Value d = eval(*node.children[i], env);
    if (!d.is_scalar() || !d.scalar().is_integer() || d.scalar().number() < 1)
      throw Error(ErrorKind::Shape, "tensor dimensions must be positive integers, got " + to_string(d));
    shape.push_back(d.scalar().number().get_num().get_ui());
  }
  f.function().kinds_for(shape.size());
  return tensor::generate(
      [&](std::span<const long> idx) {
        std::vector<Value> args;
        for (long i : idx) args.emplace_back(sym::integer(i));
        return apply(f, std::move(args));
      },
      shape);
}

void Interpreter::eval_define(const Node& node, const FramePtr& env) {
  const std::string signature = lang::signature_of(node.suffixes);
  std::vector<std::string> names;
  for (const auto& s : node.suffixes)
    if (s.label == lang::IndexSuffix::Label::Name) names.push_back(s.name);
  if (names.empty()) {
    env->define(node.name, signature, eval(*node.children[0], env));
    return;
  }
  // $A_i_j = (with-symbols {i j} (transpose {i j} body))
  auto transposed = std::make_shared<Node>();
  transposed->kind = NodeKind::Transpose;
  transposed->loc = node.loc;
  transposed->names = names;
  transposed->children = {node.children[0]};
  Value v = eval_with_symbols(names, *transposed, env);
  env->define(node.name, signature, std::move(v));
}

}  // namespace indexlang
