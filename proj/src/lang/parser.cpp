#include <algorithm>
#include <cctype>
#include <functional>
#include <optional>
#include <string_view>

#include "indexlang/ast.hpp"

namespace indexlang::lang {

std::string signature_of(const std::vector<IndexSuffix>& suffixes) {
  std::string sig;
  for (const auto& s : suffixes) {
    switch (s.variance) {
      case Variance::Sup: sig += '~'; break;
      case Variance::Sub: sig += '_'; break;
      case Variance::SupSub: sig += '='; break;
    }
  }
  return sig;
}

namespace {

enum class Tok {
  LParen, RParen, LBracket, RBracket, LBrace, RBrace,
  TensorOpen, TensorClose, Quote,
  Atom,       // identifier or number text
  Boolean,    // #t / #f
  Shorthand,  // n#
  Suffix,     // index suffix glued to the previous token
  Power,      // ^n glued to the previous token
  End,
};

struct Token {
  Tok kind = Tok::End;
  SourceLocation loc;
  std::string text;
  IndexSuffix suffix;
  long value = 0;
};

Token token(Tok kind, SourceLocation loc, std::string text = {}, long value = 0) {
  Token t;
  t.kind = kind;
  t.loc = loc;
  t.text = std::move(text);
  t.value = value;
  return t;
}

bool is_delimiter(unsigned char c) {
  return std::isspace(c) || c == '(' || c == ')' || c == '[' || c == ']' || c == '{' || c == '}' || c == '|' ||
         c == '\'' || c == '~' || c == '_' || c == ';' || c == '^' || c == '#';
}

bool is_ident_char(unsigned char c) { return c >= 0x80 || (c > 0x20 && !is_delimiter(c)); }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      bool glued = skip_space() == 0 && !out.empty() && ends_expression(out.back().kind);
      if (pos_ >= src_.size()) {
        out.push_back(token(Tok::End, here()));
        return out;
      }
      SourceLocation loc = here();
      char c = src_[pos_];
      if ((c == '~' || c == '_') && glued) {
        out.push_back(suffix(loc));
        continue;
      }
      if (c == '^' && glued) {
        advance();
        out.push_back(token(Tok::Power, loc, {}, integer_after("^")));
        continue;
      }
      if (c == '~' || c == '_') fail(loc, "index marker not attached to an expression");
      switch (c) {
        case '(': advance(); out.push_back(token(Tok::LParen, loc)); continue;
        case ')': advance(); out.push_back(token(Tok::RParen, loc)); continue;
        case '{': advance(); out.push_back(token(Tok::LBrace, loc)); continue;
        case '}': advance(); out.push_back(token(Tok::RBrace, loc)); continue;
        case ']': advance(); out.push_back(token(Tok::RBracket, loc)); continue;
        case '\'': advance(); out.push_back(token(Tok::Quote, loc)); continue;
        case '[':
          advance();
          if (peek() == '|') {
            advance();
            out.push_back(token(Tok::TensorOpen, loc));
          } else {
            out.push_back(token(Tok::LBracket, loc));
          }
          continue;
        case '|':
          advance();
          if (peek() != ']') fail(loc, "expected `|]`");
          advance();
          out.push_back(token(Tok::TensorClose, loc));
          continue;
        case '#':
          advance();
          if ((peek() == 't' || peek() == 'f') && (pos_ + 1 >= src_.size() || is_delimiter(src_[pos_ + 1]))) {
            out.push_back(token(Tok::Boolean, loc, std::string(1, peek())));
            advance();
            continue;
          }
          fail(loc, "unexpected `#`");
      }
      std::string text = identifier();
      if (text.empty()) fail(loc, std::string("unexpected character `") + c + "`");
      if (peek() == '#' && std::all_of(text.begin(), text.end(), [](unsigned char ch) { return std::isdigit(ch); })) {
        advance();
        out.push_back(token(Tok::Shorthand, loc, text, std::stol(text)));
        continue;
      }
      out.push_back(token(Tok::Atom, loc, std::move(text)));
    }
  }

 private:
  static bool ends_expression(Tok k) {
    return k == Tok::Atom || k == Tok::RParen || k == Tok::TensorClose || k == Tok::Suffix || k == Tok::Power ||
           k == Tok::Boolean;
  }

  [[noreturn]] static void fail(SourceLocation loc, const std::string& msg) {
    throw Error(ErrorKind::Parse, msg, loc);
  }

  SourceLocation here() const { return {line_, column_}; }
  char peek(std::size_t ahead = 0) const { return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0'; }

  void advance() {
    unsigned char c = static_cast<unsigned char>(src_[pos_++]);
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else if ((c & 0xC0) != 0x80) {
      ++column_;
    }
  }

  // Returns the number of characters skipped, comments included.
  std::size_t skip_space() {
    std::size_t skipped = 0;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ';') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance(), ++skipped;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
        ++skipped;
      } else {
        break;
      }
    }
    return skipped;
  }

  std::string identifier() {
    std::size_t start = pos_;
    while (pos_ < src_.size() && is_ident_char(static_cast<unsigned char>(src_[pos_]))) advance();
    return std::string(src_.substr(start, pos_ - start));
  }

  long integer_after(const char* what) {
    SourceLocation loc = here();
    std::size_t start = pos_;
    if (peek() == '-') advance();
    while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
    std::string digits(src_.substr(start, pos_ - start));
    if (digits.empty() || digits == "-") fail(loc, std::string("expected an integer after `") + what + "`");
    return std::stol(digits);
  }

  bool label_starts(char c) const {
    return c == '#' || std::isdigit(static_cast<unsigned char>(c)) || is_ident_char(static_cast<unsigned char>(c));
  }

  Token suffix(SourceLocation loc) {
    IndexSuffix s;
    if (peek() == '~' && peek(1) == '_' && label_starts(peek(2))) {
      s.variance = Variance::SupSub;
      advance();
      advance();
    } else {
      s.variance = peek() == '~' ? Variance::Sup : Variance::Sub;
      advance();
    }
    char c = peek();
    if (c == '#') {
      advance();
      s.label = IndexSuffix::Label::Dummy;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      s.label = IndexSuffix::Label::Number;
      s.number = integer_after("index marker");
      if (s.number < 1) fail(loc, "index numbers start at 1");
    } else if (is_ident_char(static_cast<unsigned char>(c))) {
      s.label = IndexSuffix::Label::Name;
      s.name = identifier();
    } else {
      s.label = IndexSuffix::Label::Marker;
    }
    Token t = token(Tok::Suffix, loc);
    t.suffix = std::move(s);
    return t;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

std::optional<sym::Rational> parse_number(std::string text) {
  if (text[0] == '+') text.erase(0, 1);
  if (text.empty()) return std::nullopt;
  std::size_t i = text[0] == '-' ? 1 : 0;
  if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i]))) return std::nullopt;
  std::size_t digits_end = i;
  while (digits_end < text.size() && std::isdigit(static_cast<unsigned char>(text[digits_end]))) ++digits_end;
  if (digits_end == text.size()) return sym::Rational(sym::Integer(text));
  char sep = text[digits_end];
  std::string rest = text.substr(digits_end + 1);
  if (rest.empty() || !std::all_of(rest.begin(), rest.end(), [](unsigned char c) { return std::isdigit(c); }))
    return std::nullopt;
  sym::Integer whole(text.substr(0, digits_end));
  if (sep == '/') {
    sym::Integer den(rest);
    if (den == 0) throw Error(ErrorKind::Arithmetic, "zero denominator in literal " + text);
    sym::Rational q(whole, den);
    q.canonicalize();
    return q;
  }
  if (sep == '.') {
    sym::Integer scale(1);
    for (std::size_t k = 0; k < rest.size(); ++k) scale *= 10;
    sym::Integer frac(rest);
    bool negative = text[0] == '-';
    sym::Rational q(whole * scale + (negative ? -frac : frac), scale);
    q.canonicalize();
    return q;
  }
  return std::nullopt;
}

std::string strip_dollar(const std::string& name) {
  return name.size() > 1 && name[0] == '$' ? name.substr(1) : name;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  std::vector<NodePtr> program() {
    std::vector<NodePtr> forms;
    while (peek().kind != Tok::End) forms.push_back(expression());
    return forms;
  }

 private:
  using NodeMut = std::shared_ptr<Node>;

  [[noreturn]] static void fail(SourceLocation loc, const std::string& msg) {
    throw Error(ErrorKind::Parse, msg, loc);
  }

  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_ == toks_.size() - 1 ? pos_ : pos_++]; }

  const Token& expect(Tok kind, const char* what) {
    if (peek().kind != kind) fail(peek().loc, std::string("expected ") + what);
    return next();
  }

  static NodeMut make(NodeKind kind, SourceLocation loc) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->loc = loc;
    return n;
  }

  NodePtr expression() {
    NodePtr e = primary();
    std::vector<IndexSuffix> suffixes;
    while (peek().kind == Tok::Suffix || peek().kind == Tok::Power) {
      const Token& t = next();
      if (t.kind == Tok::Suffix) {
        suffixes.push_back(t.suffix);
        continue;
      }
      e = with_suffixes(std::move(e), std::move(suffixes));
      suffixes.clear();
      auto p = make(NodeKind::Apply, t.loc);
      auto caret = make(NodeKind::Identifier, t.loc);
      caret->name = "^";
      auto n = make(NodeKind::Number, t.loc);
      n->number = t.value;
      p->children = {caret, e, n};
      e = p;
    }
    return with_suffixes(std::move(e), std::move(suffixes));
  }

  NodePtr with_suffixes(NodePtr e, std::vector<IndexSuffix> suffixes) {
    if (suffixes.empty()) return e;
    bool markers = suffixes.front().label == IndexSuffix::Label::Marker;
    for (const auto& s : suffixes)
      if ((s.label == IndexSuffix::Label::Marker) != markers)
        fail(e->loc, "index signature markers mixed with indices");
    if (markers && e->kind != NodeKind::Identifier) fail(e->loc, "index signature on a non-variable");
    auto n = make(NodeKind::Indexed, e->loc);
    n->suffixes = std::move(suffixes);
    n->children = {std::move(e)};
    return n;
  }

  NodePtr primary() {
    const Token& t = next();
    switch (t.kind) {
      case Tok::Atom: return atom(t);
      case Tok::Boolean: {
        auto n = make(NodeKind::Boolean, t.loc);
        n->boolean = t.text == "t";
        return n;
      }
      case Tok::Quote: {
        auto n = make(NodeKind::Quote, t.loc);
        n->children = {expression()};
        return n;
      }
      case Tok::Shorthand: return shorthand(t);
      case Tok::TensorOpen: {
        auto n = make(NodeKind::TensorLiteral, t.loc);
        while (peek().kind != Tok::TensorClose) {
          if (peek().kind == Tok::End) fail(t.loc, "unterminated tensor literal");
          n->children.push_back(expression());
        }
        next();
        if (n->children.empty()) fail(t.loc, "empty tensor literal");
        return n;
      }
      case Tok::LParen: return form(t);
      case Tok::End: fail(t.loc, "unexpected end of input");
      default: fail(t.loc, "unexpected token");
    }
  }

  NodePtr atom(const Token& t) {
    if (auto q = parse_number(t.text)) {
      auto n = make(NodeKind::Number, t.loc);
      n->number = *q;
      return n;
    }
    auto n = make(NodeKind::Identifier, t.loc);
    n->name = strip_dollar(t.text);
    return n;
  }

  NodePtr shorthand(const Token& t) {
    if (t.value < 1) fail(t.loc, "shorthand lambda needs at least one parameter");
    auto n = make(NodeKind::Shorthand, t.loc);
    n->arity = t.value;
    n->children = {expression()};
    for (long k = 1; k <= t.value; ++k) n->params.push_back({tensor::ParamKind::Tensor, "%" + std::to_string(k)});
    check_placeholders(*n->children[0], t.value);
    return n;
  }

  void check_placeholders(const Node& n, long arity) {
    auto check_name = [&](const std::string& name, SourceLocation loc) {
      if (name.size() < 2 || name[0] != '%') return;
      std::string digits = name.substr(1);
      if (!std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); })) return;
      long k = std::stol(digits);
      if (k < 1 || k > arity)
        fail(loc, "%" + digits + " used in a shorthand lambda of arity " + std::to_string(arity));
    };
    if (n.kind == NodeKind::Shorthand) return;  // inner shorthand has its own placeholders
    if (n.kind == NodeKind::Identifier) check_name(n.name, n.loc);
    for (const auto& s : n.suffixes)
      if (s.label == IndexSuffix::Label::Name) check_name(s.name, n.loc);
    for (const auto& c : n.children) check_placeholders(*c, arity);
  }

  std::vector<std::string> brace_names(const char* what) {
    expect(Tok::LBrace, what);
    std::vector<std::string> names;
    while (peek().kind != Tok::RBrace) {
      const Token& t = next();
      if (t.kind != Tok::Atom || parse_number(t.text)) fail(t.loc, std::string("expected a symbol in ") + what);
      names.push_back(strip_dollar(t.text));
    }
    next();
    return names;
  }

  std::vector<Param> params() {
    expect(Tok::LBracket, "`[` before lambda parameters");
    std::vector<Param> out;
    while (peek().kind != Tok::RBracket) {
      const Token& t = next();
      if (t.kind != Tok::Atom) fail(t.loc, "expected a parameter");
      const std::string& s = t.text;
      Param p;
      if (s.rfind("*$", 0) == 0) {
        p = {tensor::ParamKind::InvertedScalar, s.substr(2)};
      } else if (s[0] == '$') {
        p = {tensor::ParamKind::Scalar, s.substr(1)};
      } else if (s[0] == '%') {
        p = {tensor::ParamKind::Tensor, s.substr(1)};
      } else {
        fail(t.loc, "parameter `" + s + "` needs a `$`, `%` or `*$` marker");
      }
      if (p.name.empty()) fail(t.loc, "parameter marker without a name");
      out.push_back(std::move(p));
    }
    next();
    return out;
  }

  void close(SourceLocation open) {
    if (peek().kind != Tok::RParen) {
      if (peek().kind == Tok::End) fail(open, "unbalanced `(`");
      fail(peek().loc, "expected `)`");
    }
    next();
  }

  NodePtr form(const Token& open) {
    SourceLocation loc = open.loc;
    if (peek().kind == Tok::RParen) fail(loc, "empty application");
    if (peek().kind == Tok::Atom) {
      const std::string head = peek().text;
      auto special = [&](NodeKind k) {
        next();
        return make(k, loc);
      };
      if (head == "lambda") {
        auto n = special(NodeKind::Lambda);
        n->params = params();
        n->children = {expression()};
        close(loc);
        return n;
      }
      if (head == "define") {
        auto n = special(NodeKind::Define);
        const Token& name = expect(Tok::Atom, "a name after define");
        n->name = strip_dollar(name.text);
        while (peek().kind == Tok::Suffix) n->suffixes.push_back(next().suffix);
        for (const auto& s : n->suffixes)
          if (s.label != IndexSuffix::Label::Marker && s.label != IndexSuffix::Label::Name)
            fail(name.loc, "define indices must be symbols or signature markers");
        n->children = {expression()};
        close(loc);
        return n;
      }
      if (head == "with-symbols") {
        auto n = special(NodeKind::WithSymbols);
        n->names = brace_names("with-symbols");
        n->children = {expression()};
        close(loc);
        return n;
      }
      if (head == "transpose") {
        auto n = special(NodeKind::Transpose);
        n->names = brace_names("transpose");
        n->children = {expression()};
        close(loc);
        return n;
      }
      if (head == "generate-tensor") {
        auto n = special(NodeKind::GenerateTensor);
        n->children.push_back(expression());
        expect(Tok::LBrace, "`{` with the tensor shape");
        while (peek().kind != Tok::RBrace) {
          if (peek().kind == Tok::End) fail(loc, "unterminated shape");
          n->children.push_back(expression());
        }
        next();
        close(loc);
        return n;
      }
      static const std::pair<const char*, std::pair<NodeKind, std::size_t>> fixed[] = {
          {"if", {NodeKind::If, 3}},
          {"contract", {NodeKind::Contract, 2}},
          {"tensor-map", {NodeKind::TensorMap, 2}},
          {"flip-indices", {NodeKind::FlipIndices, 1}},
          {"quote", {NodeKind::Quote, 1}},
      };
      for (const auto& [word, spec] : fixed) {
        if (head != word) continue;
        auto n = special(spec.first);
        for (std::size_t i = 0; i < spec.second; ++i) {
          if (peek().kind == Tok::RParen || peek().kind == Tok::End)
            fail(loc, std::string("`") + word + "` takes " + std::to_string(spec.second) + " operands");
          n->children.push_back(expression());
        }
        close(loc);
        return n;
      }
    }
    auto n = make(NodeKind::Apply, loc);
    while (peek().kind != Tok::RParen) {
      if (peek().kind == Tok::End) fail(loc, "unbalanced `(`");
      n->children.push_back(expression());
    }
    next();
    return n;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<NodePtr> parse(std::string_view source) {
  return Parser(Lexer(source).run()).program();
}

}  // namespace indexlang::lang
