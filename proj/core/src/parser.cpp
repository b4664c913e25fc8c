#include "clawkit/parser.hpp"

#include <cctype>

#include "clawkit/error.hpp"

namespace clawkit::syntax {
namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '\'' || c == '_';
}

class Parser {
 public:
  Parser(std::string_view text, ParseOptions opts) : src_(text), opts_(opts) {}

  Node run() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("empty expression", pos_);
    Node n = expr();
    skip_ws();
    if (pos_ < src_.size()) throw ParseError(std::string("unexpected '") + src_[pos_] + "'", pos_);
    return n;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static Node binary(NodeKind k, std::size_t off, Node lhs, Node rhs) {
    Node n{k, {}, off, {}};
    n.children.push_back(std::move(lhs));
    n.children.push_back(std::move(rhs));
    return n;
  }

  Node expr() {
    Node lhs = term();
    for (;;) {
      skip_ws();
      std::size_t off = pos_;
      if (accept('+')) {
        lhs = binary(NodeKind::Add, off, std::move(lhs), term());
      } else if (accept('-')) {
        lhs = binary(NodeKind::Sub, off, std::move(lhs), term());
      } else {
        return lhs;
      }
    }
  }

  Node term() {
    Node lhs = unary();
    for (;;) {
      skip_ws();
      std::size_t off = pos_;
      if (accept('*')) {
        lhs = binary(NodeKind::Mul, off, std::move(lhs), unary());
      } else if (accept('/')) {
        lhs = binary(NodeKind::Div, off, std::move(lhs), unary());
      } else {
        return lhs;
      }
    }
  }

  Node unary() {
    skip_ws();
    std::size_t off = pos_;
    if (accept('-')) {
      Node n{NodeKind::Neg, {}, off, {}};
      n.children.push_back(unary());
      return n;
    }
    if (accept('+')) return unary();
    return power();
  }

  Node power() {
    Node base = primary();
    skip_ws();
    std::size_t off = pos_;
    if (accept('^')) return binary(NodeKind::Pow, off, std::move(base), unary());
    return base;
  }

  Node primary() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
    std::size_t off = pos_;
    char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (is_ident_start(c)) {
      while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
      std::string name(src_.substr(off, pos_ - off));
      if (accept('(')) {
        Node call{NodeKind::Call, name, off, {}};
        call.children.push_back(expr());
        if (!accept(')')) throw ParseError("expected ')'", pos_);
        return call;
      }
      return Node{NodeKind::Ident, name, off, {}};
    }
    if (accept('(')) {
      Node inner = expr();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return inner;
    }
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  Node number() {
    std::size_t off = pos_;
    bool decimal = false;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      decimal = true;
      ++pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_;
      std::size_t p = pos_ + 1;
      if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
      if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
        decimal = true;
        pos_ = p;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    std::string lit(src_.substr(off, pos_ - off));
    if (lit == ".") throw ParseError("malformed number", off);
    if (decimal && !opts_.allow_decimals) {
      throw ParseError("floating-point literal \"" + lit + "\" not allowed in exact expressions", off);
    }
    return Node{decimal ? NodeKind::Decimal : NodeKind::Number, lit, off, {}};
  }

  std::string_view src_;
  ParseOptions opts_;
  std::size_t pos_ = 0;
};

}  // namespace

Node parse_tree(std::string_view text, ParseOptions opts) { return Parser(text, opts).run(); }

}  // namespace clawkit::syntax
