#pragma once

// Recursive-descent parser for the expression grammar:
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?
//   primary := number | ident | ident '(' expr ')' | '(' expr ')'
//
// The syntax tree is shared by the exact canonicalizer (symexpr) and the
// floating-point evaluator used for initial data.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace clawkit::syntax {

enum class NodeKind { Number, Decimal, Ident, Add, Sub, Mul, Div, Pow, Neg, Call };

struct Node {
  NodeKind kind = NodeKind::Number;
  std::string text;  // literal, identifier or function name
  std::size_t offset = 0;
  std::vector<Node> children;
};

struct ParseOptions {
  bool allow_decimals = false;
};

/// Throws ParseError with the byte offset of the first offending character.
Node parse_tree(std::string_view text, ParseOptions opts = {});

}  // namespace clawkit::syntax
