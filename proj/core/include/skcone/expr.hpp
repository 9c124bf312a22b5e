#pragma once

// Prepotential expression language.
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := atom ('^' integer)? | '-' factor
//   atom   := number | 'i' | variable | '(' expr ')'
//
// Variables are z0, z1, ..., z10, ...; `i` is the imaginary unit. Whitespace
// is ignored and there is no implicit multiplication.

#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "skcone/types.hpp"

namespace skcone {

enum class NodeKind { Add, Sub, Mul, Div, Pow, Neg, Literal, Variable };

struct Node {
  NodeKind kind;
  std::shared_ptr<const Node> lhs;  // also the operand of Neg and the base of Pow
  std::shared_ptr<const Node> rhs;
  cplx value{};       // Literal
  int index = 0;      // Variable
  int exponent = 0;   // Pow
  std::size_t offset = 0;  // byte offset of the node's operator or token
};

using NodePtr = std::shared_ptr<const Node>;

/// Parsed holomorphic function F of `n_vars` complex variables. Immutable.
class PrepotentialAst {
 public:
  PrepotentialAst(NodePtr root, int n_vars);

  const Node& root() const { return *root_; }
  const NodePtr& root_ptr() const { return root_; }
  int n_vars() const { return n_vars_; }

  /// Structural equality; source offsets are ignored.
  friend bool operator==(const PrepotentialAst& a, const PrepotentialAst& b);

 private:
  NodePtr root_;
  int n_vars_;
};

PrepotentialAst parse_prepotential(std::string_view text, int n_vars);

/// Minimal-parenthesis rendering that parses back to the same tree.
std::string pretty_print(const PrepotentialAst& ast);

/// Plain complex evaluation of F(z).
cplx evaluate(const PrepotentialAst& ast, std::span<const cplx> z);
cplx evaluate(const PrepotentialAst& ast, const CVec& z);

}  // namespace skcone
