#include "skcone/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

namespace skcone {

namespace {

constexpr double kSingularThreshold = 1e-300;

NodePtr make_binary(NodeKind kind, NodePtr lhs, NodePtr rhs, std::size_t offset) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  n->offset = offset;
  return n;
}

bool is_literal_zero(const Node& n) {
  switch (n.kind) {
    case NodeKind::Literal:
      return n.value == cplx(0.0, 0.0);
    case NodeKind::Neg:
      return is_literal_zero(*n.lhs);
    case NodeKind::Pow:
      return n.exponent > 0 && is_literal_zero(*n.lhs);
    default:
      return false;
  }
}

class Parser {
 public:
  Parser(std::string_view text, int n_vars) : text_(text), n_vars_(n_vars) {}

  NodePtr parse() {
    auto root = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return root;
  }

 private:
  NodePtr expr() {
    auto lhs = term();
    for (;;) {
      skip_ws();
      if (pos_ >= text_.size()) return lhs;
      const char c = text_[pos_];
      if (c != '+' && c != '-') return lhs;
      const auto at = pos_++;
      lhs = make_binary(c == '+' ? NodeKind::Add : NodeKind::Sub, lhs, term(), at);
    }
  }

  NodePtr term() {
    auto lhs = factor();
    for (;;) {
      skip_ws();
      if (pos_ >= text_.size()) return lhs;
      const char c = text_[pos_];
      if (c != '*' && c != '/') return lhs;
      const auto at = pos_++;
      auto rhs = factor();
      if (c == '/' && is_literal_zero(*rhs)) {
        throw ParseError(ParseError::Kind::ZeroDenominator, at, "division by literal zero");
      }
      lhs = make_binary(c == '*' ? NodeKind::Mul : NodeKind::Div, lhs, rhs, at);
    }
  }

  NodePtr factor() {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '-') {
      auto n = std::make_shared<Node>();
      n->kind = NodeKind::Neg;
      n->offset = pos_++;
      n->lhs = factor();
      return n;
    }
    auto base = atom();
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '^') {
      auto n = std::make_shared<Node>();
      n->kind = NodeKind::Pow;
      n->offset = pos_++;
      n->lhs = base;
      n->exponent = integer();
      return n;
    }
    return base;
  }

  NodePtr atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      auto inner = expr();
      skip_ws();
      if (pos_ >= text_.size() || text_[pos_] != ')') fail("expected ')'");
      ++pos_;
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const auto start = pos_;
    auto digits = [&] {
      std::size_t count = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
        ++count;
      }
      return count;
    };
    std::size_t mantissa = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) fail_at(start, "malformed number");
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) fail_at(start, "malformed exponent in number");
    }
    double v = 0.0;
    const auto* first = text_.data() + start;
    const auto* last = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) fail_at(start, "malformed number");
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Literal;
    n->value = cplx(v, 0.0);
    n->offset = start;
    return n;
  }

  NodePtr identifier() {
    const auto start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const auto name = text_.substr(start, pos_ - start);
    auto n = std::make_shared<Node>();
    n->offset = start;
    if (name == "i") {
      n->kind = NodeKind::Literal;
      n->value = cplx(0.0, 1.0);
      return n;
    }
    const bool canonical_var =
        name.size() >= 2 && name[0] == 'z' &&
        name.find_first_not_of("0123456789", 1) == std::string_view::npos &&
        (name.size() == 2 || name[1] != '0');
    if (!canonical_var) {
      throw ParseError(ParseError::Kind::UnknownVariable, start,
                       "unknown variable '" + std::string(name) + "'");
    }
    long long index = 0;
    auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), index);
    if (ec != std::errc() || index >= n_vars_) {
      throw ParseError(ParseError::Kind::VariableOutOfRange, start,
                       "variable '" + std::string(name) + "' out of range for n_vars = " +
                           std::to_string(n_vars_));
    }
    n->kind = NodeKind::Variable;
    n->index = static_cast<int>(index);
    return n;
  }

  int integer() {
    skip_ws();
    const auto start = pos_;
    if (pos_ < text_.size() && text_[pos_] == '-') ++pos_;
    const auto digits_start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == digits_start) fail_at(start, "expected integer exponent");
    int v = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc()) fail_at(start, "exponent out of range");
    return v;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) { fail_at(pos_, what); }
  [[noreturn]] void fail_at(std::size_t at, const std::string& what) {
    throw ParseError(ParseError::Kind::Syntax, at, "syntax error: " + what);
  }

  std::string_view text_;
  int n_vars_;
  std::size_t pos_ = 0;
};

bool same_tree(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case NodeKind::Literal:
      return a.value == b.value;
    case NodeKind::Variable:
      return a.index == b.index;
    case NodeKind::Pow:
      return a.exponent == b.exponent && same_tree(*a.lhs, *b.lhs);
    case NodeKind::Neg:
      return same_tree(*a.lhs, *b.lhs);
    default:
      return same_tree(*a.lhs, *b.lhs) && same_tree(*a.rhs, *b.rhs);
  }
}

int precedence(NodeKind k) {
  switch (k) {
    case NodeKind::Add:
    case NodeKind::Sub:
      return 1;
    case NodeKind::Mul:
    case NodeKind::Div:
      return 2;
    case NodeKind::Neg:
      return 3;
    case NodeKind::Pow:
      return 4;
    default:
      return 5;
  }
}

std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string format_literal(cplx v) {
  if (v.imag() == 0.0 && v.real() >= 0.0) return format_real(v.real());
  if (v.real() == 0.0 && v.imag() == 1.0) return "i";
  // Not produced by the parser; rendered as an expression that evaluates to v.
  return "(" + format_real(v.real()) + "+" + format_real(v.imag()) + "*i)";
}

void print(const Node& n, std::string& out);

void print_child(const Node& child, int min_prec, std::string& out) {
  if (precedence(child.kind) < min_prec) {
    out += '(';
    print(child, out);
    out += ')';
  } else {
    print(child, out);
  }
}

void print(const Node& n, std::string& out) {
  const int p = precedence(n.kind);
  switch (n.kind) {
    case NodeKind::Literal:
      out += format_literal(n.value);
      return;
    case NodeKind::Variable:
      out += "z" + std::to_string(n.index);
      return;
    case NodeKind::Neg:
      out += '-';
      print_child(*n.lhs, p, out);
      return;
    case NodeKind::Pow:
      print_child(*n.lhs, 5, out);
      out += '^';
      out += std::to_string(n.exponent);
      return;
    default: {
      static constexpr char ops[] = {'+', '-', '*', '/'};
      print_child(*n.lhs, p, out);
      out += ' ';
      out += ops[static_cast<int>(n.kind)];
      out += ' ';
      print_child(*n.rhs, p + 1, out);
      return;
    }
  }
}

cplx ipow(cplx base, int e, std::size_t offset) {
  if (e < 0) {
    if (std::abs(base) < kSingularThreshold) {
      throw EvalSingularity(offset, "negative power of a vanishing base");
    }
    return 1.0 / ipow(base, -e, offset);
  }
  cplx result(1.0, 0.0);
  while (e > 0) {
    if (e & 1) result *= base;
    base *= base;
    e >>= 1;
  }
  return result;
}

cplx eval_node(const Node& n, std::span<const cplx> z) {
  switch (n.kind) {
    case NodeKind::Literal:
      return n.value;
    case NodeKind::Variable:
      return z[n.index];
    case NodeKind::Neg:
      return -eval_node(*n.lhs, z);
    case NodeKind::Pow:
      return ipow(eval_node(*n.lhs, z), n.exponent, n.offset);
    case NodeKind::Add:
      return eval_node(*n.lhs, z) + eval_node(*n.rhs, z);
    case NodeKind::Sub:
      return eval_node(*n.lhs, z) - eval_node(*n.rhs, z);
    case NodeKind::Mul:
      return eval_node(*n.lhs, z) * eval_node(*n.rhs, z);
    case NodeKind::Div: {
      const cplx den = eval_node(*n.rhs, z);
      if (std::abs(den) < kSingularThreshold) {
        throw EvalSingularity(n.offset, "vanishing denominator");
      }
      return eval_node(*n.lhs, z) / den;
    }
  }
  return {};
}

}  // namespace

PrepotentialAst::PrepotentialAst(NodePtr root, int n_vars) : root_(std::move(root)), n_vars_(n_vars) {
  if (!root_) throw PreconditionError("empty prepotential AST");
  if (n_vars_ < 1) throw PreconditionError("n_vars must be at least 1");
}

bool operator==(const PrepotentialAst& a, const PrepotentialAst& b) {
  return a.n_vars_ == b.n_vars_ && same_tree(*a.root_, *b.root_);
}

PrepotentialAst parse_prepotential(std::string_view text, int n_vars) {
  if (n_vars < 1) throw PreconditionError("n_vars must be at least 1");
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw ParseError(ParseError::Kind::Syntax, 0, "syntax error: empty expression");
  }
  return PrepotentialAst(Parser(text, n_vars).parse(), n_vars);
}

std::string pretty_print(const PrepotentialAst& ast) {
  std::string out;
  print(ast.root(), out);
  return out;
}

cplx evaluate(const PrepotentialAst& ast, std::span<const cplx> z) {
  if (static_cast<int>(z.size()) != ast.n_vars()) {
    throw PreconditionError("point dimension does not match n_vars");
  }
  return eval_node(ast.root(), z);
}

cplx evaluate(const PrepotentialAst& ast, const CVec& z) {
  return evaluate(ast, std::span<const cplx>(z.data(), static_cast<std::size_t>(z.size())));
}

}  // namespace skcone
