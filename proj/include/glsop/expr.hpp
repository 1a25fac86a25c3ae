#ifndef GLSOP_EXPR_HPP
#define GLSOP_EXPR_HPP

#include <cctype>
#include <cmath>
#include <limits>
#include <memory>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

// Small infix expression language for user-supplied kernels and functions:
// variables x1..xm (kernels may also use the outer variable x0), constants,
// + - * / ^, exp, log, abs, min, max.
// Precedence: power > unary minus > * / > + -.  Power is right-associative.

namespace glsop::expr {

struct ParseError : std::runtime_error {
  std::size_t offset;
  ParseError(const std::string& msg, std::size_t off)
      : std::runtime_error(msg + " (at byte " + std::to_string(off) + ")"),
        offset(off) {}
};

enum class NodeKind { constant, variable, add, sub, mul, div, pow, neg, call };

struct Node {
  NodeKind kind;
  double value = 0.0;          // constant
  int var_index = 0;           // variable, 0-based
  std::string func;            // call: exp, log, abs, min, max
  std::vector<std::unique_ptr<Node>> args;
};

using NodePtr = std::unique_ptr<Node>;

class Expression {
 public:
  Expression(NodePtr root, int arity, int min_var, std::string source)
      : root_(std::move(root)), arity_(arity), min_var_(min_var),
        source_(std::move(source)) {}

  int arity() const { return arity_; }
  int min_var() const { return min_var_; }
  const std::string& source() const { return source_; }
  const Node& root() const { return *root_; }

  // Returns NaN on a tagged non-finite evaluation (division by zero,
  // log of a nonpositive argument, 0^negative).
  double eval(std::span<const double> x) const { return eval_node(*root_, x); }

  std::string print() const {
    std::ostringstream os;
    print_node(*root_, os, 0, min_var_);
    return os.str();
  }

  // True when x0 (the outer scaling variable) appears in the tree.
  bool uses_var(int index) const { return uses_var_node(*root_, index); }

  bool structurally_equal(const Expression& other) const {
    return node_equal(*root_, *other.root_);
  }

 private:
  NodePtr root_;
  int arity_;
  int min_var_;
  std::string source_;

  static bool uses_var_node(const Node& n, int index) {
    if (n.kind == NodeKind::variable) return n.var_index == index;
    for (const auto& a : n.args)
      if (uses_var_node(*a, index)) return true;
    return false;
  }

  static double eval_node(const Node& n, std::span<const double> x) {
    switch (n.kind) {
      case NodeKind::constant: return n.value;
      case NodeKind::variable: return x[static_cast<std::size_t>(n.var_index)];
      case NodeKind::add: return eval_node(*n.args[0], x) + eval_node(*n.args[1], x);
      case NodeKind::sub: return eval_node(*n.args[0], x) - eval_node(*n.args[1], x);
      case NodeKind::mul: return eval_node(*n.args[0], x) * eval_node(*n.args[1], x);
      case NodeKind::div: {
        const double b = eval_node(*n.args[1], x);
        if (b == 0.0) return std::numeric_limits<double>::quiet_NaN();
        return eval_node(*n.args[0], x) / b;
      }
      case NodeKind::pow: {
        const double a = eval_node(*n.args[0], x);
        const double b = eval_node(*n.args[1], x);
        if (a == 0.0 && b < 0.0) return std::numeric_limits<double>::quiet_NaN();
        return std::pow(a, b);
      }
      case NodeKind::neg: return -eval_node(*n.args[0], x);
      case NodeKind::call: {
        if (n.func == "exp") return std::exp(eval_node(*n.args[0], x));
        if (n.func == "log") {
          const double a = eval_node(*n.args[0], x);
          if (a <= 0.0) return std::numeric_limits<double>::quiet_NaN();
          return std::log(a);
        }
        if (n.func == "abs") return std::abs(eval_node(*n.args[0], x));
        if (n.func == "min" || n.func == "max") {
          double r = eval_node(*n.args[0], x);
          for (std::size_t i = 1; i < n.args.size(); ++i) {
            const double v = eval_node(*n.args[i], x);
            r = n.func == "min" ? std::min(r, v) : std::max(r, v);
          }
          return r;
        }
        return std::numeric_limits<double>::quiet_NaN();
      }
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

  // Precedence levels: 0 add/sub, 1 mul/div, 2 unary minus, 3 power, 4 atom.
  static void print_node(const Node& n, std::ostringstream& os, int parent_prec,
                         int min_var) {
    auto paren = [&](int prec, auto&& body) {
      if (prec < parent_prec) {
        os << '(';
        body();
        os << ')';
      } else {
        body();
      }
    };
    switch (n.kind) {
      case NodeKind::constant: {
        std::ostringstream tmp;
        tmp.precision(17);
        tmp << n.value;
        os << tmp.str();
        break;
      }
      case NodeKind::variable: os << 'x' << (n.var_index + min_var); break;
      case NodeKind::add:
        paren(0, [&] {
          print_node(*n.args[0], os, 0, min_var);
          os << " + ";
          print_node(*n.args[1], os, 1, min_var);
        });
        break;
      case NodeKind::sub:
        paren(0, [&] {
          print_node(*n.args[0], os, 0, min_var);
          os << " - ";
          print_node(*n.args[1], os, 1, min_var);
        });
        break;
      case NodeKind::mul:
        paren(1, [&] {
          print_node(*n.args[0], os, 1, min_var);
          os << "*";
          print_node(*n.args[1], os, 2, min_var);
        });
        break;
      case NodeKind::div:
        paren(1, [&] {
          print_node(*n.args[0], os, 1, min_var);
          os << "/";
          print_node(*n.args[1], os, 2, min_var);
        });
        break;
      case NodeKind::neg:
        paren(2, [&] {
          os << '-';
          print_node(*n.args[0], os, 2, min_var);
        });
        break;
      case NodeKind::pow:
        paren(3, [&] {
          print_node(*n.args[0], os, 4, min_var);
          os << '^';
          print_node(*n.args[1], os, 3, min_var);
        });
        break;
      case NodeKind::call:
        os << n.func << '(';
        for (std::size_t i = 0; i < n.args.size(); ++i) {
          if (i) os << ", ";
          print_node(*n.args[i], os, 0, min_var);
        }
        os << ')';
        break;
    }
  }

  static bool node_equal(const Node& a, const Node& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
      case NodeKind::constant: return a.value == b.value;
      case NodeKind::variable: return a.var_index == b.var_index;
      case NodeKind::call:
        if (a.func != b.func) return false;
        break;
      default: break;
    }
    if (a.args.size() != b.args.size()) return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
      if (!node_equal(*a.args[i], *b.args[i])) return false;
    return true;
  }
};

namespace detail {

class Parser {
 public:
  Parser(const std::string& text, int arity, int min_var)
      : s_(text), arity_(arity), min_var_(min_var) {}

  NodePtr parse() {
    skip_ws();
    if (pos_ >= s_.size()) throw ParseError("empty expression", pos_);
    NodePtr e = parse_sum();
    skip_ws();
    if (pos_ < s_.size()) throw ParseError("trailing input", pos_);
    return e;
  }

 private:
  const std::string& s_;
  int arity_;
  int min_var_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  bool accept(char c) {
    if (peek(c)) { ++pos_; return true; }
    return false;
  }
  void expect(char c) {
    if (!accept(c))
      throw ParseError(std::string("expected '") + c + "'", pos_);
  }

  NodePtr parse_sum() {
    NodePtr lhs = parse_product();
    while (true) {
      if (accept('+')) {
        lhs = binary(NodeKind::add, std::move(lhs), parse_product());
      } else if (accept('-')) {
        lhs = binary(NodeKind::sub, std::move(lhs), parse_product());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_product() {
    NodePtr lhs = parse_unary();
    while (true) {
      if (accept('*')) {
        lhs = binary(NodeKind::mul, std::move(lhs), parse_unary());
      } else if (accept('/')) {
        lhs = binary(NodeKind::div, std::move(lhs), parse_unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    if (accept('-')) {
      auto n = std::make_unique<Node>();
      n->kind = NodeKind::neg;
      n->args.push_back(parse_unary());
      return n;
    }
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_atom();
    if (accept('^')) {
      // right-associative; exponent may carry a unary minus
      NodePtr exp = accept('-') ? negate(parse_power()) : parse_power();
      return binary(NodeKind::pow, std::move(base), std::move(exp));
    }
    return base;
  }

  NodePtr parse_atom() {
    skip_ws();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_sum();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    std::size_t end = pos_;
    while (end < s_.size() &&
           (std::isdigit(static_cast<unsigned char>(s_[end])) || s_[end] == '.' ||
            s_[end] == 'e' || s_[end] == 'E' ||
            ((s_[end] == '+' || s_[end] == '-') && end > start &&
             (s_[end - 1] == 'e' || s_[end - 1] == 'E'))))
      ++end;
    const std::string tok = s_.substr(start, end - start);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw ParseError("malformed number '" + tok + "'", start);
    }
    if (used != tok.size()) throw ParseError("malformed number '" + tok + "'", start);
    pos_ = end;
    auto n = std::make_unique<Node>();
    n->kind = NodeKind::constant;
    n->value = v;
    return n;
  }

  NodePtr parse_ident() {
    const std::size_t start = pos_;
    std::size_t end = pos_;
    while (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) ||
                               s_[end] == '_'))
      ++end;
    const std::string name = s_.substr(start, end - start);
    pos_ = end;
    if (name == "exp" || name == "log" || name == "abs" || name == "min" ||
        name == "max") {
      expect('(');
      auto n = std::make_unique<Node>();
      n->kind = NodeKind::call;
      n->func = name;
      n->args.push_back(parse_sum());
      while (accept(',')) n->args.push_back(parse_sum());
      expect(')');
      const bool variadic = name == "min" || name == "max";
      if (variadic && n->args.size() < 2)
        throw ParseError(name + " needs at least 2 arguments", start);
      if (!variadic && n->args.size() != 1)
        throw ParseError(name + " takes exactly 1 argument", start);
      return n;
    }
    if (name.size() >= 2 && name[0] == 'x') {
      int idx = 0;
      bool ok = true;
      for (std::size_t i = 1; i < name.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(name[i]))) { ok = false; break; }
        idx = idx * 10 + (name[i] - '0');
      }
      if (ok) {
        if (idx < min_var_ || idx > arity_)
          throw ParseError("unknown identifier " + name +
                               " (arity " + std::to_string(arity_) + ")",
                           start);
        auto n = std::make_unique<Node>();
        n->kind = NodeKind::variable;
        n->var_index = idx - min_var_;
        return n;
      }
    }
    if (name == "pi") {
      auto n = std::make_unique<Node>();
      n->kind = NodeKind::constant;
      n->value = 3.141592653589793;
      return n;
    }
    throw ParseError("unknown identifier " + name, start);
  }

  static NodePtr binary(NodeKind k, NodePtr a, NodePtr b) {
    auto n = std::make_unique<Node>();
    n->kind = k;
    n->args.push_back(std::move(a));
    n->args.push_back(std::move(b));
    return n;
  }
  static NodePtr negate(NodePtr a) {
    auto n = std::make_unique<Node>();
    n->kind = NodeKind::neg;
    n->args.push_back(std::move(a));
    return n;
  }
};

} // namespace detail

// Valid variables are x{min_var}..x{arity}; evaluation spans are indexed
// from min_var (so min_var = 0 expressions read x0 at position 0).
inline Expression parse(const std::string& text, int arity, int min_var = 1) {
  if (arity < min_var) throw std::invalid_argument("expression arity must cover min_var");
  detail::Parser p(text, arity, min_var);
  return Expression(p.parse(), arity, min_var, text);
}

} // namespace glsop::expr

#endif // GLSOP_EXPR_HPP
