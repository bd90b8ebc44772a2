#pragma once

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <string_view>
#include <complex>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>

#include "vstar/triangular_field.hpp"

namespace vstar {

// Grammar (no implicit multiplication, case-sensitive):
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-' unary | power
//   power  := primary ('^' unary)?          (right-assoc, binds above unary -)
//   primary:= number | name | name '(' expr ')' | '(' expr ')'
// Names: "t", "tp" are the kernel variables; "i" is the imaginary unit in
// complex mode and an ordinary parameter name in real mode.

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { Number, Imaginary, Name, Unary, Binary, Call };
  Kind kind;
  double number = 0.0;     // Number
  std::string name;        // Name (parameter / variable), Call (function)
  char op = 0;             // Binary: + - * / ^ ; Unary: -
  ExprPtr lhs, rhs;        // Binary. Unary/Call use lhs only.
};

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(const std::string& msg, size_t offset)
      : std::runtime_error(msg + " at offset " + std::to_string(offset)),
        offset_(offset) {}
  size_t offset() const { return offset_; }

 private:
  size_t offset_;
};

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

class Parser {
 public:
  Parser(std::string_view src, bool complex_mode)
      : src_(src), complex_(complex_mode) {} // owning copy: strtod needs NUL

  ExprPtr parse() {
    auto e = parse_expr();
    skip_ws();
    if (pos_ != src_.size())
      throw SyntaxError("unexpected trailing input", pos_);
    return e;
  }

 private:
  std::string src_;
  size_t pos_ = 0;
  bool complex_;

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
  }
  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }
  bool consume(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  ExprPtr parse_expr() {
    auto e = parse_term();
    for (;;) {
      char c = peek();
      if (c != '+' && c != '-') return e;
      ++pos_;
      auto rhs = parse_term();
      e = make_binary(c, e, rhs);
    }
  }

  ExprPtr parse_term() {
    auto e = parse_unary();
    for (;;) {
      char c = peek();
      if (c != '*' && c != '/') return e;
      ++pos_;
      auto rhs = parse_unary();
      e = make_binary(c, e, rhs);
    }
  }

  ExprPtr parse_unary() {
    if (consume('-')) {
      auto n = std::make_shared<Expr>();
      n->kind = Expr::Kind::Unary;
      n->op = '-';
      n->lhs = parse_unary();
      return n;
    }
    return parse_power();
  }

  ExprPtr parse_power() {
    auto base = parse_primary();
    if (consume('^')) {
      auto exp = parse_unary(); // right-assoc; also allows 2^-3
      return make_binary('^', base, exp);
    }
    return base;
  }

  ExprPtr parse_primary() {
    char c = peek();
    if (c == '(') {
      ++pos_;
      auto e = parse_expr();
      if (!consume(')')) throw SyntaxError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
      return parse_name();
    throw SyntaxError(
        "expected a number, name, '(' or unary '-'", pos_);
  }

  ExprPtr parse_number() {
    size_t start = pos_;
    const char* begin = src_.data() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) throw SyntaxError("invalid number", start);
    pos_ += static_cast<size_t>(end - begin);
    auto n = std::make_shared<Expr>();
    n->kind = Expr::Kind::Number;
    n->number = v;
    return n;
  }

  ExprPtr parse_name() {
    size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
            src_[pos_] == '_'))
      ++pos_;
    std::string name(src_.substr(start, pos_ - start));
    if (peek() == '(') {
      static const char* funcs[] = {"sin", "cos", "exp", "sqrt"};
      bool known = false;
      for (auto* f : funcs) known = known || name == f;
      if (!known)
        throw SyntaxError("unknown function '" + name + "'", start);
      ++pos_; // '('
      auto arg = parse_expr();
      if (!consume(')')) throw SyntaxError("expected ')'", pos_);
      auto n = std::make_shared<Expr>();
      n->kind = Expr::Kind::Call;
      n->name = std::move(name);
      n->lhs = arg;
      return n;
    }
    auto n = std::make_shared<Expr>();
    if (complex_ && name == "i") {
      n->kind = Expr::Kind::Imaginary;
    } else {
      n->kind = Expr::Kind::Name;
      n->name = std::move(name);
    }
    return n;
  }

  static ExprPtr make_binary(char op, ExprPtr l, ExprPtr r) {
    auto n = std::make_shared<Expr>();
    n->kind = Expr::Kind::Binary;
    n->op = op;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
  }
};

} // namespace detail

inline ExprPtr parse_expr(std::string_view src, bool complex_mode) {
  return detail::Parser(src, complex_mode).parse();
}

/// Fully parenthesized rendering; parse(print(e)) is structurally identical
/// to e.
inline std::string print_expr(const ExprPtr& e) {
  switch (e->kind) {
    case Expr::Kind::Number: {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", e->number);
      return buf;
    }
    case Expr::Kind::Imaginary:
      return "i";
    case Expr::Kind::Name:
      return e->name;
    case Expr::Kind::Unary:
      return "(-" + print_expr(e->lhs) + ")";
    case Expr::Kind::Binary:
      return "(" + print_expr(e->lhs) + e->op + print_expr(e->rhs) + ")";
    case Expr::Kind::Call:
      return e->name + "(" + print_expr(e->lhs) + ")";
  }
  throw std::logic_error("print_expr: bad kind");
}

template <class S>
struct Bindings {
  std::map<std::string, S> values; // parameters plus optional "t", "tp"
};

template <class S>
S eval_expr(const ExprPtr& e, const Bindings<S>& env) {
  switch (e->kind) {
    case Expr::Kind::Number:
      return S(e->number);
    case Expr::Kind::Imaginary:
      if constexpr (is_complex_v<S>)
        return S(0, 1);
      else
        throw EvalError("imaginary unit in a real-field expression");
    case Expr::Kind::Name: {
      auto it = env.values.find(e->name);
      if (it == env.values.end())
        throw EvalError("unbound name '" + e->name + "'");
      return it->second;
    }
    case Expr::Kind::Unary:
      return -eval_expr(e->lhs, env);
    case Expr::Kind::Binary: {
      S a = eval_expr(e->lhs, env);
      S b = eval_expr(e->rhs, env);
      switch (e->op) {
        case '+': return a + b;
        case '-': return a - b;
        case '*': return a * b;
        case '/':
          if (b == S(0))
            throw EvalError("division by zero in '" + print_expr(e) + "'");
          return a / b;
        case '^':
          if constexpr (is_complex_v<S>)
            return std::pow(a, b);
          else {
            double r = std::pow(a, b);
            if (!std::isfinite(r))
              throw EvalError("non-finite power in '" + print_expr(e) + "'");
            return r;
          }
      }
      throw std::logic_error("eval_expr: bad operator");
    }
    case Expr::Kind::Call: {
      S a = eval_expr(e->lhs, env);
      if (e->name == "sin") return std::sin(a);
      if (e->name == "cos") return std::cos(a);
      if (e->name == "exp") return std::exp(a);
      if (e->name == "sqrt") {
        if constexpr (!is_complex_v<S>)
          if (a < S(0))
            throw EvalError("sqrt of a negative value in '" + print_expr(e) +
                            "'");
        return std::sqrt(a);
      }
      throw std::logic_error("eval_expr: bad function");
    }
  }
  throw std::logic_error("eval_expr: bad kind");
}

/// Free names of an expression (excluding function names).
inline void collect_names(const ExprPtr& e, std::map<std::string, int>& out) {
  switch (e->kind) {
    case Expr::Kind::Name:
      out[e->name]++;
      return;
    case Expr::Kind::Unary:
    case Expr::Kind::Call:
      collect_names(e->lhs, out);
      return;
    case Expr::Kind::Binary:
      collect_names(e->lhs, out);
      collect_names(e->rhs, out);
      return;
    default:
      return;
  }
}

} // namespace vstar
