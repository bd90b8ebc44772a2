#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "vstar/expr.hpp"

using namespace vstar;
using cplx = std::complex<double>;

namespace {

double ev(const std::string& src,
          std::map<std::string, double> vals = {}) {
  Bindings<double> env{std::move(vals)};
  return eval_expr(parse_expr(src, false), env);
}

cplx evc(const std::string& src, std::map<std::string, cplx> vals = {}) {
  Bindings<cplx> env{std::move(vals)};
  return eval_expr(parse_expr(src, true), env);
}

bool same_tree(const ExprPtr& a, const ExprPtr& b) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Expr::Kind::Number:
      return a->number == b->number;
    case Expr::Kind::Imaginary:
      return true;
    case Expr::Kind::Name:
      return a->name == b->name;
    case Expr::Kind::Unary:
      return same_tree(a->lhs, b->lhs);
    case Expr::Kind::Binary:
      return a->op == b->op && same_tree(a->lhs, b->lhs) &&
             same_tree(a->rhs, b->rhs);
    case Expr::Kind::Call:
      return a->name == b->name && same_tree(a->lhs, b->lhs);
  }
  return false;
}

// ---- independent shunting-yard evaluator (reference oracle) ----

struct Tok {
  enum Kind { Num, Name, Op, LP, RP, Fun } kind;
  double num = 0;
  std::string name;
  char op = 0;
};

std::vector<Tok> tokenize(const std::string& s) {
  std::vector<Tok> out;
  size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace((unsigned char)c)) {
      ++i;
    } else if (std::isdigit((unsigned char)c) || c == '.') {
      char* end;
      double v = std::strtod(s.c_str() + i, &end);
      i = end - s.c_str();
      out.push_back({Tok::Num, v});
    } else if (std::isalpha((unsigned char)c) || c == '_') {
      size_t j = i;
      while (j < s.size() && (std::isalnum((unsigned char)s[j]) || s[j] == '_'))
        ++j;
      std::string name = s.substr(i, j - i);
      i = j;
      size_t k = i;
      while (k < s.size() && std::isspace((unsigned char)s[k])) ++k;
      if (k < s.size() && s[k] == '(')
        out.push_back({Tok::Fun, 0, name});
      else
        out.push_back({Tok::Name, 0, name});
    } else if (c == '(') {
      out.push_back({Tok::LP});
      ++i;
    } else if (c == ')') {
      out.push_back({Tok::RP});
      ++i;
    } else {
      out.push_back({Tok::Op, 0, "", c});
      ++i;
    }
  }
  return out;
}

// precedence: ^ 4 (right), unary- 3 (right), * / 2, + - 1
double shunting_yard(const std::string& src,
                     const std::map<std::string, double>& vals) {
  auto toks = tokenize(src);
  std::vector<Tok> ops, rpn;
  bool expect_operand = true;
  auto prec = [](const Tok& t) {
    if (t.kind == Tok::Fun) return 9;
    switch (t.op) {
      case '^': return 4;
      case 'u': return 3;
      case '*':
      case '/': return 2;
      default: return 1;
    }
  };
  auto right_assoc = [](const Tok& t) {
    return t.kind == Tok::Op && (t.op == '^' || t.op == 'u');
  };
  for (auto t : toks) {
    switch (t.kind) {
      case Tok::Num:
      case Tok::Name:
        rpn.push_back(t);
        expect_operand = false;
        break;
      case Tok::Fun:
      case Tok::LP:
        ops.push_back(t);
        expect_operand = true;
        break;
      case Tok::RP:
        while (!ops.empty() && ops.back().kind != Tok::LP)
          rpn.push_back(ops.back()), ops.pop_back();
        ops.pop_back(); // the '('
        if (!ops.empty() && ops.back().kind == Tok::Fun)
          rpn.push_back(ops.back()), ops.pop_back();
        expect_operand = false;
        break;
      case Tok::Op: {
        if (t.op == '-' && expect_operand) t.op = 'u';
        while (!ops.empty() && ops.back().kind == Tok::Op &&
               (prec(ops.back()) > prec(t) ||
                (prec(ops.back()) == prec(t) && !right_assoc(t))))
          rpn.push_back(ops.back()), ops.pop_back();
        ops.push_back(t);
        expect_operand = true;
        break;
      }
    }
  }
  while (!ops.empty()) rpn.push_back(ops.back()), ops.pop_back();

  std::vector<double> st;
  for (const auto& t : rpn) {
    if (t.kind == Tok::Num) {
      st.push_back(t.num);
    } else if (t.kind == Tok::Name) {
      st.push_back(vals.at(t.name));
    } else if (t.kind == Tok::Fun) {
      double a = st.back();
      st.pop_back();
      if (t.name == "sin") st.push_back(std::sin(a));
      else if (t.name == "cos") st.push_back(std::cos(a));
      else if (t.name == "exp") st.push_back(std::exp(a));
      else st.push_back(std::sqrt(a));
    } else if (t.op == 'u') {
      st.back() = -st.back();
    } else {
      double b = st.back();
      st.pop_back();
      double a = st.back();
      st.pop_back();
      switch (t.op) {
        case '+': st.push_back(a + b); break;
        case '-': st.push_back(a - b); break;
        case '*': st.push_back(a * b); break;
        case '/': st.push_back(a / b); break;
        case '^': st.push_back(std::pow(a, b)); break;
      }
    }
  }
  return st.back();
}

// random expression source strings over variables x, y
std::string random_expr(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, 9);
  std::uniform_real_distribution<double> lit(0.1, 3.0);
  auto num = [&] {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", lit(rng));
    return std::string(buf);
  };
  if (depth <= 0) {
    switch (pick(rng) % 3) {
      case 0: return num();
      case 1: return "x";
      default: return "y";
    }
  }
  switch (pick(rng)) {
    case 0: return random_expr(rng, depth - 1) + "+" + random_expr(rng, depth - 1);
    case 1: return random_expr(rng, depth - 1) + "-" + random_expr(rng, depth - 1);
    case 2: return random_expr(rng, depth - 1) + "*" + random_expr(rng, depth - 1);
    case 3: // keep denominators away from zero
      return random_expr(rng, depth - 1) + "/(" + num() + "+1)";
    case 4: return "-" + random_expr(rng, depth - 1);
    case 5: return "(" + random_expr(rng, depth - 1) + ")";
    case 6: return "sin(" + random_expr(rng, depth - 1) + ")";
    case 7: return "cos(" + random_expr(rng, depth - 1) + ")";
    case 8: return "(" + num() + ")^" + num(); // positive base
    default: return "exp(sin(" + random_expr(rng, depth - 1) + "))";
  }
}

} // namespace

TEST_CASE("precedence") {
  CHECK(ev("2+3*4^2") == 50.0);
  CHECK(ev("(2+3)*4") == 20.0);
  CHECK(ev("-2^2") == -4.0); // unary minus binds looser than ^
  CHECK(ev("2^-2") == 0.25);
  CHECK(ev("2^3^2") == 512.0); // right-assoc
  CHECK(ev("6/3/2") == 1.0);   // left-assoc
  CHECK(ev("t^2/2", {{"t", 1.0}}) == 0.5);
}

TEST_CASE("functions and variables") {
  CHECK(ev("sin(w*t)", {{"w", 1.0}, {"t", M_PI / 2}}) == doctest::Approx(1.0));
  CHECK(ev("exp(t)-1", {{"t", 0.0}}) == 0.0);
  CHECK(ev("3") == 3.0);
  CHECK(ev("sqrt(4)") == 2.0);
}

TEST_CASE("complex mode") {
  auto v = evc("-(i/2)*f1*sin(w*tp)",
               {{"f1", 1.0}, {"w", 1.0}, {"tp", M_PI / 2}});
  CHECK(std::abs(v - cplx(0.0, -0.5)) <= 1e-15);
  CHECK(evc("i*i") == cplx(-1.0, 0.0));
  // in real mode "i" is an ordinary name
  CHECK(ev("i+1", {{"i", 2.0}}) == 3.0);
  CHECK_THROWS_AS(ev("i+1"), EvalError);
}

TEST_CASE("syntax errors carry byte offsets") {
  try {
    parse_expr("2*", false);
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.offset() == 2);
  }
  CHECK_THROWS_AS(parse_expr("(1+2", false), SyntaxError);
  CHECK_THROWS_AS(parse_expr("1 2", false), SyntaxError);
  CHECK_THROWS_AS(parse_expr("foo(1)", false), SyntaxError); // unknown function
  CHECK_THROWS_AS(parse_expr("", false), SyntaxError);
}

TEST_CASE("evaluation errors") {
  CHECK_THROWS_AS(ev("x+1"), EvalError); // unbound
  try {
    ev("1/(x-x)", {{"x", 3.0}});
    FAIL("expected EvalError");
  } catch (const EvalError& e) {
    CHECK(std::string(e.what()).find("division by zero") != std::string::npos);
    CHECK(std::string(e.what()).find("x") != std::string::npos); // subexpression
  }
}

TEST_CASE("print/parse round trip") {
  std::mt19937 rng(7);
  for (int it = 0; it < 200; ++it) {
    auto src = random_expr(rng, 3);
    auto tree = parse_expr(src, false);
    auto back = parse_expr(print_expr(tree), false);
    CHECK(same_tree(tree, back));
  }
  auto t = parse_expr("-(i/2)*f1*sin(w*tp)", true);
  CHECK(same_tree(t, parse_expr(print_expr(t), true)));
}

TEST_CASE("agreement with shunting-yard oracle on random expressions") {
  std::mt19937 rng(20260826);
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  int checked = 0;
  for (int it = 0; it < 100; ++it) {
    auto src = random_expr(rng, 4);
    std::map<std::string, double> vals{{"x", val(rng)}, {"y", val(rng)}};
    double a = ev(src, vals);
    double b = shunting_yard(src, vals);
    CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)));
    ++checked;
  }
  CHECK(checked == 100);
}

TEST_CASE("collect_names") {
  std::map<std::string, int> names;
  collect_names(parse_expr("a*sin(w*tp)+t", false), names);
  CHECK(names.size() == 4);
  CHECK(names.count("a") == 1);
  CHECK(names.count("w") == 1);
  CHECK(names.count("tp") == 1);
  CHECK(names.count("t") == 1);
  CHECK(names.count("sin") == 0);
}
