#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "abnormal/errors.hpp"
#include "abnormal/expr.hpp"

namespace abnormal {

Expr Expr::constant(double c) {
  auto n = std::make_shared<Node>();
  n->op = Op::kConst;
  n->value = c;
  return Expr(n);
}

Expr Expr::variable(int index) {
  auto n = std::make_shared<Node>();
  n->op = Op::kVar;
  n->index = index;
  return Expr(n);
}

Expr Expr::unary(Op op, Expr a) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = std::move(a);
  return Expr(n);
}

Expr Expr::binary(Op op, Expr a, Expr b) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return Expr(n);
}

Expr Expr::power(Expr a, int k) {
  if (k < 0) throw EvalError("negative integer exponent");
  auto n = std::make_shared<Node>();
  n->op = Op::kPow;
  n->index = k;
  n->lhs = std::move(a);
  return Expr(n);
}

int Expr::max_variable() const {
  if (!node_) return -1;
  const Node& n = *node_;
  int m = n.op == Op::kVar ? n.index : -1;
  if (n.lhs.valid()) m = std::max(m, n.lhs.max_variable());
  if (n.rhs.valid()) m = std::max(m, n.rhs.max_variable());
  return m;
}

bool operator==(const Expr& a, const Expr& b) {
  if (!a.valid() || !b.valid()) return a.valid() == b.valid();
  const Node& x = a.node();
  const Node& y = b.node();
  if (x.op != y.op) return false;
  switch (x.op) {
    case Op::kConst:
      return x.value == y.value;
    case Op::kVar:
      return x.index == y.index;
    case Op::kPow:
      return x.index == y.index && x.lhs == y.lhs;
    default:
      return x.lhs == y.lhs && x.rhs == y.rhs;
  }
}

namespace {

class Parser {
 public:
  Parser(const std::string& s, int n) : s_(s), n_(n) {}

  Expr parse() {
    Expr e = expr();
    skip();
    if (pos_ != s_.size()) throw ParseError(std::string("unexpected '") + s_[pos_] + "'", pos_);
    return e;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr expr() {
    Expr e = term();
    for (;;) {
      if (eat('+'))
        e = Expr::binary(Op::kAdd, e, term());
      else if (eat('-'))
        e = Expr::binary(Op::kSub, e, term());
      else
        return e;
    }
  }

  Expr term() {
    Expr e = unary();
    for (;;) {
      if (eat('*'))
        e = Expr::binary(Op::kMul, e, unary());
      else if (eat('/'))
        e = Expr::binary(Op::kDiv, e, unary());
      else
        return e;
    }
  }

  Expr unary() {
    if (eat('-')) return Expr::unary(Op::kNeg, unary());
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (!eat('^')) return base;
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) throw ParseError("expected non-negative integer exponent", start);
    if (pos_ - start > 4) throw ParseError("exponent too large", start);
    return Expr::power(base, std::atoi(s_.substr(start, pos_ - start).c_str()));
  }

  Expr primary() {
    skip();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return ident();
    if (eat('(')) {
      Expr e = expr();
      if (!eat(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  Expr number() {
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) throw ParseError("malformed number", pos_);
    pos_ += static_cast<std::size_t>(end - begin);
    return Expr::constant(v);
  }

  Expr ident() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    std::string id = s_.substr(start, pos_ - start);
    if (id.size() > 1 && id[0] == 'x' && id.find_first_not_of("0123456789", 1) == std::string::npos) {
      long k = std::strtol(id.c_str() + 1, nullptr, 10);
      if (k < 1 || k > n_)
        throw ParseError("variable " + id + " outside dimension " + std::to_string(n_), start);
      return Expr::variable(static_cast<int>(k - 1));
    }
    Op op;
    if (id == "sin")
      op = Op::kSin;
    else if (id == "cos")
      op = Op::kCos;
    else if (id == "exp")
      op = Op::kExp;
    else if (id == "sqrt")
      op = Op::kSqrt;
    else
      throw ParseError("unknown identifier '" + id + "'", start);
    if (!eat('(')) throw ParseError("expected '(' after " + id, pos_);
    Expr arg = expr();
    if (!eat(')')) throw ParseError("expected ')'", pos_);
    return Expr::unary(op, arg);
  }

  const std::string& s_;
  int n_;
  std::size_t pos_ = 0;
};

const char* func_name(Op op) {
  switch (op) {
    case Op::kSin: return "sin";
    case Op::kCos: return "cos";
    case Op::kExp: return "exp";
    default: return "sqrt";
  }
}

char bin_char(Op op) {
  switch (op) {
    case Op::kAdd: return '+';
    case Op::kSub: return '-';
    case Op::kMul: return '*';
    default: return '/';
  }
}

}  // namespace

Expr parse_expr(const std::string& text, int n) { return Parser(text, n).parse(); }

std::string to_string(const Expr& e) {
  const Node& n = e.node();
  switch (n.op) {
    case Op::kConst: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      return n.value < 0 ? std::string("(") + buf + ")" : std::string(buf);
    }
    case Op::kVar:
      return "x" + std::to_string(n.index + 1);
    case Op::kNeg:
      return "(-" + to_string(n.lhs) + ")";
    case Op::kPow:
      return "(" + to_string(n.lhs) + "^" + std::to_string(n.index) + ")";
    case Op::kSin:
    case Op::kCos:
    case Op::kExp:
    case Op::kSqrt:
      return std::string(func_name(n.op)) + "(" + to_string(n.lhs) + ")";
    default:
      return "(" + to_string(n.lhs) + bin_char(n.op) + to_string(n.rhs) + ")";
  }
}

VectorFieldExpr parse_field(const std::vector<std::string>& text, int n, const std::string& name) {
  if (static_cast<int>(text.size()) != n)
    throw ParseError("dimension mismatch: " + std::to_string(text.size()) + " components for n=" +
                         std::to_string(n),
                     0);
  std::vector<Expr> comps;
  for (const auto& t : text) comps.push_back(parse_expr(t, n));
  return VectorFieldExpr(std::move(comps), name);
}

}  // namespace abnormal
