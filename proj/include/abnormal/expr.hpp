#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace abnormal {

enum class Op : std::uint8_t { kConst, kVar, kNeg, kAdd, kSub, kMul, kDiv, kPow, kSin, kCos, kExp, kSqrt };

struct Node;

// Immutable expression tree. Variables are 0-based internally, printed as x1..xn.
class Expr {
 public:
  Expr() = default;
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static Expr constant(double c);
  static Expr variable(int index);
  static Expr unary(Op op, Expr a);
  static Expr binary(Op op, Expr a, Expr b);
  static Expr power(Expr a, int k);

  const Node& node() const { return *node_; }
  bool valid() const { return node_ != nullptr; }
  int max_variable() const;  // -1 if none

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  std::shared_ptr<const Node> node_;
};

struct Node {
  Op op = Op::kConst;
  double value = 0.0;  // kConst
  int index = 0;       // kVar: variable, kPow: exponent
  Expr lhs, rhs;
};

Expr parse_expr(const std::string& text, int n);
std::string to_string(const Expr& e);

// Postfix program; register i holds the result of instruction i.
struct Instr {
  Op op;
  int a = -1, b = -1;
  double c = 0.0;
  int k = 0;
  int label = -1;  // division: index into Program::div_labels
};

class Program {
 public:
  Program() = default;
  Program(const std::vector<Expr>& outputs, int n);

  int dimension() const { return n_; }
  int outputs() const { return static_cast<int>(out_.size()); }
  const std::vector<Instr>& code() const { return code_; }
  const std::vector<int>& output_registers() const { return out_; }
  const std::string& div_label(int i) const { return div_labels_[i]; }

  // scratch is resized as needed; pass the same vector across calls to avoid allocation
  void eval(const double* x, double* out, std::vector<double>& scratch) const;
  std::vector<double> eval(const std::vector<double>& x) const;

  // SoA batch: x[v][lane], out[o][lane]; uses the dispatched SIMD kernels
  void eval_batch(const double* const* x, double* const* out, std::size_t lanes,
                  std::vector<double>& scratch) const;

 private:
  int emit(const Expr& e);
  std::vector<Instr> code_;
  std::vector<int> out_;
  std::vector<std::string> div_labels_;
  int n_ = 0;
};

class VectorFieldExpr {
 public:
  VectorFieldExpr() = default;
  VectorFieldExpr(std::vector<Expr> comps, std::string name);

  int dimension() const { return static_cast<int>(comps_.size()); }
  const std::vector<Expr>& components() const { return comps_; }
  const std::string& name() const { return name_; }
  const Program& program() const { return prog_; }

  std::vector<double> eval(const std::vector<double>& x) const { return prog_.eval(x); }
  void eval(const double* x, double* out, std::vector<double>& scratch) const {
    prog_.eval(x, out, scratch);
  }
  std::vector<std::string> to_strings() const;

 private:
  std::vector<Expr> comps_;
  std::string name_;
  Program prog_;
};

VectorFieldExpr parse_field(const std::vector<std::string>& text, int n, const std::string& name = "");

// near-zero divisor rule shared by scalar, batch and jet evaluation
inline bool tiny_divisor(double num, double den) {
  double an = num < 0 ? -num : num, ad = den < 0 ? -den : den;
  return den == 0.0 || ad <= 1e-12 * an;
}

}  // namespace abnormal
