#pragma once

#include <memory>
#include <vector>

#include "abnormal/expr.hpp"

namespace abnormal {

// Multi-indices of total degree <= m in graded order, so truncating to m' < m keeps a prefix.
class JetSpace {
 public:
  static std::shared_ptr<const JetSpace> get(int n, int m);

  int vars() const { return n_; }
  int order() const { return m_; }
  int size() const { return static_cast<int>(idx_.size()); }
  const std::vector<int>& multi_index(int k) const { return idx_[k]; }
  int degree(int k) const { return deg_[k]; }
  int find(const std::vector<int>& alpha) const;  // -1 if out of range
  int size_up_to(int m) const { return prefix_[m]; }

  struct Term {
    int a, b, c;
  };
  const std::vector<Term>& products() const { return mul_; }  // sorted by c
  // d/dx_i of basis k: target index in the (n, m-1) space and integer factor
  struct Diff {
    int target;
    double factor;
  };
  const std::vector<Diff>& diff(int i) const { return diff_[i]; }

  JetSpace(int n, int m);

 private:
  int n_, m_;
  std::vector<std::vector<int>> idx_;
  std::vector<int> deg_, prefix_;
  std::vector<Term> mul_;
  std::vector<std::vector<Diff>> diff_;
};

// Truncated Taylor polynomial in the displacement from a base point.
class Jet {
 public:
  Jet() = default;
  Jet(std::shared_ptr<const JetSpace> s, double c0 = 0.0);
  static Jet variable(std::shared_ptr<const JetSpace> s, int i, double base);

  const JetSpace& space() const { return *space_; }
  std::shared_ptr<const JetSpace> space_ptr() const { return space_; }
  int order() const { return space_->order(); }
  double value() const { return c_[0]; }
  double coeff(int k) const { return c_[k]; }
  double& coeff(int k) { return c_[k]; }
  double coeff(const std::vector<int>& alpha) const;
  const std::vector<double>& coeffs() const { return c_; }
  // partial derivative d/dx_i (not a coefficient read-off: includes the multi-index factor)
  double partial(int i) const;

  Jet truncated(int m) const;
  Jet derivative(int i) const;  // order drops by one

  Jet operator-() const;
  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(double s);
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(const Jet& a, const Jet& b);

 private:
  std::shared_ptr<const JetSpace> space_;
  std::vector<double> c_;
};

Jet pow_int(const Jet& a, int k);
Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet exp(const Jet& a);
Jet sqrt(const Jet& a);

std::vector<Jet> eval_jet(const Program& prog, const std::vector<double>& point, int order);
std::vector<Jet> eval_jet(const VectorFieldExpr& field, const std::vector<double>& point, int order);

}  // namespace abnormal
