#pragma once

#include <Eigen/Dense>
#include <string>

#include "abnormal/expr.hpp"

namespace abnormal {

// x' = X(x) + u Y(x)
class ControlSystem {
 public:
  ControlSystem() = default;
  ControlSystem(VectorFieldExpr X, VectorFieldExpr Y, std::string name);

  int dimension() const { return X_.dimension(); }
  const VectorFieldExpr& X() const { return X_; }
  const VectorFieldExpr& Y() const { return Y_; }
  const std::string& name() const { return name_; }

  Eigen::VectorXd drift(const Eigen::VectorXd& x) const;
  Eigen::VectorXd input(const Eigen::VectorXd& x) const;
  Eigen::VectorXd rhs(const Eigen::VectorXd& x, double u) const { return drift(x) + u * input(x); }

  // same system with Y scaled by a constant (span-invariance checks)
  ControlSystem with_scaled_input(double s) const;

 private:
  VectorFieldExpr X_, Y_;
  std::string name_;
};

namespace presets {
// orthonormal frame of the metric (1+a y)^2 dx^2 + (1+b x+c y)^2 dy^2 on dz = y^2/2 dx
ControlSystem martinet(double alpha, double beta = 0.0, double gamma = 0.0);
// X = d/dx + y^2/2 d/dz, Y = d/dy
ControlSystem martinet_flat();
// chain normal form: X = d/dx1 + sum x_{i+1} d/dx_i + sum b_ij x_{i+1} x_{j+1} d/dx_n, Y = d/dx_{n-1}
// with n = b.rows() + 2; the intrinsic Hessian is 2 Q1 with these b_ij
ControlSystem normal_form(const Eigen::MatrixXd& b);
ControlSystem const4();                 // n=4, b11=-1, b22=1
ControlSystem chain_n3(double b = 0.5);  // n=3
}  // namespace presets

}  // namespace abnormal
