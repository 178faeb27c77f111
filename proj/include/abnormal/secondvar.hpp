#pragma once

#include <Eigen/Dense>
#include <vector>

#include "abnormal/conjugate.hpp"
#include "abnormal/geometry.hpp"

namespace abnormal {

// Hat functions on `intervals` uniform pieces (intervals+1 of them, half hats at the ends),
// then two impulse elements: a kick along Y at t=0 and one at t=T.
struct ControlBasis {
  double horizon = 1.0;
  int intervals = 64;
  int substeps = 8;  // RK4 steps per control interval, even so Simpson panels align

  int size() const { return intervals + 3; }
  int impulse_start() const { return intervals + 1; }
  int impulse_end() const { return intervals + 2; }
  int fine_steps() const { return intervals * substeps; }
  double hat(int j, double t) const;
  double value(const Eigen::VectorXd& c, double t) const;  // distributed part only
  void values(double t, Eigen::RowVectorXd& out) const;
};

enum class RestrictionMode { kFixed, kFree };
enum class KernelNorm { kGoh, kProfile };
const char* mode_name(RestrictionMode m);

struct QuadraticFormData {
  ControlBasis basis;
  double horizon = 0.0;
  Eigen::MatrixXd dE;      // n x N end-point displacement per basis element
  Eigen::MatrixXd coords;  // n x N in the adapted dual basis: row 0 x1, rows 1..n-2 cone, row n-1 along p(T)
  Eigen::VectorXd p_T;
  bool has_hessian = false;
  Eigen::MatrixXd Q;  // N x N, v -> p(T).d2E(v,v)
  // L2 Gram matrices of coordinate profiles of the linear response
  Eigen::MatrixXd goh_gram;      // coordinate along ad^0 = Y
  Eigen::MatrixXd fixed_gram;    // x1 coordinate
  Eigen::MatrixXd free_gram;     // coordinate along ad^{n-3}
  Eigen::MatrixXd control_mass;  // L2 Gram of the hat part
  Eigen::VectorXd weights;       // Simpson weights on the fine nodes
  std::vector<double> fine_times;
  Eigen::MatrixXd x1_profile;  // fine nodes x N: x1 coordinate of the linear response
};

QuadraticFormData first_variation_matrix(const TrajectoryData& traj, const ControlSystem& sys, int m,
                                         int substeps = 8);
QuadraticFormData hessian_form(const TrajectoryData& traj, const ControlSystem& sys, int m, int substeps = 8);

// [<p,x(hv)> + <p,x(-hv)> - 2<p,x(0)>]/h^2 with the nonlinear system on the same RK4 grid
double fd_oracle(const ControlSystem& sys, const TrajectoryData& traj, const ControlBasis& basis,
                 const Eigen::VectorXd& v, double h);

Eigen::MatrixXd restriction_rows(const QuadraticFormData& q, RestrictionMode mode);
Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& rows, double rel_tol = 1e-10);

struct RestrictedEig {
  double lambda_min = 0.0;
  Eigen::VectorXd vector;  // basis coefficients, unit in the chosen norm
  int kernel_dim = 0;
};
RestrictedEig restricted_smallest_eig(const QuadraticFormData& q, RestrictionMode mode,
                                      KernelNorm norm = KernelNorm::kGoh);

struct SecondVarOptions {
  int intervals = 64;
  int substeps = 8;
  int traj_grid = 16;
  int prescan = 32;
  KernelNorm norm = KernelNorm::kGoh;
  double assumption_tol = 1e-7;
};

double restricted_lambda(const ControlSystem& sys, const Eigen::VectorXd& x0, RestrictionMode mode, double T,
                         const SecondVarOptions& opt = {});
ConjugateTimeResult conjugate_time_search(const ControlSystem& sys, const Eigen::VectorXd& x0, RestrictionMode mode,
                                          double T_max, double tol_T, const SecondVarOptions& opt = {});

}  // namespace abnormal
