#include <lapacke.h>

#include "abnormal/boundary.hpp"
#include "abnormal/errors.hpp"

namespace abnormal {

EndData contact_data(const CoefficientField& c, int i) {
  const int r = c.size();
  if (i < 0 || i >= r) throw ConfigError("kernel index out of range");
  EndData d{Eigen::VectorXd::Zero(r), Eigen::VectorXd::Zero(r)};
  d.right[i] = 1.0;
  return d;
}

namespace {

KernelSolution solve_with(const DiscreteForm& form, double T, const EndData& data) {
  BandMatrix K;
  Eigen::VectorXd f;
  double c0 = 0;
  form.quadratic(data, K, f, c0);
  const int n = K.n;
  std::vector<double> ab(K.ab);
  Eigen::VectorXd u = -f;
  lapack_int info = LAPACKE_dpbsv(LAPACK_COL_MAJOR, 'U', n, K.kd, 1, ab.data(), K.kd + 1, u.data(), n);
  if (info != 0)
    throw NumericalError("kernel system not positive definite (horizon at or beyond the D1 conjugate time)");
  KernelSolution s;
  s.horizon = T;
  s.grid = form.grid();
  s.data = data;
  s.J = form.extend(u, data);
  double fn = f.norm();
  s.residual = (K.apply(u) + f).norm() / std::max(fn, 1e-300);
  if (fn == 0.0) s.residual = 0.0;
  s.energy = form.energy(s.J, data);
  return s;
}

}  // namespace

KernelSolution solve_kernel_bvp(const CoefficientField& c, double T, const EndData& data, int grid) {
  c.validate(T);
  if (data.left.size() != c.size() || data.right.size() != c.size())
    throw ConfigError("boundary data needs " + std::to_string(c.size()) + " derivatives per end");
  DiscreteForm form(c, QuadraticKind::kQ1, T, grid);
  return solve_with(form, T, data);
}

double compute_A(const CoefficientField& c, double T, int grid) {
  return solve_kernel_bvp(c, T, contact_data(c, 0), grid).energy;
}

Eigen::MatrixXd gram_matrix(const CoefficientField& c, double T, int grid) {
  c.validate(T);
  DiscreteForm form(c, QuadraticKind::kQ1, T, grid);
  const int r = c.size();
  std::vector<KernelSolution> J;
  for (int i = 0; i < r; ++i) J.push_back(solve_with(form, T, contact_data(c, i)));
  Eigen::MatrixXd A(r, r);
  for (int i = 0; i < r; ++i) {
    A(i, i) = J[i].energy;
    for (int j = 0; j < i; ++j) {
      EndData d{J[i].data.left + J[j].data.left, J[i].data.right + J[j].data.right};
      double e = form.energy(J[i].J + J[j].J, d);
      A(i, j) = A(j, i) = 0.5 * (e - J[i].energy - J[j].energy);
    }
  }
  return A;
}

}  // namespace abnormal
