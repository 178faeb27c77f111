#include <cmath>

#include "abnormal/boundary.hpp"
#include "abnormal/errors.hpp"

namespace abnormal {

double calibrate_coefficient(const QuadraticFormData& q, const Eigen::VectorXd& v) {
  if (!q.has_hessian) throw NumericalError("calibration needs the Hessian");
  if (q.dE.rows() != 3) throw ConfigError("coefficient calibration is only defined for n = 3");
  Eigen::VectorXd x = q.x1_profile * v;
  const int K = static_cast<int>(x.size()) - 1;
  const double dt = q.fine_times[1] - q.fine_times[0];
  Eigen::VectorXd d(K + 1);
  for (int k = 1; k < K; ++k) d[k] = (x[k + 1] - x[k - 1]) / (2 * dt);
  d[0] = (-3 * x[0] + 4 * x[1] - x[2]) / (2 * dt);
  d[K] = (3 * x[K] - 4 * x[K - 1] + x[K - 2]) / (2 * dt);
  double denom = q.weights.dot(d.cwiseProduct(d));
  if (!(denom > 0)) throw NumericalError("calibration direction has no x1 motion");
  return 0.5 * v.dot(q.Q * v) / denom;
}

Eigen::VectorXd contact_minimizer(const QuadraticFormData& q) {
  if (!q.has_hessian) throw NumericalError("contact coefficient needs the Hessian");
  Eigen::MatrixXd Z = kernel_basis(restriction_rows(q, RestrictionMode::kFree));
  Eigen::MatrixXd Qz = Z.transpose() * q.Q * Z;
  Qz = 0.5 * (Qz + Qz.transpose());
  Eigen::VectorXd a = Z.transpose() * q.coords.row(0).transpose();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(Qz);
  if (!lu.isInvertible()) throw NumericalError("Hessian singular on the FREE kernel");
  Eigen::VectorXd y = lu.solve(a);
  double g = a.dot(y);
  if (g == 0.0) throw NumericalError("x1 displacement unreachable in the FREE kernel");
  return Z * (y / g);
}

double direct_contact_coefficient(const QuadraticFormData& q) {
  Eigen::VectorXd v = contact_minimizer(q);
  return 0.5 * v.dot(q.Q * v);
}

}  // namespace abnormal
