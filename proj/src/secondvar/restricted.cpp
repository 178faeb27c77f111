#include <Eigen/Eigenvalues>

#include "abnormal/errors.hpp"
#include "abnormal/secondvar.hpp"

namespace abnormal {

Eigen::MatrixXd restriction_rows(const QuadraticFormData& q, RestrictionMode mode) {
  const int n = static_cast<int>(q.coords.rows());
  // FIXED: x1 and all cone coordinates except the one along p; FREE releases x1
  int first = mode == RestrictionMode::kFixed ? 0 : 1;
  return q.coords.middleRows(first, n - 1 - first);
}

Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& rows, double rel_tol) {
  const int N = static_cast<int>(rows.cols());
  if (rows.rows() == 0) return Eigen::MatrixXd::Identity(N, N);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s[i] > rel_tol * s[0]) ++r;
  return svd.matrixV().rightCols(N - r);
}

RestrictedEig restricted_smallest_eig(const QuadraticFormData& q, RestrictionMode mode, KernelNorm norm) {
  if (!q.has_hessian) throw NumericalError("quadratic form data has no Hessian");
  Eigen::MatrixXd Z = kernel_basis(restriction_rows(q, mode));
  if (Z.cols() == 0) throw NumericalError("empty kernel: control grid too small");
  const Eigen::MatrixXd* G = &q.goh_gram;
  if (norm == KernelNorm::kProfile) G = mode == RestrictionMode::kFixed ? &q.fixed_gram : &q.free_gram;
  Eigen::MatrixXd Qz = Z.transpose() * q.Q * Z;
  Eigen::MatrixXd Gz = Z.transpose() * (*G) * Z;
  Qz = 0.5 * (Qz + Qz.transpose());
  Gz = 0.5 * (Gz + Gz.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Qz, Gz);
  if (es.info() != Eigen::Success) throw NumericalError("restricted eigensolve failed (norm not definite on kernel)");
  RestrictedEig r;
  r.lambda_min = es.eigenvalues()[0];
  r.vector = Z * es.eigenvectors().col(0);
  r.kernel_dim = static_cast<int>(Z.cols());
  return r;
}

}  // namespace abnormal
