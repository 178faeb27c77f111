#include <lapacke.h>

#include <cmath>

#include "abnormal/errors.hpp"
#include "abnormal/operators.hpp"

namespace abnormal {

namespace {

// x <- (A - sigma I)^{-1} x repeatedly, A symmetric band in upper storage
Eigen::VectorXd inverse_iteration(const std::vector<double>& ab, int n, int kd, double sigma,
                                  const std::vector<Eigen::VectorXd>& previous) {
  const int ldg = 3 * kd + 1;
  std::vector<double> g(static_cast<std::size_t>(ldg) * n, 0.0);
  auto at = [&](int i, int j) -> double& { return g[static_cast<std::size_t>(2 * kd + i - j) + static_cast<std::size_t>(j) * ldg]; };
  for (int j = 0; j < n; ++j)
    for (int i = std::max(0, j - kd); i <= j; ++i) {
      double v = ab[static_cast<std::size_t>(kd + i - j) + static_cast<std::size_t>(j) * (kd + 1)];
      at(i, j) = v;
      at(j, i) = v;
    }
  double scale = std::max(1.0, std::abs(sigma));
  for (int j = 0; j < n; ++j) at(j, j) -= sigma;
  std::vector<lapack_int> piv(n);
  lapack_int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n, n, kd, kd, g.data(), ldg, piv.data());
  if (info < 0) throw NumericalError("band factorization failed");
  if (info > 0) at(info - 1, info - 1) = 1e-14 * scale;  // exact hit: perturb the zero pivot
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
  for (int i = 0; i < n; ++i) x[i] += 0.01 * std::sin(1.0 + i);
  for (int it = 0; it < 4; ++it) {
    for (const auto& p : previous) x -= p.dot(x) * p;
    x.normalize();
    LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n, kd, kd, 1, g.data(), ldg, piv.data(), x.data(), n);
  }
  for (const auto& p : previous) x -= p.dot(x) * p;
  return x.normalized();
}

}  // namespace

Spectrum spectrum(const OperatorMatrix& op, int k, bool with_profiles) {
  const int n = op.dof();
  if (k < 1 || k > n) throw NumericalError("requested eigenvalue count exceeds degrees of freedom");
  const BandMatrix& K = op.stiffness;
  // standard form M^{-1/2} K M^{-1/2}; M is diagonal
  Eigen::VectorXd s = op.mass.cwiseSqrt().cwiseInverse();
  std::vector<double> ab(K.ab);
  const int ld = K.kd + 1;
  for (int j = 0; j < n; ++j)
    for (int i = std::max(0, j - K.kd); i <= j; ++i)
      ab[static_cast<std::size_t>(K.kd + i - j) + static_cast<std::size_t>(j) * ld] *= s[i] * s[j];
  std::vector<double> work(ab), w(n), z(1);
  std::vector<lapack_int> ifail(n);
  lapack_int found = 0;
  const double abstol = 2 * LAPACKE_dlamch('S');
  lapack_int info = LAPACKE_dsbevx(LAPACK_COL_MAJOR, 'N', 'I', 'U', n, K.kd, work.data(), ld, nullptr, 1, 0.0, 0.0, 1,
                                   k, abstol, &found, w.data(), z.data(), 1, ifail.data());
  if (info != 0 || found != k) throw NumericalError("banded eigensolve failed (info " + std::to_string(info) + ")");
  Spectrum sp;
  std::vector<Eigen::VectorXd> vecs;
  for (int e = 0; e < k; ++e) {
    sp.values.push_back(w[e]);
    if (!with_profiles) continue;
    double gap = 1e-10 * std::max(1.0, std::abs(w[e]));
    Eigen::VectorXd v = inverse_iteration(ab, n, K.kd, w[e] - gap, vecs);
    vecs.push_back(v);
    Eigen::VectorXd prof = Eigen::VectorXd::Zero(op.grid + 1);
    for (int i = 0; i < n; ++i) prof[op.unknown_nodes[i]] = s[i] * v[i];
    double sum = 0;
    for (int i = 0; i < n; ++i) sum += op.mass[i] * prof[op.unknown_nodes[i]];
    if (sum < 0) prof = -prof;
    sp.profiles.push_back(prof);
  }
  return sp;
}

ConjugateTimeResult operator_conjugate_time(const CoefficientField& c, OperatorKind which, double T_max, double tol_T,
                                            int grid, int prescan) {
  if (!(T_max > 0.0) || !(tol_T > 0.0)) throw NumericalError("T_max and tol_T must be positive");
  return bracket_sign_change([&](double T) { return spectrum(assemble(c, which, T, grid), 1, false).values[0]; },
                             operator_name(which), T_max, tol_T, prescan);
}

InequalityCheck eig_inequality_check(const CoefficientField& c, double T, int grid) {
  InequalityCheck r;
  r.lambda1 = spectrum(assemble(c, OperatorKind::kD1, T, grid), 1, false).values[0];
  r.mu1 = spectrum(assemble(c, OperatorKind::kD2, T, grid), 1, false).values[0];
  r.bound = 2.0 * r.mu1 / (T * T);
  r.verdict = r.lambda1 > r.bound;
  return r;
}

}  // namespace abnormal
