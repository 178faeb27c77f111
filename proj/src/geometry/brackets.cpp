#include "abnormal/errors.hpp"
#include "abnormal/geometry.hpp"

namespace abnormal {

namespace {
std::vector<double> to_std(const Eigen::VectorXd& x) { return std::vector<double>(x.data(), x.data() + x.size()); }

Eigen::VectorXd values(const std::vector<Jet>& J) {
  Eigen::VectorXd v(J.size());
  for (std::size_t i = 0; i < J.size(); ++i) v[i] = J[i].value();
  return v;
}
}  // namespace

std::vector<Jet> lie_bracket(const std::vector<Jet>& V, const std::vector<Jet>& W) {
  const std::size_t n = V.size();
  if (W.size() != n) throw EvalError("bracket of fields with different dimensions");
  if (V[0].order() < 1 || W[0].order() < 1) throw EvalError("insufficient jet order for a bracket");
  std::vector<std::vector<Jet>> dV(n), dW(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      dV[i].push_back(V[i].derivative(static_cast<int>(k)));
      dW[i].push_back(W[i].derivative(static_cast<int>(k)));
    }
  std::vector<Jet> out;
  for (std::size_t i = 0; i < n; ++i) {
    Jet s = dW[i][0] * V[0] - dV[i][0] * W[0];
    for (std::size_t k = 1; k < n; ++k) s += dW[i][k] * V[k] - dV[i][k] * W[k];
    out.push_back(s);
  }
  return out;
}

std::vector<Jet> lie_bracket_at(const VectorFieldExpr& V, const VectorFieldExpr& W, const Eigen::VectorXd& point,
                                int order) {
  if (order < 0) throw EvalError("negative bracket order");
  auto p = to_std(point);
  return lie_bracket(eval_jet(V, p, order + 1), eval_jet(W, p, order + 1));
}

std::vector<Eigen::VectorXd> ad_sequence(const VectorFieldExpr& X, const VectorFieldExpr& Y,
                                         const Eigen::VectorXd& point, int kmax) {
  if (kmax < 0) throw EvalError("insufficient jet order");
  auto p = to_std(point);
  auto Xj = eval_jet(X, p, kmax);
  auto F = eval_jet(Y, p, kmax);
  std::vector<Eigen::VectorXd> out{values(F)};
  for (int j = 1; j <= kmax; ++j) {
    F = lie_bracket(Xj, F);
    out.push_back(values(F));
  }
  return out;
}

Eigen::VectorXd ad2_y_x(const VectorFieldExpr& X, const VectorFieldExpr& Y, const Eigen::VectorXd& point) {
  auto p = to_std(point);
  auto Yj = eval_jet(Y, p, 2);
  auto YX = lie_bracket(Yj, eval_jet(X, p, 2));
  return values(lie_bracket(Yj, YX));
}

double distance_to_span(const Eigen::VectorXd& v, const Eigen::MatrixXd& B, double rank_tol) {
  if (B.cols() == 0) return v.norm();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(B, Eigen::ComputeFullU);
  const auto& s = svd.singularValues();
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s[i] > rank_tol * s[0] && s[i] > 0) ++r;
  Eigen::MatrixXd U = svd.matrixU().leftCols(r);
  return (v - U * (U.transpose() * v)).norm();
}

Eigen::MatrixXd adapted_dual_basis(const Eigen::VectorXd& drift, const Eigen::MatrixXd& cone,
                                   const Eigen::VectorXd& p) {
  const int n = static_cast<int>(drift.size());
  Eigen::MatrixXd B(n, n);
  B.col(0) = drift;
  for (int j = 0; j < n - 2; ++j) B.col(1 + j) = cone.col(j);
  B.col(n - 1) = p;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(B);
  const auto& s = svd.singularValues();
  if (s[n - 1] <= 1e-10 * s[0]) throw NumericalError("degenerate adapted basis (cone rank failure)");
  return lu.inverse();
}

}  // namespace abnormal
