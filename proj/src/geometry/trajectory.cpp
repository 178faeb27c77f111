#include <cmath>

#include "abnormal/errors.hpp"
#include "abnormal/geometry.hpp"

namespace abnormal {

namespace {

// RK4 for x' = X(x) on the uniform grid, S substeps per interval
std::vector<Eigen::VectorXd> integrate_drift(const ControlSystem& sys, const Eigen::VectorXd& x0, double T, int M,
                                             int S) {
  const int n = sys.dimension();
  std::vector<double> scratch;
  auto f = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd d(n);
    sys.X().eval(x.data(), d.data(), scratch);
    return d;
  };
  const double h = T / (static_cast<double>(M) * S);
  std::vector<Eigen::VectorXd> out{x0};
  Eigen::VectorXd x = x0;
  for (int k = 0; k < M; ++k) {
    for (int s = 0; s < S; ++s) {
      Eigen::VectorXd k1 = f(x);
      Eigen::VectorXd k2 = f(x + 0.5 * h * k1);
      Eigen::VectorXd k3 = f(x + 0.5 * h * k2);
      Eigen::VectorXd k4 = f(x + h * k3);
      x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!x.allFinite() || x.norm() > 1e12) throw NumericalError("integration blow-up along the reference trajectory");
    out.push_back(x);
  }
  return out;
}

}  // namespace

TrajectoryData reference_trajectory(const ControlSystem& sys, const Eigen::VectorXd& x0, double T, int M) {
  if (!(T > 0.0)) throw NumericalError("horizon must be positive");
  if (M < 2) throw NumericalError("trajectory grid needs M >= 2");
  if (x0.size() != sys.dimension()) throw NumericalError("initial point dimension mismatch");
  const int n = sys.dimension();

  // step doubling until the Richardson estimate is below 1e-10
  int S = 2;
  std::vector<Eigen::VectorXd> coarse = integrate_drift(sys, x0, T, M, S), fine;
  for (;;) {
    fine = integrate_drift(sys, x0, T, M, 2 * S);
    double err = 0.0;
    for (int k = 0; k <= M; ++k)
      err = std::max(err, (fine[k] - coarse[k]).lpNorm<Eigen::Infinity>() / (15.0 * std::max(1.0, fine[k].norm())));
    S *= 2;
    if (err <= 1e-10) break;
    if (S > (1 << 14)) throw NumericalError("step failure: tolerance not met along the reference trajectory");
    coarse = std::move(fine);
  }

  TrajectoryData tr;
  tr.horizon = T;
  tr.substeps = S;
  tr.states = std::move(fine);
  for (int k = 0; k <= M; ++k) {
    tr.times.push_back(T * k / M);
    auto ad = ad_sequence(sys.X(), sys.Y(), tr.states[k], n - 1);
    Eigen::MatrixXd K(n, n - 1);
    for (int j = 0; j < n - 1; ++j) K.col(j) = ad[j];
    tr.cone.push_back(K);
    tr.closure.push_back(ad[n - 1]);
  }
  return tr;
}

TrajectoryData adjoint_along(TrajectoryData tr, const ControlSystem& sys, double rank_tol) {
  const int n = tr.dimension();
  const std::size_t N = tr.states.size();
  tr.adjoint.clear();
  for (std::size_t k = 0; k < N; ++k) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(tr.cone[k], Eigen::ComputeFullU);
    const auto& s = svd.singularValues();
    if (!(s[0] > 0.0) || s[n - 2] <= rank_tol * s[0])
      throw AssumptionError("corank-1 failure: cone rank below n-1 at t=" + std::to_string(tr.times[k]));
    Eigen::VectorXd p = svd.matrixU().col(n - 1);
    const Eigen::VectorXd& c = tr.closure[k];
    if (std::abs(p.dot(c)) > rank_tol * std::max(c.norm(), s[0]))
      throw AssumptionError("corank-1 failure: cone has full rank at t=" + std::to_string(tr.times[k]));
    if (k > 0) {
      double d = p.dot(tr.adjoint.back());
      if (std::abs(d) < 0.5)
        throw AssumptionError("discontinuous cone: adjoint orientation cannot be followed at t=" +
                              std::to_string(tr.times[k]));
      if (d < 0) p = -p;
    }
    tr.adjoint.push_back(p);
  }
  // global sign: <p, [Y,[Y,X]]> > 0 where it is largest in magnitude
  double best = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    double v = tr.adjoint[k].dot(ad2_y_x(sys.X(), sys.Y(), tr.states[k]));
    if (std::abs(v) > std::abs(best)) best = v;
  }
  if (best < 0)
    for (auto& p : tr.adjoint) p = -p;
  return tr;
}

}  // namespace abnormal
