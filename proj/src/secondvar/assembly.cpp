#include <cmath>

#include "abnormal/errors.hpp"
#include "abnormal/secondvar.hpp"

namespace abnormal {

double ControlBasis::hat(int j, double t) const {
  const double h = horizon / intervals;
  double d = std::abs(t / h - j);
  return d < 1.0 ? 1.0 - d : 0.0;
}

void ControlBasis::values(double t, Eigen::RowVectorXd& out) const {
  out.setZero(size());
  const double h = horizon / intervals;
  double s = t / h;
  int j = static_cast<int>(std::floor(s));
  if (j >= intervals) j = intervals - 1;
  if (j < 0) j = 0;
  double f = s - j;
  out[j] = 1.0 - f;
  out[j + 1] = f;
}

double ControlBasis::value(const Eigen::VectorXd& c, double t) const {
  Eigen::RowVectorXd u;
  values(t, u);
  return u.head(intervals + 1).dot(c.head(intervals + 1));
}

const char* mode_name(RestrictionMode m) { return m == RestrictionMode::kFixed ? "FIXED" : "FREE"; }

namespace {

std::vector<double> as_std(const Eigen::VectorXd& x) { return std::vector<double>(x.data(), x.data() + x.size()); }

struct PointData {
  Eigen::MatrixXd A;                // DX
  Eigen::VectorXd B;                // Y
  Eigen::MatrixXd DY;
  std::vector<Eigen::MatrixXd> D2X;  // Hessian of each component
};

double hess_entry(const Jet& j, int a, int b) {
  std::vector<int> e(j.space().vars(), 0);
  e[a] += 1;
  e[b] += 1;
  return j.coeff(e) * (a == b ? 2.0 : 1.0);
}

PointData point_data(const ControlSystem& sys, const Eigen::VectorXd& x, bool second) {
  const int n = sys.dimension();
  PointData d;
  auto p = as_std(x);
  auto Xj = eval_jet(sys.X(), p, second ? 2 : 1);
  auto Yj = eval_jet(sys.Y(), p, 1);
  d.A.resize(n, n);
  d.DY.resize(n, n);
  d.B.resize(n);
  for (int i = 0; i < n; ++i) {
    d.B[i] = Yj[i].value();
    for (int k = 0; k < n; ++k) {
      d.A(i, k) = Xj[i].partial(k);
      d.DY(i, k) = Yj[i].partial(k);
    }
  }
  if (second) {
    for (int l = 0; l < n; ++l) {
      Eigen::MatrixXd H(n, n);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) H(a, b) = hess_entry(Xj[l], a, b);
      d.D2X.push_back(H);
    }
  }
  return d;
}

// RK4 of x' = X(x) + u(t) Y(x) on a uniform grid of `steps` with step dt
template <class U>
Eigen::VectorXd integrate_controlled(const ControlSystem& sys, Eigen::VectorXd x, int steps, double dt, U&& u,
                                     std::vector<Eigen::VectorXd>* trace = nullptr) {
  const int n = sys.dimension();
  std::vector<double> scratch;
  Eigen::VectorXd fx(n), fy(n);
  auto f = [&](const Eigen::VectorXd& y, double t) {
    sys.X().eval(y.data(), fx.data(), scratch);
    double c = u(t);
    if (c != 0.0) {
      sys.Y().eval(y.data(), fy.data(), scratch);
      return Eigen::VectorXd(fx + c * fy);
    }
    return Eigen::VectorXd(fx);
  };
  if (trace) trace->push_back(x);
  for (int k = 0; k < steps; ++k) {
    double t = k * dt;
    Eigen::VectorXd k1 = f(x, t);
    Eigen::VectorXd k2 = f(x + 0.5 * dt * k1, t + 0.5 * dt);
    Eigen::VectorXd k3 = f(x + 0.5 * dt * k2, t + 0.5 * dt);
    Eigen::VectorXd k4 = f(x + dt * k3, t + dt);
    x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!x.allFinite() || x.norm() > 1e12) throw NumericalError("integrator failure in variational equations");
    if (trace) trace->push_back(x);
  }
  return x;
}

// flow along Y for time s
Eigen::VectorXd kick(const ControlSystem& sys, Eigen::VectorXd x, double s) {
  if (s == 0.0) return x;
  const int steps = 32;
  const double h = s / steps;
  for (int k = 0; k < steps; ++k) {
    Eigen::VectorXd k1 = sys.input(x);
    Eigen::VectorXd k2 = sys.input(x + 0.5 * h * k1);
    Eigen::VectorXd k3 = sys.input(x + 0.5 * h * k2);
    Eigen::VectorXd k4 = sys.input(x + h * k3);
    x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

QuadraticFormData assemble(const TrajectoryData& traj, const ControlSystem& sys, int m, int S, bool second) {
  if (!traj.has_adjoint()) throw NumericalError("trajectory has no adjoint");
  const int n = sys.dimension();
  if (n < 3) throw NumericalError("second variation needs n >= 3");
  if (m < n) throw NumericalError("control grid must have m >= n");
  if (S < 2 || S % 2) throw NumericalError("substeps must be even");
  QuadraticFormData q;
  q.horizon = traj.horizon;
  q.basis = ControlBasis{traj.horizon, m, S};
  const ControlBasis& basis = q.basis;
  const int N = basis.size();
  const int Nf = basis.fine_steps();
  const double T = traj.horizon, dt = T / Nf;

  // reference at half steps
  std::vector<Eigen::VectorXd> half;
  integrate_controlled(sys, traj.states.front(), 2 * Nf, 0.5 * dt, [](double) { return 0.0; }, &half);
  std::vector<PointData> pd;
  pd.reserve(half.size());
  for (std::size_t i = 0; i < half.size(); ++i) pd.push_back(point_data(sys, half[i], second && i % 2 == 0));

  // linear response, one column per basis element
  std::vector<Eigen::MatrixXd> Delta;
  Delta.reserve(Nf + 1);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, N);
  D.col(basis.impulse_start()) = pd[0].B;
  Delta.push_back(D);
  Eigen::RowVectorXd u0, uh, u1;
  for (int k = 0; k < Nf; ++k) {
    const double t = k * dt;
    basis.values(t, u0);
    basis.values(t + 0.5 * dt, uh);
    basis.values(t + dt, u1);
    const PointData &a = pd[2 * k], &b = pd[2 * k + 1], &c = pd[2 * k + 2];
    Eigen::MatrixXd k1 = a.A * D + a.B * u0;
    Eigen::MatrixXd k2 = b.A * (D + 0.5 * dt * k1) + b.B * uh;
    Eigen::MatrixXd k3 = b.A * (D + 0.5 * dt * k2) + b.B * uh;
    Eigen::MatrixXd k4 = c.A * (D + dt * k3) + c.B * u1;
    D += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!D.allFinite()) throw NumericalError("integrator failure in variational equations");
    Delta.push_back(D);
  }
  q.dE = D;
  q.dE.col(basis.impulse_end()) += pd.back().B;
  q.p_T = traj.adjoint.back();

  // costate backwards from p(T)
  std::vector<Eigen::VectorXd> lam(Nf + 1);
  Eigen::VectorXd l = q.p_T;
  lam[Nf] = l;
  for (int k = Nf; k > 0; --k) {
    const PointData &a = pd[2 * k], &b = pd[2 * k - 1], &c = pd[2 * k - 2];
    Eigen::VectorXd k1 = a.A.transpose() * l;
    Eigen::VectorXd k2 = b.A.transpose() * (l + 0.5 * dt * k1);
    Eigen::VectorXd k3 = b.A.transpose() * (l + 0.5 * dt * k2);
    Eigen::VectorXd k4 = c.A.transpose() * (l + dt * k3);
    l += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    lam[k - 1] = l;
  }

  // Simpson weights
  q.weights.resize(Nf + 1);
  for (int k = 0; k <= Nf; ++k) q.weights[k] = dt / 3.0 * (k == 0 || k == Nf ? 1.0 : (k % 2 ? 4.0 : 2.0));

  // adapted coordinates along the grid
  q.goh_gram = Eigen::MatrixXd::Zero(N, N);
  q.fixed_gram = Eigen::MatrixXd::Zero(N, N);
  q.free_gram = Eigen::MatrixXd::Zero(N, N);
  q.x1_profile.resize(Nf + 1, N);
  for (int k = 0; k <= Nf; ++k) {
    q.fine_times.push_back(k * dt);
    const Eigen::VectorXd& x = half[2 * k];
    auto ad = ad_sequence(sys.X(), sys.Y(), x, n - 3);
    Eigen::MatrixXd cone(n, n - 1);
    cone.setZero();
    for (int j = 0; j <= n - 3; ++j) cone.col(j) = ad[j];
    Eigen::MatrixXd Dinv = adapted_dual_basis(sys.drift(x), cone, lam[k].normalized());
    Eigen::MatrixXd C = Dinv * Delta[k];
    const double w = q.weights[k];
    q.goh_gram.noalias() += w * C.row(1).transpose() * C.row(1);
    q.fixed_gram.noalias() += w * C.row(0).transpose() * C.row(0);
    q.free_gram.noalias() += w * C.row(n - 2).transpose() * C.row(n - 2);
    q.x1_profile.row(k) = C.row(0);
    if (k == Nf) q.coords = Dinv * q.dE;
  }

  // L2 Gram of hats (exact for piecewise linear)
  q.control_mass = Eigen::MatrixXd::Zero(N, N);
  const double h = T / m;
  for (int j = 0; j <= m; ++j) {
    q.control_mass(j, j) = (j == 0 || j == m) ? h / 3.0 : 2.0 * h / 3.0;
    if (j < m) q.control_mass(j, j + 1) = q.control_mass(j + 1, j) = h / 6.0;
  }

  if (second) {
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(N, N);
    Eigen::RowVectorXd u;
    for (int k = 0; k <= Nf; ++k) {
      const PointData& a = pd[2 * k];
      Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
      for (int i = 0; i < n; ++i) H += lam[k][i] * a.D2X[i];
      Eigen::RowVectorXd g = lam[k].transpose() * a.DY;
      Eigen::RowVectorXd gD = g * Delta[k];
      basis.values(k * dt, u);
      const double w = q.weights[k];
      Q.noalias() += w * (Delta[k].transpose() * H * Delta[k]);
      Q.noalias() += w * (u.transpose() * gD + gD.transpose() * u);
    }
    // kick at 0: second-order term of the Y-flow
    const int c0 = basis.impulse_start(), cT = basis.impulse_end();
    Q(c0, c0) += lam[0].dot(pd[0].DY * pd[0].B);
    // kick at T: Y evaluated at the perturbed end-point, plus its own second-order term
    const PointData& e = pd.back();
    Eigen::RowVectorXd pdy = q.p_T.transpose() * e.DY;
    for (int j = 0; j < N; ++j) {
      if (j == cT) continue;
      double v = pdy.dot(D.col(j));
      Q(cT, j) += v;
      Q(j, cT) += v;
    }
    Q(cT, cT) += pdy.dot(e.B);
    q.Q = 0.5 * (Q + Q.transpose());
    q.has_hessian = true;
  }
  return q;
}

}  // namespace

QuadraticFormData first_variation_matrix(const TrajectoryData& traj, const ControlSystem& sys, int m, int substeps) {
  return assemble(traj, sys, m, substeps, false);
}

QuadraticFormData hessian_form(const TrajectoryData& traj, const ControlSystem& sys, int m, int substeps) {
  return assemble(traj, sys, m, substeps, true);
}

double fd_oracle(const ControlSystem& sys, const TrajectoryData& traj, const ControlBasis& basis,
                 const Eigen::VectorXd& v, double h) {
  if (!(h > 0.0)) throw NumericalError("fd step must be positive");
  if (v.size() != basis.size()) throw NumericalError("control coefficient size mismatch");
  if (!traj.has_adjoint()) throw NumericalError("trajectory has no adjoint");
  const Eigen::VectorXd& p = traj.adjoint.back();
  const int Nf = basis.fine_steps();
  const double dt = basis.horizon / Nf;
  auto run = [&](double s) {
    Eigen::VectorXd x = kick(sys, traj.states.front(), s * v[basis.impulse_start()]);
    x = integrate_controlled(sys, x, Nf, dt, [&](double t) { return s * basis.value(v, t); });
    return p.dot(kick(sys, x, s * v[basis.impulse_end()]));
  };
  return (run(h) + run(-h) - 2.0 * run(0.0)) / (h * h);
}

}  // namespace abnormal
