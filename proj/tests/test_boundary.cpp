#include <cmath>
#include <sstream>

#include "abnormal/boundary.hpp"
#include "abnormal/errors.hpp"
#include "doctest.h"

using namespace abnormal;

namespace {

CoefficientField const4_coeffs() {
  Eigen::MatrixXd b(2, 2);
  b << -1, 0, 0, 1;
  return CoefficientField::constant(b);
}

CoefficientField scalar(double b) { return CoefficientField::constant(Eigen::MatrixXd::Constant(1, 1, b)); }

QuadraticFormData hessian_at(const ControlSystem& sys, double T) {
  auto tr = adjoint_along(reference_trajectory(sys, Eigen::VectorXd::Zero(sys.dimension()), T, 16), sys);
  return hessian_form(tr, sys, 64);
}

}  // namespace

TEST_CASE("n=3 kernel is linear and A_T = b/T") {
  for (double b : {0.25, 0.5, 2.0})
    for (double T : {0.5, 1.0, 3.0}) {
      auto s = solve_kernel_bvp(scalar(b), T, contact_data(scalar(b)), 200);
      for (int j = 0; j <= 200; ++j) CHECK(s.J[j] == doctest::Approx(j / 200.0).epsilon(1e-12));
      CHECK(s.energy == doctest::Approx(b / T).epsilon(1e-12));
      CHECK(gram_matrix(scalar(b), T, 200)(0, 0) == doctest::Approx(b / T).epsilon(1e-12));
    }
}

TEST_CASE("zero data gives the zero kernel") {
  auto c = const4_coeffs();
  EndData z{Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2)};
  auto s = solve_kernel_bvp(c, 1.0, z, 300);
  CHECK(s.J.cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.energy == 0.0);
  EndData bad{Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(2)};
  CHECK_THROWS_AS(solve_kernel_bvp(c, 1.0, bad, 300), ConfigError);
}

TEST_CASE("n=4 kernel: residual, end data, closed-form ODE") {
  auto c = const4_coeffs();
  const int N = 2000;
  auto s = solve_kernel_bvp(c, 1.0, contact_data(c), N);
  CHECK(s.residual <= 1e-8);
  CHECK(s.J[0] == 0.0);
  CHECK(s.J[N] == 1.0);
  // J'''' + J'' = 0 with J(0)=J'(0)=0, J(T)=1, J'(T)=0:
  // J = a(1 - cos t) + b(t - sin t), solved from the right-end conditions
  const double T = 1.0;
  Eigen::Matrix2d M;
  M << 1 - std::cos(T), T - std::sin(T), std::sin(T), 1 - std::cos(T);
  Eigen::Vector2d ab = M.lu().solve(Eigen::Vector2d(1, 0));
  double worst = 0;
  for (int j = 0; j <= N; ++j) {
    double t = T * j / N;
    worst = std::max(worst, std::abs(s.J[j] - (ab[0] * (1 - std::cos(t)) + ab[1] * (t - std::sin(t)))));
  }
  CHECK(worst <= 1e-5);
}

TEST_CASE("A_T sign law and monotonicity on the n=4 preset") {
  auto c = const4_coeffs();
  double prev = INFINITY;
  for (int i = 1; i <= 24; ++i) {
    double T = (2 * M_PI - 0.1) * i / 24;
    double A = compute_A(c, T, 1000);
    if (std::abs(T - M_PI) > 0.05) CHECK((A > 0) == (T < M_PI));
    CHECK(A < prev);
    prev = A;
  }
  CHECK_THROWS_AS(compute_A(c, 2 * M_PI + 0.2, 1000), NumericalError);
  // n=3 stays positive
  for (double T : {0.5, 2.0, 8.0}) CHECK(compute_A(scalar(0.5), T, 200) > 0);
}

TEST_CASE("A_T under mesh halving") {
  auto c = const4_coeffs();
  double a1 = compute_A(c, 2.0, 1000), a2 = compute_A(c, 2.0, 2000);
  CHECK(std::abs(a1 - a2) <= 1e-4 * std::abs(a2));
}

TEST_CASE("gram matrix: symmetry and polarization") {
  auto c = const4_coeffs();
  const double T = 1.0;
  const int N = 1000;
  auto A = gram_matrix(c, T, N);
  CHECK(std::abs(A(0, 1) - A(1, 0)) <= 1e-10);
  CHECK(A(0, 0) == doctest::Approx(compute_A(c, T, N)).epsilon(1e-12));
  auto J0 = solve_kernel_bvp(c, T, contact_data(c, 0), N);
  auto J1 = solve_kernel_bvp(c, T, contact_data(c, 1), N);
  DiscreteForm form(c, QuadraticKind::kQ1, T, N);
  EndData plus{J0.data.left + J1.data.left, J0.data.right + J1.data.right};
  EndData minus{J0.data.left - J1.data.left, J0.data.right - J1.data.right};
  double pol = 0.25 * (form.energy(J0.J + J1.J, plus) - form.energy(J0.J - J1.J, minus));
  CHECK(A(0, 1) == doctest::Approx(pol).epsilon(1e-9));
}

TEST_CASE("mirrored kernel functions") {
  auto c = const4_coeffs();
  EndData d{Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2)};
  d.left[0] = 1;
  auto s = solve_kernel_bvp(c, 1.0, d, 1000);
  auto r = solve_kernel_bvp(c, 1.0, contact_data(c), 1000);
  // constant coefficients: time reversal maps one onto the other
  double worst = 0;
  for (int j = 0; j <= 1000; ++j) worst = std::max(worst, std::abs(s.J[j] - r.J[1000 - j]));
  CHECK(worst <= 1e-6);  // h^2 level; stencils are not exactly reversal symmetric
}

TEST_CASE("boundary curves") {
  auto sr = boundary_curve(0.5, 1.0, 0.8, 1.2, CurveCase::kSR, 5);
  CHECK(sr.value(1.1) == doctest::Approx(0.005));
  CHECK(sr.value(0.9) == 0.0);
  CHECK(sr.value(1.0) == 0.0);
  auto af = boundary_curve(0.5, 1.0, 0.8, 1.2, CurveCase::kAffine, 5);
  CHECK(af.value(0.9) == doctest::Approx(af.value(1.1)));
  CHECK(af.value(1.0) == 0.0);
  std::ostringstream os;
  sr.write_csv(os);
  CHECK(os.str().rfind("x1,xn\n", 0) == 0);
  CHECK(sr.metadata()["case"] == "SR");
  CHECK_THROWS_AS(boundary_curve(0.5, 1.0, 1.1, 1.2, CurveCase::kSR), ConfigError);
}

TEST_CASE("martinet closed form") {
  CHECK(martinet_closed_form(1, 1).A_T == 0.5);
  CHECK(martinet_closed_form(2, 0.5).A_T == 0.25);
  CHECK(martinet_closed_form(1, 1).branch2_exponent == 3);
  CHECK_THROWS_AS(martinet_closed_form(0, 1), AssumptionError);
}

TEST_CASE("martinet: coefficient calibrated from the Hessian reproduces the closed form") {
  for (double alpha : {1.0, 2.0, -0.7})
    for (double T : {0.5, 1.0}) {
      auto sys = presets::martinet(alpha);
      auto q = hessian_at(sys, T);
      double b = calibrate_coefficient(q, contact_minimizer(q));
      CHECK(b == doctest::Approx(1 / (2 * alpha * alpha)).epsilon(1e-6));
      double A = compute_A(scalar(b), T, 2000);
      double exact = martinet_closed_form(alpha, T).A_T;
      CHECK(std::abs(A - exact) <= 1e-3 * exact);
      CHECK(direct_contact_coefficient(q) == doctest::Approx(exact).epsilon(1e-6));
    }
}

TEST_CASE("direct contact coefficient agrees with the operator route on the n=4 preset") {
  auto sys = presets::const4();
  for (double T : {1.0, 2.0, 4.0}) {
    double direct = direct_contact_coefficient(hessian_at(sys, T));
    double op = compute_A(const4_coeffs(), T, 2000);
    CHECK(direct == doctest::Approx(op).epsilon(1e-3));
  }
}
