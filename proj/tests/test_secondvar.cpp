#include <cmath>
#include <random>

#include "abnormal/errors.hpp"
#include "abnormal/secondvar.hpp"
#include "doctest.h"

using namespace abnormal;

namespace {

TrajectoryData traj_for(const ControlSystem& sys, double T, int M = 16) {
  return adjoint_along(reference_trajectory(sys, Eigen::VectorXd::Zero(sys.dimension()), T, M), sys);
}

Eigen::VectorXd random_smooth_control(std::mt19937_64& rng, const ControlBasis& b) {
  std::uniform_real_distribution<double> u(-1, 1);
  double a1 = u(rng), a2 = u(rng), a3 = u(rng), ph = 3 * u(rng);
  Eigen::VectorXd v(b.size());
  for (int j = 0; j <= b.intervals; ++j) {
    double t = b.horizon * j / b.intervals;
    v[j] = a1 * std::sin(M_PI * t / b.horizon + ph) + a2 * std::cos(2 * t) + a3 * t * t;
  }
  v[b.impulse_start()] = u(rng);
  v[b.impulse_end()] = u(rng);
  return v;
}

}  // namespace

TEST_CASE("martinet: first variation has no component along p(T)") {
  auto sys = presets::martinet(1.0, 0.3, -0.4);
  auto tr = traj_for(sys, 1.0);
  auto q = first_variation_matrix(tr, sys, 32);
  CHECK((q.p_T.transpose() * q.dE).norm() <= 1e-8);
  CHECK(q.coords.row(2).norm() <= 1e-8);
  CHECK_FALSE(q.has_hessian);
}

TEST_CASE("chain toy: dE rows are the variation-of-constants kernels") {
  // X = (1+x2, 0, x2^2/2), Y = e2: dx1 = int (T-s) u ds, dx2 = int u ds
  auto sys = presets::chain_n3(0.5);
  const double T = 2.0;
  const int m = 8;
  auto q = first_variation_matrix(traj_for(sys, T), sys, m);
  const double h = T / m;
  for (int j = 0; j <= m; ++j) {
    double tj = j * h;
    double i0 = (j == 0 || j == m) ? h / 2 : h;
    double i1 = j == 0 ? T * h / 2 - h * h / 6 : (j == m ? h * h / 6 : (T - tj) * h);
    CHECK(q.dE(1, j) == doctest::Approx(i0).epsilon(1e-12));
    CHECK(q.dE(0, j) == doctest::Approx(i1).epsilon(1e-12));
    CHECK(std::abs(q.dE(2, j)) <= 1e-14);
  }
  // kicks along Y at t=0 and t=T
  CHECK(q.dE(0, m + 1) == doctest::Approx(T));
  CHECK(q.dE(1, m + 1) == doctest::Approx(1.0));
  CHECK(q.dE(0, m + 2) == doctest::Approx(0.0));
  CHECK(q.dE(1, m + 2) == doctest::Approx(1.0));
}

TEST_CASE("Hessian is symmetric and vanishes at zero") {
  auto sys = presets::martinet(1.0, 0.2, 0.3);
  auto q = hessian_form(traj_for(sys, 1.0), sys, 24);
  CHECK((q.Q - q.Q.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(q.basis.size());
  CHECK(z.dot(q.Q * z) == 0.0);
  CHECK(fd_oracle(sys, traj_for(sys, 1.0), q.basis, z, 1e-3) == doctest::Approx(0.0));
}

TEST_CASE("property: Hessian agrees with the nonlinear finite-difference oracle") {
  std::mt19937_64 rng(21);
  for (const auto& sys : {presets::martinet(1.0, 0.4, -0.3), presets::const4()}) {
    auto tr = traj_for(sys, 1.3);
    auto q = hessian_form(tr, sys, 20, 8);
    double worst = 0;
    for (int trial = 0; trial < 10; ++trial) {
      Eigen::VectorXd v = random_smooth_control(rng, q.basis);
      double qv = v.dot(q.Q * v);
      double fd = fd_oracle(sys, tr, q.basis, v, 1e-3);
      worst = std::max(worst, std::abs(qv - fd) / std::max(std::abs(qv), 1e-12));
    }
    MESSAGE(sys.name() << " worst relative gap " << worst);
    CHECK(worst <= 1e-4);
  }
}

TEST_CASE("fd oracle Richardson pair agrees to O(h^2)") {
  auto sys = presets::martinet(1.0, 0.5, 0.5);
  auto tr = traj_for(sys, 1.0);
  ControlBasis b{1.0, 16, 8};
  std::mt19937_64 rng(2);
  Eigen::VectorXd v = random_smooth_control(rng, b);
  double a = fd_oracle(sys, tr, b, v, 2e-2), c = fd_oracle(sys, tr, b, v, 1e-2), d = fd_oracle(sys, tr, b, v, 5e-3);
  double r = std::abs(a - c) / std::abs(c - d);
  CHECK(r > 3.0);
  CHECK(r < 5.0);
  CHECK_THROWS_AS(fd_oracle(sys, tr, b, v, 0.0), NumericalError);
}

TEST_CASE("martinet restricted spectra are positive") {
  auto sys = presets::martinet(1.0);
  auto q = hessian_form(traj_for(sys, 1.0), sys, 32);
  auto fixed = restricted_smallest_eig(q, RestrictionMode::kFixed);
  auto free = restricted_smallest_eig(q, RestrictionMode::kFree);
  CHECK(fixed.lambda_min > 0);
  CHECK(free.lambda_min > 0);
  CHECK(free.kernel_dim > fixed.kernel_dim);
  // Q = int w^2 in the Goh variable for this frame
  CHECK(free.lambda_min == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("definite form gives positive eigenvalues in both modes") {
  auto sys = presets::const4();
  auto q = hessian_form(traj_for(sys, 5.0), sys, 16);
  q.Q = q.goh_gram;
  CHECK(restricted_smallest_eig(q, RestrictionMode::kFixed).lambda_min == doctest::Approx(1.0));
  CHECK(restricted_smallest_eig(q, RestrictionMode::kFree).lambda_min == doctest::Approx(1.0));
}

TEST_CASE("property: FREE minimum never exceeds FIXED minimum") {
  auto sys = presets::const4();
  for (double T : {0.5, 2.0, 3.5, 5.0, 6.5}) {
    auto q = hessian_form(traj_for(sys, T), sys, 24);
    double f = restricted_smallest_eig(q, RestrictionMode::kFree).lambda_min;
    double x = restricted_smallest_eig(q, RestrictionMode::kFixed).lambda_min;
    CHECK(f <= x + 1e-12);
  }
}

TEST_CASE("const4 FREE eigenvalue matches its closed form") {
  // Goh norm: lambda = 2 (1 - T^2/pi^2) from min int eta^2 / int eta'^2 with Dirichlet eta
  auto sys = presets::const4();
  for (double T : {1.0, 2.5, 4.0}) {
    auto q = hessian_form(traj_for(sys, T), sys, 32);
    double f = restricted_smallest_eig(q, RestrictionMode::kFree).lambda_min;
    CHECK(f == doctest::Approx(2 * (1 - T * T / (M_PI * M_PI))).epsilon(1e-5));
  }
}

TEST_CASE("grid too small is rejected") {
  auto sys = presets::const4();
  CHECK_THROWS_AS(hessian_form(traj_for(sys, 1.0), sys, 3), NumericalError);
  CHECK_THROWS_AS(hessian_form(traj_for(sys, 1.0), sys, 8, 3), NumericalError);
}

TEST_CASE("conjugate times") {
  SecondVarOptions opt;
  opt.intervals = 32;
  auto mart = presets::martinet(1.0);
  auto none = conjugate_time_search(mart, Eigen::Vector3d::Zero(), RestrictionMode::kFree, 10.0, 1e-4, opt);
  CHECK(none.status == "none");
  for (const auto& [T, l] : none.scan) CHECK(l > 0);

  auto c4 = presets::const4();
  auto tcc = conjugate_time_search(c4, Eigen::Vector4d::Zero(), RestrictionMode::kFree, 10.0, 1e-4, opt);
  auto tc = conjugate_time_search(c4, Eigen::Vector4d::Zero(), RestrictionMode::kFixed, 10.0, 1e-4, opt);
  REQUIRE(tcc.found());
  REQUIRE(tc.found());
  CHECK(std::abs(tcc.value() - M_PI) <= 1e-3);
  CHECK(std::abs(tc.value() - 2 * M_PI) <= 1e-3);
  CHECK(tcc.bracket_high - tcc.bracket_low <= 1e-4);
  CHECK(0 < tcc.value());
  CHECK(tcc.value() < tc.value());
  CHECK_FALSE(tcc.non_monotone);
  CHECK_FALSE(tc.non_monotone);
  auto j = tcc.to_json();
  CHECK(j["mode"] == "FREE");
  CHECK(j["status"] == "found");

  // mesh convergence
  opt.intervals = 64;
  auto tcc2 = conjugate_time_search(c4, Eigen::Vector4d::Zero(), RestrictionMode::kFree, 10.0, 1e-4, opt);
  CHECK(std::abs(tcc2.value() - tcc.value()) <= 1e-4);

  CHECK_THROWS_AS(conjugate_time_search(presets::martinet(0.0), Eigen::Vector3d::Zero(), RestrictionMode::kFree, 2.0,
                                        1e-3, opt),
                  AssumptionError);
}

TEST_CASE("property: smallest eigenvalue is nonincreasing in T") {
  auto c4 = presets::const4();
  SecondVarOptions opt;
  opt.intervals = 32;
  for (auto mode : {RestrictionMode::kFree, RestrictionMode::kFixed}) {
    double prev = INFINITY;
    for (int i = 1; i <= 16; ++i) {
      double l = restricted_lambda(c4, Eigen::Vector4d::Zero(), mode, 8.0 * i / 16, opt);
      CHECK(l <= prev + 1e-9);
      prev = l;
    }
  }
}
