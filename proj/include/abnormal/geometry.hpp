#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "abnormal/jet.hpp"
#include "abnormal/jsonio.hpp"
#include "abnormal/system.hpp"

namespace abnormal {

// Convention: [V,W] = DW.V - DV.W, so ad X.Y = [X,Y].
std::vector<Jet> lie_bracket(const std::vector<Jet>& V, const std::vector<Jet>& W);
std::vector<Jet> lie_bracket_at(const VectorFieldExpr& V, const VectorFieldExpr& W,
                                const Eigen::VectorXd& point, int order);
// ad^0 X.Y .. ad^kmax X.Y at the point
std::vector<Eigen::VectorXd> ad_sequence(const VectorFieldExpr& X, const VectorFieldExpr& Y,
                                         const Eigen::VectorXd& point, int kmax);
// [Y,[Y,X]] at the point
Eigen::VectorXd ad2_y_x(const VectorFieldExpr& X, const VectorFieldExpr& Y, const Eigen::VectorXd& point);

struct TrajectoryData {
  double horizon = 0.0;
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> adjoint;  // empty until adjoint_along
  std::vector<Eigen::MatrixXd> cone;     // n x (n-1): columns ad^j X.Y, j = 0..n-2
  std::vector<Eigen::VectorXd> closure;  // ad^{n-1} X.Y, used for the corank test
  int substeps = 0;                      // RK4 substeps per grid interval that met the tolerance

  int dimension() const { return states.empty() ? 0 : static_cast<int>(states[0].size()); }
  bool has_adjoint() const { return !adjoint.empty(); }
};

TrajectoryData reference_trajectory(const ControlSystem& sys, const Eigen::VectorXd& x0, double T, int M);
TrajectoryData adjoint_along(TrajectoryData traj, const ControlSystem& sys, double rank_tol = 1e-7);

struct AssumptionVerdict {
  std::string name;
  bool pass = true;
  double worst_margin = 0.0;
  std::optional<double> failing_time;
  std::vector<double> margins;  // per grid time
  bool lower_is_worse = true;   // H4 margin is a residual: higher is worse
};

struct AssumptionReport {
  double tol = 0.0;
  std::array<AssumptionVerdict, 5> verdicts;
  double closure_residual = 0.0;  // part of H1: ad^{n-1} distance to the cone
  bool all_pass() const;
  std::string first_failure() const;  // "" if none
  nlohmann::json to_json() const;
};

AssumptionReport check_assumptions(const TrajectoryData& traj, const ControlSystem& sys, double tol = 1e-7);

// distance from v to span of columns of B, rank decided relative to the largest singular value
double distance_to_span(const Eigen::VectorXd& v, const Eigen::MatrixXd& B, double rank_tol = 1e-10);

// dual coordinates along the basis [X(gamma), ad^0 .. ad^{n-3}, p]; row 0 = e1*, rows 1..n-2 cone, row n-1 = p
Eigen::MatrixXd adapted_dual_basis(const Eigen::VectorXd& drift, const Eigen::MatrixXd& cone,
                                   const Eigen::VectorXd& p);

}  // namespace abnormal
