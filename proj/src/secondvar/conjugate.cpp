#include "abnormal/errors.hpp"
#include "abnormal/secondvar.hpp"

namespace abnormal {

nlohmann::json ConjugateTimeResult::to_json() const {
  nlohmann::json j;
  j["mode"] = mode;
  j["status"] = status;
  j["bracket_low"] = bracket_low;
  j["bracket_high"] = bracket_high;
  return j;
}

double restricted_lambda(const ControlSystem& sys, const Eigen::VectorXd& x0, RestrictionMode mode, double T,
                         const SecondVarOptions& opt) {
  auto tr = adjoint_along(reference_trajectory(sys, x0, T, opt.traj_grid), sys);
  auto q = hessian_form(tr, sys, opt.intervals, opt.substeps);
  return restricted_smallest_eig(q, mode, opt.norm).lambda_min;
}

ConjugateTimeResult conjugate_time_search(const ControlSystem& sys, const Eigen::VectorXd& x0, RestrictionMode mode,
                                          double T_max, double tol_T, const SecondVarOptions& opt) {
  if (!(T_max > 0.0) || !(tol_T > 0.0)) throw NumericalError("T_max and tol_T must be positive");
  auto full = reference_trajectory(sys, x0, T_max, std::max(opt.traj_grid, 64));
  auto rep = check_assumptions(full, sys, opt.assumption_tol);
  if (!rep.all_pass())
    throw AssumptionError("assumption " + rep.first_failure() + " fails inside the horizon");
  return bracket_sign_change([&](double T) { return restricted_lambda(sys, x0, mode, T, opt); }, mode_name(mode),
                             T_max, tol_T, opt.prescan);
}

}  // namespace abnormal
