#include <cmath>
#include <limits>

#include "abnormal/geometry.hpp"

namespace abnormal {

bool AssumptionReport::all_pass() const {
  for (const auto& v : verdicts)
    if (!v.pass) return false;
  return true;
}

std::string AssumptionReport::first_failure() const {
  for (const auto& v : verdicts)
    if (!v.pass) return v.name;
  return "";
}

nlohmann::json AssumptionReport::to_json() const {
  nlohmann::json j;
  j["tol"] = tol;
  j["all_pass"] = all_pass();
  j["closure_residual"] = closure_residual;
  for (const auto& v : verdicts) {
    nlohmann::json e;
    e["pass"] = v.pass;
    e["worst_margin"] = v.worst_margin;
    e["failing_time"] = v.failing_time ? nlohmann::json(*v.failing_time) : nlohmann::json(nullptr);
    e["margin_kind"] = v.lower_is_worse ? "lower bound" : "residual";
    e["margins"] = v.margins;
    j["verdicts"][v.name] = e;
  }
  return j;
}

namespace {

// fills worst margin and first failing time; pass decided by the predicate on each margin
template <class Ok>
void finish(AssumptionVerdict& v, const std::vector<double>& times, Ok ok) {
  v.pass = true;
  v.worst_margin = v.lower_is_worse ? std::numeric_limits<double>::infinity() : 0.0;
  for (std::size_t k = 0; k < v.margins.size(); ++k) {
    double m = v.margins[k];
    v.worst_margin = v.lower_is_worse ? std::min(v.worst_margin, m) : std::max(v.worst_margin, m);
    if (!ok(m) && v.pass) {
      v.pass = false;
      v.failing_time = times[k];
    }
  }
}

}  // namespace

AssumptionReport check_assumptions(const TrajectoryData& tr, const ControlSystem& sys, double tol) {
  AssumptionReport rep;
  rep.tol = tol;
  const int n = tr.dimension();
  const std::size_t N = tr.states.size();
  const char* names[5] = {"H0", "H1", "H2", "H3", "H4"};
  for (int i = 0; i < 5; ++i) rep.verdicts[i].name = names[i];
  rep.verdicts[4].lower_is_worse = false;

  std::vector<Eigen::VectorXd> drift(N);
  double vmax = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    drift[k] = sys.drift(tr.states[k]);
    vmax = std::max(vmax, drift[k].norm());
  }

  // H0: chord over elapsed time, normalized by the top speed
  auto& h0 = rep.verdicts[0];
  h0.margins.assign(N, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j) {
      double r = vmax > 0 ? (tr.states[i] - tr.states[j]).norm() / ((tr.times[j] - tr.times[i]) * vmax) : 0.0;
      h0.margins[i] = std::min(h0.margins[i], r);
      h0.margins[j] = std::min(h0.margins[j], r);
    }
  finish(h0, tr.times, [&](double m) { return m > tol; });

  auto& h1 = rep.verdicts[1];
  auto& h2 = rep.verdicts[2];
  auto& h3 = rep.verdicts[3];
  auto& h4 = rep.verdicts[4];
  std::vector<bool> closed(N, true);
  for (std::size_t k = 0; k < N; ++k) {
    const Eigen::MatrixXd& K = tr.cone[k];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(K);
    const auto& s = svd.singularValues();
    double ratio = s[0] > 0 ? s[n - 2] / s[0] : 0.0;
    double scaleK = s[0];
    double clos = distance_to_span(tr.closure[k], K) / std::max({tr.closure[k].norm(), scaleK, 1e-300});
    rep.closure_residual = std::max(rep.closure_residual, clos);
    closed[k] = clos <= tol;
    h1.margins.push_back(closed[k] ? ratio : 0.0);

    Eigen::VectorXd v2 = ad2_y_x(sys.X(), sys.Y(), tr.states[k]);
    double sc2 = std::max({v2.norm(), scaleK, 1e-300});
    h2.margins.push_back(distance_to_span(v2, K) / sc2);

    double scx = std::max({drift[k].norm(), scaleK, 1e-300});
    h3.margins.push_back(distance_to_span(drift[k], K.leftCols(std::max(0, n - 2))) / scx);
    h4.margins.push_back(distance_to_span(drift[k], K) / scx);
  }
  finish(h1, tr.times, [&](double m) { return m > tol; });
  finish(h2, tr.times, [&](double m) { return m > tol; });
  finish(h3, tr.times, [&](double m) { return m > tol; });
  finish(h4, tr.times, [&](double m) { return m <= tol; });
  return rep;
}

}  // namespace abnormal
