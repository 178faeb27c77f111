#include <algorithm>
#include <cmath>

#include "abnormal/errors.hpp"
#include "abnormal/reachset.hpp"

namespace abnormal {

SectorPoint sector_perturbation(const ControlSystem& sys, const AdaptedFrame& frame, double T, double eps) {
  if (!(eps > 0 && eps < 0.5)) throw ConfigError("sector epsilon must lie in (0, 1/2)");
  if (!(T > 2 * eps)) throw ConfigError("sector perturbation needs T > 2 epsilon");
  // v = 1 flipped to -1 on the middle window, then dv = 1 - sqrt(1 - eps^2), du = +-eps on its halves
  const double dv = 1 - std::sqrt(1 - eps * eps);
  const double vw = -1 + dv;
  struct Piece {
    double len, v, u;
  };
  const Piece pieces[] = {{(T - eps) / 2, 1, 0}, {eps / 2, vw, eps}, {eps / 2, vw, -eps}, {(T - eps) / 2, 1, 0}};
  SectorPoint s;
  s.epsilon = eps;
  s.constraint_error = std::max(std::abs(vw * vw + eps * eps - 1), 0.0);
  if (s.constraint_error > 1e-12) throw NumericalError("sector control off the unit circle");
  Eigen::VectorXd x = frame.origin;
  for (const auto& p : pieces) {
    int sub = std::max(16, static_cast<int>(std::ceil(p.len / T * 4096)));
    x = integrate_single(sys, x, p.len, {p.v}, {p.u}, sub);
  }
  s.state = x;
  AdaptedPoint a = frame.project(x);
  s.x1 = a.x1;
  s.xn = a.xn;
  const double jump = std::hypot(vw - 1, eps);
  s.sup_dist = jump;
  s.l2_dist = std::sqrt(eps) * jump;
  s.l2_perturbation = std::sqrt(eps * (dv * dv + eps * eps));
  return s;
}

SectorSweep sector_sweep(const ControlSystem& sys, const AdaptedFrame& frame, double T, std::vector<double> eps) {
  std::sort(eps.begin(), eps.end());
  if (std::adjacent_find(eps.begin(), eps.end()) != eps.end()) throw ConfigError("duplicate epsilon in sweep");
  if (eps.size() < 5) throw ConfigError("sector sweep needs at least 5 epsilon values");
  if (eps.back() < 4 * eps.front()) throw ConfigError("sector sweep must span a factor 4");
  SectorSweep sw;
  std::vector<double> lx, ly;
  for (double e : eps) {
    SectorPoint p = sector_perturbation(sys, frame, T, e);
    if (!(p.xn < 0))
      throw NumericalError("sector regime failure: xn >= 0 at epsilon " + std::to_string(e));
    lx.push_back(std::log(e));
    ly.push_back(std::log(-p.xn));
    sw.points.push_back(p);
  }
  auto f = linear_fit(lx, ly);
  sw.slope = f[0];
  sw.residual = f[2];
  return sw;
}

nlohmann::json SectorSweep::to_json() const {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : points)
    pts.push_back({{"epsilon", p.epsilon},
                   {"x1", p.x1},
                   {"xn", p.xn},
                   {"sup_dist", p.sup_dist},
                   {"l2_dist", p.l2_dist},
                   {"l2_perturbation", p.l2_perturbation},
                   {"constraint_error", p.constraint_error}});
  return {{"slope", slope}, {"residual", residual}, {"points", pts}};
}

}  // namespace abnormal
