#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "abnormal/errors.hpp"
#include "abnormal/reachset.hpp"

namespace abnormal {

AdaptedPoint AdaptedFrame::project(const Eigen::VectorXd& x) const {
  Eigen::VectorXd c = dual * (x - base);
  AdaptedPoint p;
  p.x1 = horizon + c[0];
  p.xn = c[c.size() - 1];
  p.radius = c.norm();
  return p;
}

AdaptedFrame adapted_frame(const TrajectoryData& traj, const ControlSystem& sys) {
  if (!traj.has_adjoint()) throw NumericalError("adapted frame needs the adjoint");
  AdaptedFrame f;
  f.horizon = traj.horizon;
  f.origin = traj.states.front();
  f.base = traj.states.back();
  f.dual = adapted_dual_basis(sys.drift(f.base), traj.cone.back(), traj.adjoint.back().normalized());
  return f;
}

std::vector<AdaptedPoint> adapted_projection(const SampleCloud& cloud, const AdaptedFrame& frame) {
  std::vector<AdaptedPoint> out;
  out.reserve(cloud.size());
  for (int i = 0; i < cloud.size(); ++i) out.push_back(frame.project(cloud.states.col(i)));
  return out;
}

const char* cloud_case_name(CloudCase c) { return c == CloudCase::kAffine ? "AFFINE" : "SR"; }

void write_cloud_csv(std::ostream& os, const SampleCloud& cloud, const std::vector<AdaptedPoint>& pts, bool header) {
  const int n = static_cast<int>(cloud.states.rows());
  if (header) {
    os << "case,";
    for (int i = 0; i < n; ++i) os << "s" << i + 1 << ",";
    os << "x1,xn,family,amplitude,sup_dist,l2_dist\n";
  }
  char buf[64];
  for (int j = 0; j < cloud.size(); ++j) {
    os << cloud_case_name(cloud.cloud_case) << ",";
    for (int i = 0; i < n; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,", cloud.states(i, j));
      os << buf;
    }
    const auto& c = cloud.controls[j];
    std::snprintf(buf, sizeof buf, "%.17g,", pts[j].x1);
    os << buf;
    std::snprintf(buf, sizeof buf, "%.17g,", pts[j].xn);
    os << buf << family_name(c.family) << ",";
    std::snprintf(buf, sizeof buf, "%.17g,", c.amplitude);
    os << buf;
    std::snprintf(buf, sizeof buf, "%.17g,", c.sup_dist);
    os << buf;
    std::snprintf(buf, sizeof buf, "%.17g\n", c.l2_dist);
    os << buf;
  }
}

const char* side_name(Side s) { return s == Side::kRight ? "right" : "left"; }

Envelope empirical_envelope(const std::vector<AdaptedPoint>& pts, double T, Side side, int bins, double inner,
                            double outer, double radius) {
  if (bins < 1 || !(inner > 0) || !(outer > inner)) throw ConfigError("bad envelope bins");
  Envelope env;
  env.side = side;
  env.horizon = T;
  const double r = std::log(outer / inner) / bins;
  std::vector<std::vector<const AdaptedPoint*>> bucket(bins);
  int on_side = 0;
  for (const auto& p : pts) {
    double d = side == Side::kRight ? p.x1 - T : T - p.x1;
    if (!(d > 0) || p.radius > radius) continue;
    ++on_side;
    if (d < inner || d >= outer) continue;
    int b = std::min(bins - 1, static_cast<int>(std::log(d / inner) / r));
    bucket[b].push_back(&p);
  }
  if (on_side == 0) throw NumericalError(std::string("no points on the ") + side_name(side) + " side");
  if (on_side < 5 * bins) throw NumericalError("insufficient data for the envelope");
  for (int b = 0; b < bins; ++b) {
    if (bucket[b].empty()) continue;
    const AdaptedPoint* best = bucket[b][0];
    std::vector<double> mag;
    for (const auto* p : bucket[b]) {
      if (p->xn < best->xn) best = p;
      mag.push_back(std::abs(p->xn));
    }
    // noise floor: 1st percentile of |xn| in the bin
    std::sort(mag.begin(), mag.end());
    double floor = mag[static_cast<std::size_t>(0.01 * (mag.size() - 1))];
    double v = best->xn;
    if (v <= 0) {
      v = floor;
      ++env.clamped;
    }
    env.lo.push_back(inner * std::exp(r * b));
    env.hi.push_back(inner * std::exp(r * (b + 1)));
    env.x1.push_back(best->x1);
    env.xn.push_back(v);
    env.raw_min.push_back(best->xn);
    env.counts.push_back(static_cast<int>(bucket[b].size()));
  }
  return env;
}

std::array<double, 3> linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw NumericalError("degenerate regression");
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd b(n);
  for (std::size_t i = 0; i < n; ++i) {
    A(i, 0) = x[i];
    A(i, 1) = 1.0;
    b[i] = y[i];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.singularValues()[1] <= 1e-12 * svd.singularValues()[0]) throw NumericalError("degenerate regression");
  Eigen::Vector2d s = svd.solve(b);
  double rms = std::sqrt((A * s - b).squaredNorm() / n);
  return {s[0], s[1], rms};
}

ContactFit fit_contact(const Envelope& env) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < env.x1.size(); ++i) {
    if (!(env.xn[i] > 0)) continue;
    lx.push_back(std::log(std::abs(env.x1[i] - env.horizon)));
    ly.push_back(std::log(env.xn[i]));
  }
  if (lx.size() < 8) throw NumericalError("contact fit needs at least 8 positive envelope bins");
  auto f = linear_fit(lx, ly);
  ContactFit c;
  c.side = env.side;
  c.exponent = f[0];
  c.coefficient = std::exp(f[1]);
  c.residual = f[2];
  c.bins = static_cast<int>(lx.size());
  char buf[128];
  std::snprintf(buf, sizeof buf, "%d log bins of |x1-T| in [%.6g, %.6g], %d clamped", c.bins, env.lo.front(),
                env.hi.back(), env.clamped);
  c.bin_description = buf;
  return c;
}

nlohmann::json ContactFit::to_json() const {
  return {{"side", side_name(side)}, {"exponent", exponent}, {"coefficient", coefficient},
          {"residual", residual},    {"bins", bins},         {"bin_description", bin_description}};
}

}  // namespace abnormal
