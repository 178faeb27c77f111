#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "abnormal/geometry.hpp"
#include "abnormal/system.hpp"
#include "json.hpp"

namespace abnormal {

// x' = a_k X + b_k Y, (a_k, b_k) constant on each of the uniform steps; RK4 with `substeps` per step.
// Lanes run in blocks of 64 through the batched expression evaluator.
Eigen::MatrixXd integrate_lanes(const ControlSystem& sys, const Eigen::VectorXd& x0, double T,
                                const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b,
                                int substeps = 1);
// one lane through ControlSystem::rhs, no batching
Eigen::VectorXd integrate_single(const ControlSystem& sys, const Eigen::VectorXd& x0, double T,
                                 const std::vector<double>& a, const std::vector<double>& b, int substeps = 1);

enum class CloudCase { kAffine, kSR };
enum class Family { kPiecewise, kBump, kKernel, kSpeed };
const char* family_name(Family f);

struct ControlDescriptor {
  Family family = Family::kPiecewise;
  double amplitude = 0.0;  // fraction of the bound actually used
  double sup_dist = 0.0;   // sup |(a,b) - (1,0)|
  double l2_dist = 0.0;
};

struct SamplerOptions {
  int steps = 512;  // control pieces = RK4 steps
  int threads = 1;
  bool kernel_family = true;
  int reparam_checks = 100;  // SR only
};

struct SampleCloud {
  CloudCase cloud_case = CloudCase::kAffine;
  double horizon = 0.0;
  double bound = 0.0;  // eta or alpha
  int steps = 0;
  std::uint64_t seed = 0;
  Eigen::MatrixXd states;  // n x N end-points
  std::vector<ControlDescriptor> controls;
  bool kernel_family = false;
  double max_constraint_excess = 0.0;
  // SR reparametrization s' = v, w = u/v re-integrated as an affine system
  int reparam_checked = 0;
  double reparam_max_error = 0.0;
  double reparam_max_w = 0.0;  // sup |w|, should not exceed alpha/(1-alpha)
  double reparam_max_s = 0.0;  // reparametrized horizon, <= T

  int size() const { return static_cast<int>(controls.size()); }
};

SampleCloud sample_affine(const ControlSystem& sys, const Eigen::VectorXd& x0, double T, double eta, int N,
                          std::uint64_t seed, const SamplerOptions& opt = {});
SampleCloud sample_sr(const ControlSystem& sys, const Eigen::VectorXd& x0, double T, double alpha, int N,
                      std::uint64_t seed, const SamplerOptions& opt = {});

struct AdaptedPoint {
  double x1 = 0.0, xn = 0.0;
  double radius = 0.0;  // norm of all adapted coordinates of x - gamma(T), x1 shifted by T
};
struct AdaptedFrame {
  double horizon = 0.0;
  Eigen::VectorXd origin;  // gamma(0)
  Eigen::VectorXd base;    // gamma(T)
  Eigen::MatrixXd dual;  // rows: e1*, cone duals, p
  AdaptedPoint project(const Eigen::VectorXd& x) const;
};
AdaptedFrame adapted_frame(const TrajectoryData& traj, const ControlSystem& sys);
std::vector<AdaptedPoint> adapted_projection(const SampleCloud& cloud, const AdaptedFrame& frame);

const char* cloud_case_name(CloudCase c);
void write_cloud_csv(std::ostream& os, const SampleCloud& cloud, const std::vector<AdaptedPoint>& pts,
                     bool header = true);

enum class Side { kRight, kLeft };
const char* side_name(Side s);

struct Envelope {
  Side side = Side::kRight;
  double horizon = 0.0;
  std::vector<double> lo, hi;    // |x1 - T| bin edges
  std::vector<double> x1, xn;    // argmin point of each kept bin, xn clamped by the floor
  std::vector<double> raw_min;   // unclamped minimum
  std::vector<int> counts;
  int clamped = 0;
};
// log-spaced bins of |x1 - T| over [inner, outer]
Envelope empirical_envelope(const std::vector<AdaptedPoint>& pts, double T, Side side, int bins, double inner,
                            double outer, double radius = INFINITY);

struct ContactFit {
  Side side = Side::kRight;
  double exponent = 0.0, coefficient = 0.0, residual = 0.0;
  int bins = 0;
  std::string bin_description;
  nlohmann::json to_json() const;
};
ContactFit fit_contact(const Envelope& env);

struct SectorPoint {
  double epsilon = 0.0;
  Eigen::VectorXd state;
  double x1 = 0.0, xn = 0.0;
  double constraint_error = 0.0;  // max |(v+dv)^2 + du^2 - 1| on the window
  double sup_dist = 0.0, l2_dist = 0.0;  // to the reference control (1, 0)
  double l2_perturbation = 0.0;          // |(dv, du)| in L2, against the flipped control
};
SectorPoint sector_perturbation(const ControlSystem& sys, const AdaptedFrame& frame, double T, double eps);

struct SectorSweep {
  std::vector<SectorPoint> points;
  double slope = 0.0, residual = 0.0;
  nlohmann::json to_json() const;
};
SectorSweep sector_sweep(const ControlSystem& sys, const AdaptedFrame& frame, double T, std::vector<double> eps);

// least squares y = c + k x; returns {k, c, rms residual}
std::array<double, 3> linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace abnormal
