#pragma once

#include <random>
#include <vector>

#include "abnormal/reachset.hpp"

namespace abnormal::detail {

struct KernelShape {
  std::vector<double> body;  // distributed part at step midpoints
  double kick_start = 0.0, kick_end = 0.0;
};

// per-step multipliers of X (a, empty = 1) and Y (b)
struct LaneControl {
  Family family = Family::kPiecewise;
  double amplitude = 0.0;
  std::vector<double> a, b;
};

LaneControl draw_affine(std::mt19937_64& rng, int steps, double T, double eta, const KernelShape* shape);
LaneControl draw_sr(std::mt19937_64& rng, int steps, double T, double alpha, const KernelShape* shape);
// largest violation of the pointwise constraint, <= 0 when satisfied
double constraint_excess(const LaneControl& c, CloudCase cc, double bound);

}  // namespace abnormal::detail
