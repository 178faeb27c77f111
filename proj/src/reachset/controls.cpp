#include "controls.hpp"

#include <algorithm>
#include <cmath>

namespace abnormal {

const char* family_name(Family f) {
  switch (f) {
    case Family::kPiecewise: return "piecewise";
    case Family::kBump: return "bump";
    case Family::kKernel: return "kernel";
    case Family::kSpeed: return "speed";
  }
  return "?";
}

namespace detail {

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

// values in [-1, 1], constant between random switching steps
std::vector<double> piecewise_unit(std::mt19937_64& rng, int steps) {
  const int K = uniform_int(rng, 1, std::min(16, steps));
  std::vector<int> cuts;
  while (static_cast<int>(cuts.size()) < K - 1) {
    int c = uniform_int(rng, 1, steps - 1);
    if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(steps);
  std::vector<double> out(steps);
  int st = 0;
  for (int c : cuts) {
    double v = uniform(rng, 0, 1) < 0.5 ? (uniform(rng, 0, 1) < 0.5 ? -1.0 : 1.0) : uniform(rng, -1, 1);
    for (; st < c; ++st) out[st] = v;
  }
  return out;
}

// sum of 1..3 compact bumps, |.| <= 1
std::vector<double> bumps_unit(std::mt19937_64& rng, int steps, double T) {
  const int m = uniform_int(rng, 1, 3);
  std::vector<double> c(m), t0(m), w(m);
  double norm = 0;
  for (int j = 0; j < m; ++j) {
    c[j] = uniform(rng, -1, 1);
    t0[j] = uniform(rng, 0, T);
    w[j] = uniform(rng, T / 32, T / 2);
    norm += std::abs(c[j]);
  }
  std::vector<double> out(steps, 0.0);
  for (int st = 0; st < steps; ++st) {
    double t = (st + 0.5) * T / steps;
    for (int j = 0; j < m; ++j) {
      double s = (t - t0[j]) / w[j];
      if (std::abs(s) < 1) out[st] += c[j] * std::exp(1 - 1 / (1 - s * s));
    }
    out[st] /= std::max(norm, 1e-300);
  }
  return out;
}

// contact-minimizer profile with its kicks spread over tau steps, |.| <= 1
std::vector<double> kernel_unit(std::mt19937_64& rng, int steps, double T, const KernelShape& k) {
  const int tau = uniform_int(rng, 1, std::max(1, steps / 4));
  const bool keep_end = uniform(rng, 0, 1) < 0.5;
  const double h = T / steps;
  std::vector<double> out(k.body);
  for (int st = 0; st < tau; ++st) {
    out[st] += k.kick_start / (tau * h);
    if (keep_end) out[steps - 1 - st] += k.kick_end / (tau * h);
  }
  double mx = 0;
  for (double v : out) mx = std::max(mx, std::abs(v));
  if (mx > 0)
    for (double& v : out) v /= mx;
  return out;
}

}  // namespace

LaneControl draw_affine(std::mt19937_64& rng, int steps, double T, double eta, const KernelShape* shape) {
  LaneControl c;
  double r = uniform(rng, 0, 1);
  std::vector<double> unit;
  if (shape && r < 0.5) {
    c.family = Family::kKernel;
    unit = kernel_unit(rng, steps, T, *shape);
    c.amplitude = 1 - 0.5 * std::pow(uniform(rng, 0, 1), 2);
  } else if (r < (shape ? 0.8 : 0.6)) {
    c.family = Family::kPiecewise;
    unit = piecewise_unit(rng, steps);
    c.amplitude = std::pow(uniform(rng, 0, 1), 2);
  } else {
    c.family = Family::kBump;
    unit = bumps_unit(rng, steps, T);
    c.amplitude = uniform(rng, 0, 1);
  }
  const double sign = uniform(rng, 0, 1) < 0.5 ? -1.0 : 1.0;
  c.b.resize(steps);
  for (int st = 0; st < steps; ++st) c.b[st] = sign * c.amplitude * eta * unit[st];
  return c;
}

LaneControl draw_sr(std::mt19937_64& rng, int steps, double T, double alpha, const KernelShape* shape) {
  LaneControl c;
  double r = uniform(rng, 0, 1);
  c.b.assign(steps, 0.0);
  c.a.assign(steps, 1.0);
  const double sign = uniform(rng, 0, 1) < 0.5 ? -1.0 : 1.0;
  if (r < 0.2) {
    c.family = Family::kSpeed;
    auto p = piecewise_unit(rng, steps);
    c.amplitude = uniform(rng, 0, 1);
    for (int st = 0; st < steps; ++st) c.a[st] = 1 - c.amplitude * alpha * 0.5 * (1 + p[st]);
    return c;
  }
  if (r < 0.5 || (!shape && r < 0.75)) {
    c.family = Family::kPiecewise;
    auto pu = piecewise_unit(rng, steps), pv = piecewise_unit(rng, steps);
    c.amplitude = std::pow(uniform(rng, 0, 1), 2);
    for (int st = 0; st < steps; ++st) {
      c.b[st] = sign * c.amplitude * alpha * pu[st];
      c.a[st] = std::min(1 - c.amplitude * alpha * 0.5 * (1 + pv[st]), std::sqrt(1 - c.b[st] * c.b[st]));
    }
    return c;
  }
  std::vector<double> unit;
  if (shape && r >= 0.7) {
    c.family = Family::kKernel;
    unit = kernel_unit(rng, steps, T, *shape);
    c.amplitude = 1 - 0.5 * std::pow(uniform(rng, 0, 1), 2);
  } else {
    c.family = Family::kBump;
    unit = bumps_unit(rng, steps, T);
    c.amplitude = uniform(rng, 0, 1);
  }
  for (int st = 0; st < steps; ++st) {
    c.b[st] = sign * c.amplitude * alpha * unit[st];
    c.a[st] = std::sqrt(1 - c.b[st] * c.b[st]);
  }
  return c;
}

double constraint_excess(const LaneControl& c, CloudCase cc, double bound) {
  double e = -INFINITY;
  for (std::size_t st = 0; st < c.b.size(); ++st) {
    const double u = c.b[st];
    if (cc == CloudCase::kAffine) {
      e = std::max(e, std::abs(u) - bound);
    } else {
      const double v = c.a[st];
      e = std::max({e, v * v + u * u - 1, (1 - bound) - v, v - 1, std::abs(u) - bound});
    }
  }
  return e;
}

}  // namespace detail
}  // namespace abnormal
