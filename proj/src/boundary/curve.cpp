#include <cmath>
#include <ostream>

#include "abnormal/boundary.hpp"
#include "abnormal/errors.hpp"
#include "abnormal/jsonio.hpp"

namespace abnormal {

const char* case_name(CurveCase c) { return c == CurveCase::kAffine ? "AFFINE" : "SR"; }

double BoundaryCurve::value(double x) const {
  if (curve_case == CurveCase::kSR && x <= horizon) return 0.0;
  return A * (x - horizon) * (x - horizon);
}

void BoundaryCurve::write_csv(std::ostream& os) const {
  os << "x1,xn\n";
  char buf[64];
  for (int i = 0; i < x1.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", x1[i], xn[i]);
    os << buf;
  }
}

nlohmann::json BoundaryCurve::metadata() const {
  return {{"T", horizon}, {"A_T", A}, {"case", case_name(curve_case)}};
}

BoundaryCurve boundary_curve(double A, double T, double x1_lo, double x1_hi, CurveCase c, int points) {
  if (!(x1_lo <= T && T <= x1_hi)) throw ConfigError("curve window must contain T");
  if (points < 2) throw ConfigError("curve needs at least two points");
  BoundaryCurve b;
  b.horizon = T;
  b.A = A;
  b.curve_case = c;
  b.x1.resize(points);
  b.xn.resize(points);
  for (int i = 0; i < points; ++i) {
    double x = x1_lo + (x1_hi - x1_lo) * i / (points - 1);
    b.x1[i] = x;
    b.xn[i] = b.value(x);
  }
  return b;
}

MartinetClosedForm martinet_closed_form(double alpha, double T) {
  if (alpha == 0.0) throw AssumptionError("martinet closed form needs alpha != 0");
  if (!(T > 0)) throw ConfigError("horizon must be positive");
  MartinetClosedForm m;
  m.A_T = 1.0 / (2 * T * alpha * alpha);
  m.branch2 = "x <= T: z ~ (1/6)(1+O(T)) (x-T)^3";
  return m;
}

}  // namespace abnormal
