#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "abnormal/jsonio.hpp"

namespace abnormal {

struct ConjugateTimeResult {
  std::string mode;
  std::string status = "none";  // "found" or "none"
  double bracket_low = 0.0;
  double bracket_high = 0.0;
  double scan_max = 0.0;
  bool non_monotone = false;                     // pre-scan saw the eigenvalue increase
  std::vector<std::pair<double, double>> scan;  // (T, smallest eigenvalue)

  bool found() const { return status == "found"; }
  double value() const { return 0.5 * (bracket_low + bracket_high); }
  nlohmann::json to_json() const;
};

// Pre-scan of `prescan` horizons, then bisection on the sign of lambda(T).
// lambda(T) > 0 means no conjugate time up to T.
template <class F>
ConjugateTimeResult bracket_sign_change(F&& lambda, const std::string& mode, double T_max, double tol_T,
                                        int prescan = 32, double slack = 1e-9) {
  ConjugateTimeResult r;
  r.mode = mode;
  r.scan_max = T_max;
  double prev_T = 0.0, prev_l = 0.0;
  for (int i = 1; i <= prescan; ++i) {
    double T = T_max * i / prescan;
    double l = lambda(T);
    r.scan.emplace_back(T, l);
    if (i > 1 && l > prev_l + slack * std::max(1.0, std::abs(prev_l))) r.non_monotone = true;
    if (!(l > 0.0)) {
      double lo = prev_T, hi = T;
      while (hi - lo > tol_T) {
        double mid = 0.5 * (lo + hi);
        if (lambda(mid) > 0.0)
          lo = mid;
        else
          hi = mid;
      }
      r.status = "found";
      r.bracket_low = lo;
      r.bracket_high = hi;
      return r;
    }
    prev_T = T;
    prev_l = l;
  }
  r.bracket_low = T_max;
  r.bracket_high = T_max;
  return r;
}

}  // namespace abnormal
