#include <algorithm>
#include <cmath>

#include "abnormal/errors.hpp"
#include "abnormal/operators.hpp"

namespace abnormal {

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = z;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1);
      double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = z;
    w[i] = 2 / ((1 - z * z) * dp * dp);
  }
}

// Fornberg: weights c[k][j] for the k-th derivative at x0 from nodes x
std::vector<std::vector<double>> fornberg(double x0, const std::vector<double>& x, int m) {
  const int n = static_cast<int>(x.size()) - 1;
  std::vector<std::vector<double>> c(m + 1, std::vector<double>(n + 1, 0.0));
  double c1 = 1, c4 = x[0] - x0;
  c[0][0] = 1;
  for (int i = 1; i <= n; ++i) {
    int mn = std::min(i, m);
    double c2 = 1, c5 = c4;
    c4 = x[i] - x0;
    for (int j = 0; j < i; ++j) {
      double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}

}  // namespace

SampledProfile SampledProfile::from_function(const std::function<double(double, int)>& f, int max_order, double T,
                                             int panels, int points) {
  if (!(T > 0) || panels < 1 || points < 1 || max_order < 0) throw NumericalError("bad profile sampling request");
  std::vector<double> gx, gw;
  gauss_legendre(points, gx, gw);
  SampledProfile p;
  p.horizon = T;
  const int M = panels * points;
  p.t.resize(M);
  p.w.resize(M);
  const double h = T / panels;
  for (int k = 0; k < panels; ++k)
    for (int i = 0; i < points; ++i) {
      p.t[k * points + i] = h * (k + 0.5 * (gx[i] + 1));
      p.w[k * points + i] = 0.5 * h * gw[i];
    }
  for (int o = 0; o <= max_order; ++o) {
    Eigen::VectorXd v(M);
    for (int i = 0; i < M; ++i) v[i] = f(p.t[i], o);
    p.d.push_back(v);
  }
  return p;
}

SampledProfile SampledProfile::from_samples(const Eigen::VectorXd& values, double T, int max_order) {
  const int N = static_cast<int>(values.size()) - 1;
  const int s = max_order + 4;  // stencil width
  if (N + 1 < std::max(s + 2, 4 * (max_order + 1)))
    throw NumericalError("profile too coarse for derivatives of order " + std::to_string(max_order));
  const double h = T / N;
  SampledProfile p;
  p.horizon = T;
  p.t.resize(N + 1);
  p.w.resize(N + 1);
  for (int i = 0; i <= N; ++i) {
    p.t[i] = h * i;
    if (N % 2 == 0)
      p.w[i] = h / 3 * (i == 0 || i == N ? 1 : (i % 2 ? 4 : 2));
    else
      p.w[i] = (i == 0 || i == N) ? h / 2 : h;
  }
  p.d.assign(max_order + 1, Eigen::VectorXd::Zero(N + 1));
  for (int i = 0; i <= N; ++i) {
    int lo = std::clamp(i - s / 2, 0, N + 1 - s);
    std::vector<double> x(s);
    for (int j = 0; j < s; ++j) x[j] = (lo + j - i) * h;
    auto c = fornberg(0.0, x, max_order);
    for (int k = 0; k <= max_order; ++k) {
      double v = 0;
      for (int j = 0; j < s; ++j) v += c[k][j] * values[lo + j];
      p.d[k][i] = v;
    }
  }
  return p;
}

SampledProfile SampledProfile::derivative() const {
  if (d.size() < 2) throw NumericalError("profile has no derivative samples");
  SampledProfile p = *this;
  p.d.erase(p.d.begin());
  return p;
}

double quadratic_value(const CoefficientField& c, const SampledProfile& xi, QuadraticKind which) {
  const int r = c.size();
  const int off = which == QuadraticKind::kQ1 ? 1 : 0;
  if (xi.max_order() < off + r - 1) throw NumericalError("profile too coarse: missing derivative orders");
  double s = 0;
  for (int i = 0; i < xi.t.size(); ++i) {
    Eigen::MatrixXd b = c.at(xi.t[i]);
    double q = 0;
    for (int a = 0; a < r; ++a)
      for (int e = 0; e < r; ++e) q += b(a, e) * xi.d[a + off][i] * xi.d[e + off][i];
    s += xi.w[i] * q;
  }
  return s;
}

}  // namespace abnormal
