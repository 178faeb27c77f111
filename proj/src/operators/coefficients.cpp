#include <algorithm>
#include <cmath>
#include <limits>

#include "abnormal/errors.hpp"
#include "abnormal/operators.hpp"

namespace abnormal {

CoefficientField CoefficientField::constant(const Eigen::MatrixXd& b) {
  if (b.rows() < 1 || b.rows() != b.cols()) throw ConfigError("coefficient matrix must be square and non-empty");
  CoefficientField c;
  c.size_ = static_cast<int>(b.rows());
  c.constant_ = b;
  return c;
}

CoefficientField CoefficientField::table(std::vector<double> t, std::vector<Eigen::MatrixXd> b) {
  if (t.size() < 2 || t.size() != b.size()) throw ConfigError("coefficient table needs >= 2 rows");
  if (t[0] != 0.0) throw ConfigError("coefficient table must start at t = 0");
  for (std::size_t k = 1; k < t.size(); ++k)
    if (!(t[k] > t[k - 1])) throw ConfigError("coefficient table times must increase");
  CoefficientField c;
  c.size_ = static_cast<int>(b[0].rows());
  for (const auto& m : b)
    if (m.rows() != c.size_ || m.cols() != c.size_) throw ConfigError("coefficient table rows disagree in size");
  c.times_ = std::move(t);
  c.samples_ = std::move(b);
  return c;
}

double CoefficientField::table_end() const {
  return is_constant() ? std::numeric_limits<double>::infinity() : times_.back();
}

Eigen::MatrixXd CoefficientField::at(double t) const {
  if (is_constant()) return constant_;
  if (t < 0 || t > times_.back() * (1 + 1e-12)) throw ConfigError("coefficient table queried outside its range");
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t k = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
  if (k >= times_.size() - 1) return samples_.back();
  double s = (t - times_[k]) / (times_[k + 1] - times_[k]);
  return (1 - s) * samples_[k] + s * samples_[k + 1];
}

CoefficientField CoefficientField::scaled(double s) const {
  CoefficientField c = *this;
  c.constant_ *= s;
  for (auto& m : c.samples_) m *= s;
  return c;
}

void CoefficientField::validate(double T) const {
  if (!(T > 0)) throw ConfigError("horizon must be positive");
  if (T > table_end() * (1 + 1e-12)) throw ConfigError("horizon beyond the coefficient table");
  const int S = 256;
  for (int k = 0; k <= S; ++k) {
    double t = T * k / S;
    Eigen::MatrixXd b = at(t);
    if ((b - b.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, b.cwiseAbs().maxCoeff()))
      throw ConfigError("coefficients are not symmetric");
    if (!(b(size_ - 1, size_ - 1) > 0))
      throw AssumptionError("top coefficient is not positive at t=" + std::to_string(t));
  }
}

const char* operator_name(OperatorKind k) { return k == OperatorKind::kD1 ? "D1" : "D2"; }

}  // namespace abnormal
