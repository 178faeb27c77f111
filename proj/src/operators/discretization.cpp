#include <cmath>
#include <map>

#include "abnormal/errors.hpp"
#include "abnormal/operators.hpp"

namespace abnormal {

double BandMatrix::get(int i, int j) const {
  if (i > j) std::swap(i, j);
  if (j - i > kd) return 0.0;
  return ab[static_cast<std::size_t>(kd + i - j) + static_cast<std::size_t>(j) * (kd + 1)];
}

void BandMatrix::add(int i, int j, double v) {
  if (i > j) std::swap(i, j);
  if (j - i > kd) throw NumericalError("band overflow");
  upper(i, j) += v;
}

Eigen::VectorXd BandMatrix::apply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < n; ++j)
    for (int i = std::max(0, j - kd); i <= j; ++i) {
      double a = get(i, j);
      y[i] += a * x[j];
      if (i != j) y[j] += a * x[i];
    }
  return y;
}

Eigen::MatrixXd BandMatrix::dense() const {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = std::max(0, j - kd); i <= j; ++i) A(i, j) = A(j, i) = get(i, j);
  return A;
}

namespace {

double binom(int n, int k) {
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Taylor polynomial from end data
double taylor(const Eigen::VectorXd& a, double tau) {
  double s = 0, term = 1;
  for (int k = 0; k < a.size(); ++k) {
    s += a[k] * term;
    term *= tau / (k + 1);
  }
  return s;
}

}  // namespace

DiscreteForm::DiscreteForm(const CoefficientField& c, QuadraticKind which, double T, int N)
    : which_(which), N_(N), T_(T) {
  const int rr = c.size();
  offset_ = which == QuadraticKind::kQ1 ? 1 : 0;
  d_ = offset_ + rr - 1;
  r_ = d_;
  if (N < 2 * d_ + 4) throw NumericalError("operator grid too small");
  h_ = T / N;
  index_.assign(N + 1, -1);
  for (int j = 0; j <= N; ++j)
    if (r_ == 0 || (j > 0 && j < N)) {
      index_[j] = static_cast<int>(nodes_.size());
      nodes_.push_back(j);
    }
  if (d_ % 2 == 0) {
    for (int j = 0; j <= N; ++j) {
      qpos_.push_back(2 * j);
      qw_.push_back(j == 0 || j == N ? h_ / 2 : h_);
    }
  } else {
    for (int j = 0; j < N; ++j) {
      qpos_.push_back(2 * j + 1);
      qw_.push_back(h_);
    }
  }
  for (int P : qpos_) qb_.push_back(c.at(0.5 * P * h_));
}

EndData DiscreteForm::zero_data() const { return {Eigen::VectorXd::Zero(r_), Eigen::VectorXd::Zero(r_)}; }

DiscreteForm::Affine DiscreteForm::node(int j, const EndData& data) const {
  const double s = r_ % 2 ? -1.0 : 1.0;
  if (j < 0) {
    // reflect the deviation from the end Taylor polynomial
    int l = -j;
    Affine a = node(l, data);
    for (auto& t : a.terms) t.second *= s;
    a.constant = s * a.constant + taylor(data.left, -l * h_) - s * taylor(data.left, l * h_);
    return a;
  }
  if (j > N_) {
    int l = j - N_;
    Affine a = node(N_ - l, data);
    for (auto& t : a.terms) t.second *= s;
    a.constant = s * a.constant + taylor(data.right, l * h_) - s * taylor(data.right, -l * h_);
    return a;
  }
  Affine a;
  if (index_[j] >= 0)
    a.terms.emplace_back(index_[j], 1.0);
  else
    a.constant = j == 0 ? data.left[0] : data.right[0];
  return a;
}

DiscreteForm::Affine DiscreteForm::derivative(int p, int k, const EndData& data) const {
  const int P = qpos_[p];
  std::map<int, double> w;  // node -> weight
  auto central = [&](int pos, double scale) {
    for (int l = 0; l <= k; ++l) {
      int node2 = pos + k - 2 * l;
      w[node2 / 2] += scale * (l % 2 ? -1.0 : 1.0) * binom(k, l) / std::pow(h_, k);
    }
  };
  if ((P + k) % 2 == 0) {
    central(P, 1.0);
  } else {
    central(P - 1, 0.5);
    central(P + 1, 0.5);
  }
  Affine out;
  std::map<int, double> acc;
  for (const auto& [j, c] : w) {
    Affine a = node(j, data);
    out.constant += c * a.constant;
    for (const auto& t : a.terms) acc[t.first] += c * t.second;
  }
  for (const auto& [i, c] : acc)
    if (c != 0.0) out.terms.emplace_back(i, c);
  return out;
}

Eigen::VectorXd DiscreteForm::restrict(const Eigen::VectorXd& nodal) const {
  if (nodal.size() != N_ + 1) throw NumericalError("nodal vector size mismatch");
  Eigen::VectorXd u(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) u[i] = nodal[nodes_[i]];
  return u;
}

Eigen::VectorXd DiscreteForm::extend(const Eigen::VectorXd& u, const EndData& data) const {
  Eigen::VectorXd x(N_ + 1);
  for (int j = 0; j <= N_; ++j) x[j] = index_[j] >= 0 ? u[index_[j]] : (j == 0 ? data.left[0] : data.right[0]);
  return x;
}

double DiscreteForm::energy(const Eigen::VectorXd& nodal, const EndData& data) const {
  Eigen::VectorXd u = restrict(nodal);
  const int R = d_ - offset_ + 1;
  double E = 0;
  std::vector<double> v(R);
  for (std::size_t p = 0; p < qpos_.size(); ++p) {
    for (int a = 0; a < R; ++a) {
      Affine row = derivative(static_cast<int>(p), a + offset_, data);
      double s = row.constant;
      for (const auto& t : row.terms) s += t.second * u[t.first];
      v[a] = s;
    }
    double q = 0;
    for (int a = 0; a < R; ++a)
      for (int b = 0; b < R; ++b) q += qb_[p](a, b) * v[a] * v[b];
    E += qw_[p] * q;
  }
  return E;
}

void DiscreteForm::quadratic(const EndData& data, BandMatrix& K, Eigen::VectorXd& f, double& c) const {
  if (data.left.size() != r_ || data.right.size() != r_)
    throw NumericalError("end data must have " + std::to_string(r_) + " entries per end");
  const int R = d_ - offset_ + 1;
  const int n = static_cast<int>(nodes_.size());
  std::vector<std::vector<Affine>> rows(qpos_.size());
  int kd = 0;
  for (std::size_t p = 0; p < qpos_.size(); ++p) {
    int lo = n, hi = -1;
    for (int a = 0; a < R; ++a) {
      rows[p].push_back(derivative(static_cast<int>(p), a + offset_, data));
      for (const auto& t : rows[p].back().terms) lo = std::min(lo, t.first), hi = std::max(hi, t.first);
    }
    if (hi >= lo) kd = std::max(kd, hi - lo);
  }
  K = BandMatrix(n, kd);
  f = Eigen::VectorXd::Zero(n);
  c = 0;
  for (std::size_t p = 0; p < qpos_.size(); ++p) {
    const double w = qw_[p];
    for (int a = 0; a < R; ++a)
      for (int b = 0; b < R; ++b) {
        const double B = w * qb_[p](a, b);
        if (B == 0.0) continue;
        const Affine &ra = rows[p][a], &rb = rows[p][b];
        for (const auto& ta : ra.terms) {
          for (const auto& tb : rb.terms)
            if (ta.first <= tb.first) K.upper(ta.first, tb.first) += B * ta.second * tb.second;
          f[ta.first] += B * ta.second * rb.constant;
        }
        c += B * ra.constant * rb.constant;
      }
  }
}

OperatorMatrix assemble(const CoefficientField& c, OperatorKind which, double T, int grid) {
  c.validate(T);
  if (which == OperatorKind::kD2 && c.size() < 1) throw NumericalError("D2 needs n >= 3");
  DiscreteForm form(c, which == OperatorKind::kD1 ? QuadraticKind::kQ1 : QuadraticKind::kQ2, T, grid);
  OperatorMatrix op;
  op.which = which;
  op.horizon = T;
  op.grid = grid;
  Eigen::VectorXd f;
  double cc;
  form.quadratic(form.zero_data(), op.stiffness, f, cc);
  op.unknown_nodes = form.unknown_nodes();
  op.mass.resize(op.unknown_nodes.size());
  for (std::size_t i = 0; i < op.unknown_nodes.size(); ++i) {
    int j = op.unknown_nodes[i];
    op.mass[i] = (j == 0 || j == grid) ? form.step() / 2 : form.step();
  }
  const int r = form.conditions();
  op.boundary = r == 0 ? "none"
                       : "derivatives 0.." + std::to_string(r - 1) + " vanish at both ends";
  return op;
}

double pairing(const OperatorMatrix& op, const Eigen::VectorXd& nodal) {
  if (nodal.size() != op.grid + 1) throw NumericalError("nodal vector size mismatch");
  Eigen::VectorXd u(op.unknown_nodes.size());
  for (std::size_t i = 0; i < op.unknown_nodes.size(); ++i) u[i] = nodal[op.unknown_nodes[i]];
  return u.dot(op.stiffness.apply(u));
}

}  // namespace abnormal
