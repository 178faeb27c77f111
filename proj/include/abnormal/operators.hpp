#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "abnormal/conjugate.hpp"

namespace abnormal {

// Symmetric b_ij(t), i,j = 1..n-2. q1 = sum b_ij xi^(i) xi^(j), q2(eta) = sum b_ij eta^(i-1) eta^(j-1).
class CoefficientField {
 public:
  static CoefficientField constant(const Eigen::MatrixXd& b);
  // piecewise-linear interpolation of samples (t_k, b(t_k)); t strictly increasing from 0
  static CoefficientField table(std::vector<double> t, std::vector<Eigen::MatrixXd> b);

  int dimension() const { return size_ + 2; }
  int size() const { return size_; }
  bool is_constant() const { return times_.empty(); }
  double table_end() const;  // +inf for constants
  Eigen::MatrixXd at(double t) const;
  CoefficientField scaled(double s) const;
  // symmetry and positivity of the top coefficient on [0, T]
  void validate(double T) const;

 private:
  int size_ = 0;
  Eigen::MatrixXd constant_;
  std::vector<double> times_;
  std::vector<Eigen::MatrixXd> samples_;
};

enum class QuadraticKind { kQ1, kQ2 };
enum class OperatorKind { kD1, kD2 };
const char* operator_name(OperatorKind k);

// Derivative samples xi^(k)(t_i), k = 0..max_order, on a quadrature grid.
struct SampledProfile {
  double horizon = 0.0;
  Eigen::VectorXd t, w;
  std::vector<Eigen::VectorXd> d;

  int max_order() const { return static_cast<int>(d.size()) - 1; }
  // f(t, k) = k-th derivative; composite Gauss-Legendre
  static SampledProfile from_function(const std::function<double(double, int)>& f, int max_order, double T,
                                      int panels = 64, int points = 6);
  // uniform samples on [0, T]; derivatives from local interpolating stencils
  static SampledProfile from_samples(const Eigen::VectorXd& values, double T, int max_order);
  SampledProfile derivative() const;
};

double quadratic_value(const CoefficientField& c, const SampledProfile& xi, QuadraticKind which);

// symmetric band matrix, upper storage in LAPACK layout
struct BandMatrix {
  int n = 0, kd = 0;
  std::vector<double> ab;  // (kd+1) x n column-major

  BandMatrix() = default;
  BandMatrix(int n_, int kd_) : n(n_), kd(kd_), ab(static_cast<std::size_t>(kd_ + 1) * n_, 0.0) {}
  double& upper(int i, int j) { return ab[static_cast<std::size_t>(kd + i - j) + static_cast<std::size_t>(j) * (kd + 1)]; }
  double get(int i, int j) const;
  void add(int i, int j, double v);  // symmetric entry (i,j) and (j,i)
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd dense() const;
};

// end data: derivatives 0..r-1 at t = 0 and at t = T
struct EndData {
  Eigen::VectorXd left, right;
};

// Finite-difference energy of q1 or q2 with strong end conditions imposed through reflected ghost nodes.
class DiscreteForm {
 public:
  DiscreteForm(const CoefficientField& c, QuadraticKind which, double T, int N);

  int grid() const { return N_; }
  int conditions() const { return r_; }
  int top_order() const { return d_; }
  double step() const { return h_; }
  const std::vector<int>& unknown_nodes() const { return nodes_; }
  // full nodal vector (N+1 values) -> unknown vector and back
  Eigen::VectorXd restrict(const Eigen::VectorXd& nodal) const;
  Eigen::VectorXd extend(const Eigen::VectorXd& u, const EndData& data) const;

  double energy(const Eigen::VectorXd& nodal, const EndData& data) const;
  // E(u) = u'Ku + 2 f'u + c
  void quadratic(const EndData& data, BandMatrix& K, Eigen::VectorXd& f, double& c) const;
  EndData zero_data() const;

 private:
  struct Affine {
    std::vector<std::pair<int, double>> terms;  // unknown index, coefficient
    double constant = 0.0;
  };
  Affine node(int j, const EndData& data) const;
  Affine derivative(int p, int k, const EndData& data) const;  // order k at quadrature point p

  QuadraticKind which_;
  int N_, r_, d_, offset_;
  double T_, h_;
  std::vector<int> nodes_;
  std::vector<int> index_;  // node -> unknown index or -1
  std::vector<int> qpos_;   // quadrature positions in half steps
  std::vector<double> qw_;
  std::vector<Eigen::MatrixXd> qb_;  // coefficients at quadrature points
};

struct OperatorMatrix {
  OperatorKind which = OperatorKind::kD1;
  double horizon = 0.0;
  int grid = 0;
  BandMatrix stiffness;
  Eigen::VectorXd mass;  // lumped L2 quadrature weights on the unknown nodes
  std::vector<int> unknown_nodes;
  std::string boundary;

  int dof() const { return stiffness.n; }
};

OperatorMatrix assemble(const CoefficientField& c, OperatorKind which, double T, int grid);
// x'Kx for a full nodal vector satisfying homogeneous end conditions
double pairing(const OperatorMatrix& op, const Eigen::VectorXd& nodal);

struct Spectrum {
  std::vector<double> values;
  std::vector<Eigen::VectorXd> profiles;  // nodal values on the full grid, mass-orthonormal
};
// profiles by shifted inverse iteration on the band; values only when with_profiles is false
Spectrum spectrum(const OperatorMatrix& op, int k, bool with_profiles = true);

ConjugateTimeResult operator_conjugate_time(const CoefficientField& c, OperatorKind which, double T_max, double tol_T,
                                            int grid, int prescan = 32);

struct InequalityCheck {
  double lambda1 = 0.0, mu1 = 0.0, bound = 0.0;
  bool verdict = false;
};
InequalityCheck eig_inequality_check(const CoefficientField& c, double T, int grid);

}  // namespace abnormal
