#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>

#include "abnormal/operators.hpp"
#include "abnormal/secondvar.hpp"
#include "json.hpp"

namespace abnormal {

struct KernelSolution {
  double horizon = 0.0;
  int grid = 0;
  EndData data;
  Eigen::VectorXd J;     // nodal values on the full grid
  double residual = 0.0;  // |K u + f| / max(|f|, tiny)
  double energy = 0.0;    // discrete Q1(J)
};

// minimizer of the discrete Q1 under the end data, i.e. D1 J = 0 inside
KernelSolution solve_kernel_bvp(const CoefficientField& c, double T, const EndData& data, int grid = 2000);
// J(0..n-3)(0) = 0, J^(k)(T) = delta_0^k
EndData contact_data(const CoefficientField& c, int i = 0);
double compute_A(const CoefficientField& c, double T, int grid = 2000);
Eigen::MatrixXd gram_matrix(const CoefficientField& c, double T, int grid = 2000);

enum class CurveCase { kAffine, kSR };
const char* case_name(CurveCase c);

struct BoundaryCurve {
  double horizon = 0.0;
  double A = 0.0;
  CurveCase curve_case = CurveCase::kAffine;
  Eigen::VectorXd x1, xn;
  Eigen::VectorXd J;  // may be empty

  double value(double x1) const;
  void write_csv(std::ostream& os) const;
  nlohmann::json metadata() const;
};

BoundaryCurve boundary_curve(double A, double T, double x1_lo, double x1_hi, CurveCase c, int points = 201);

struct MartinetClosedForm {
  double A_T = 0.0;
  int branch2_exponent = 3;
  double branch2_coefficient = 1.0 / 6;
  std::string branch2;
};
MartinetClosedForm martinet_closed_form(double alpha, double T);

// n = 3: constant b with Q(v) = 2 int b (x1')^2, read off the Hessian along v
double calibrate_coefficient(const QuadraticFormData& q, const Eigen::VectorXd& v);
// control in the FREE kernel minimizing Q(v)/2 at unit x1 displacement
Eigen::VectorXd contact_minimizer(const QuadraticFormData& q);
// that minimum, the contact coefficient in adapted coordinates
double direct_contact_coefficient(const QuadraticFormData& q);

}  // namespace abnormal
