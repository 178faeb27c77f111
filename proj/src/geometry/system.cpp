#include <cstdio>

#include "abnormal/errors.hpp"
#include "abnormal/system.hpp"

namespace abnormal {

ControlSystem::ControlSystem(VectorFieldExpr X, VectorFieldExpr Y, std::string name)
    : X_(std::move(X)), Y_(std::move(Y)), name_(std::move(name)) {
  if (X_.dimension() != Y_.dimension() || X_.dimension() < 2)
    throw ParseError("X and Y must share a dimension >= 2", 0);
}

Eigen::VectorXd ControlSystem::drift(const Eigen::VectorXd& x) const {
  Eigen::VectorXd out(dimension());
  std::vector<double> scratch;
  X_.eval(x.data(), out.data(), scratch);
  return out;
}

Eigen::VectorXd ControlSystem::input(const Eigen::VectorXd& x) const {
  Eigen::VectorXd out(dimension());
  std::vector<double> scratch;
  Y_.eval(x.data(), out.data(), scratch);
  return out;
}

ControlSystem ControlSystem::with_scaled_input(double s) const {
  std::vector<Expr> c;
  for (const auto& e : Y_.components()) c.push_back(Expr::binary(Op::kMul, Expr::constant(s), e));
  return ControlSystem(X_, VectorFieldExpr(c, Y_.name()), name_);
}

namespace presets {

namespace {
std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return v < 0 ? "(" + std::string(buf) + ")" : std::string(buf);
}
}  // namespace

ControlSystem martinet(double alpha, double beta, double gamma) {
  std::string a = "(1+" + num(alpha) + "*x2)";
  std::string c = "(1+" + num(beta) + "*x1+" + num(gamma) + "*x2)";
  auto X = parse_field({"1/" + a, "0", "x2^2/(2*" + a + ")"}, 3, "X");
  auto Y = parse_field({"0", "1/" + c, "0"}, 3, "Y");
  return ControlSystem(X, Y, "martinet");
}

ControlSystem martinet_flat() {
  return ControlSystem(parse_field({"1", "0", "x2^2/2"}, 3, "X"), parse_field({"0", "1", "0"}, 3, "Y"),
                       "martinet-flat");
}

ControlSystem normal_form(const Eigen::MatrixXd& b) {
  const int r = static_cast<int>(b.rows());
  if (r < 1 || b.cols() != r) throw ConfigError("coefficient matrix must be square and non-empty");
  const int n = r + 2;
  std::vector<std::string> X(n, "0"), Y(n, "0");
  X[0] = n > 2 ? "1+x2" : "1";
  for (int i = 1; i < n - 2; ++i) X[i] = "x" + std::to_string(i + 2);
  std::string q;
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      double v = 0.5 * (b(i, j) + b(j, i));
      if (v == 0.0) continue;
      q += (q.empty() ? "" : "+") + num(v) + "*x" + std::to_string(i + 2) + "*x" + std::to_string(j + 2);
    }
  X[n - 1] = q.empty() ? "0" : q;
  Y[n - 2] = "1";
  return ControlSystem(parse_field(X, n, "X"), parse_field(Y, n, "Y"), "normal-form");
}

ControlSystem const4() {
  Eigen::MatrixXd b(2, 2);
  b << -1, 0, 0, 1;
  auto s = normal_form(b);
  return ControlSystem(s.X(), s.Y(), "const4");
}

ControlSystem chain_n3(double bv) {
  Eigen::MatrixXd b(1, 1);
  b << bv;
  auto s = normal_form(b);
  return ControlSystem(s.X(), s.Y(), "chain-n3");
}

}  // namespace presets
}  // namespace abnormal
