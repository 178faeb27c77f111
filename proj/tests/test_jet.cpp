#include <cmath>
#include <cstring>
#include <map>
#include <random>

#include "abnormal/errors.hpp"
#include "abnormal/jet.hpp"
#include "doctest.h"

using namespace abnormal;

TEST_CASE("martinet X jet read-off") {
  auto X = parse_field({"1", "0", "x2^2/2"}, 3);
  auto J = eval_jet(X, {0, 0, 0}, 2);
  const auto& sp = J[2].space();
  CHECK(sp.size() == 10);  // C(3+2, 2)
  for (int k = 0; k < sp.size(); ++k) {
    double expect = sp.multi_index(k) == std::vector<int>{0, 2, 0} ? 0.5 : 0.0;
    CHECK(J[2].coeff(k) == expect);
  }
  CHECK(J[0].value() == 1.0);
}

TEST_CASE("constant field has only degree-0 content") {
  auto F = parse_field({"2.5"}, 1);
  auto J = eval_jet(F, {0.7}, 3);
  CHECK(J[0].coeff(0) == 2.5);
  for (int k = 1; k < J[0].space().size(); ++k) CHECK(J[0].coeff(k) == 0.0);
}

TEST_CASE("x2^2/2 at (0,1,0): value and derivative against finite differences") {
  Program p({parse_expr("x2^2/2", 3)}, 3);
  auto J = eval_jet(p, {0, 1, 0}, 1);
  CHECK(J[0].value() == doctest::Approx(0.5));
  double h = 1e-6;
  double fd = (p.eval({0, 1 + h, 0})[0] - p.eval({0, 1 - h, 0})[0]) / (2 * h);
  CHECK(J[0].partial(1) == doctest::Approx(fd).epsilon(1e-8));
  CHECK(J[0].partial(1) == doctest::Approx(1.0));
}

TEST_CASE("graded order makes truncation a prefix") {
  auto s3 = JetSpace::get(4, 3);
  auto s1 = JetSpace::get(4, 1);
  for (int k = 0; k < s1->size(); ++k) CHECK(s1->multi_index(k) == s3->multi_index(k));
  CHECK(s3->size() == 35);
}

namespace {

using Poly = std::map<std::vector<int>, double>;

Poly random_poly(std::mt19937_64& rng, int n, int deg, int terms) {
  std::uniform_int_distribution<int> e(0, deg);
  std::uniform_real_distribution<double> c(-2, 2);
  Poly p;
  for (int t = 0; t < terms; ++t) {
    std::vector<int> a(n);
    int left = deg;
    for (int i = 0; i < n; ++i) {
      a[i] = std::min(left, e(rng) % (left + 1));
      left -= a[i];
    }
    p[a] += c(rng);
  }
  return p;
}

std::string poly_string(const Poly& p) {
  std::string s = "0";
  char buf[64];
  for (const auto& [a, c] : p) {
    std::snprintf(buf, sizeof buf, "+(%.17g)", c);
    s += buf;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i]) s += "*x" + std::to_string(i + 1) + "^" + std::to_string(a[i]);
  }
  return s;
}

Poly mul(const Poly& p, const Poly& q) {
  Poly r;
  for (const auto& [a, c] : p)
    for (const auto& [b, d] : q) {
      std::vector<int> s(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) s[i] = a[i] + b[i];
      r[s] += c * d;
    }
  return r;
}

double binom(int n, int k) {
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Taylor coefficient of (x - x0)^beta by binomial expansion of each monomial
double expand_coeff(const Poly& p, const std::vector<double>& x0, const std::vector<int>& beta) {
  double s = 0;
  for (const auto& [a, c] : p) {
    double t = c;
    for (std::size_t i = 0; i < a.size() && t != 0; ++i) {
      if (beta[i] > a[i]) {
        t = 0;
        break;
      }
      t *= binom(a[i], beta[i]) * std::pow(x0[i], a[i] - beta[i]);
    }
    s += t;
  }
  return s;
}

}  // namespace

TEST_CASE("property: jets are exact on polynomials up to the truncation order") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 3, m = 1 + trial % 4;
    Poly p = random_poly(rng, n, 2, 4), q = random_poly(rng, n, 2, 3), r = random_poly(rng, n, 3, 3);
    Poly full = mul(p, q);
    for (const auto& [a, c] : r) full[a] += c;
    std::string text = "(" + poly_string(p) + ")*(" + poly_string(q) + ")+" + poly_string(r);
    std::vector<double> x0(n);
    for (auto& v : x0) v = u(rng);
    auto J = eval_jet(Program({parse_expr(text, n)}, n), x0, m);
    const auto& sp = J[0].space();
    for (int k = 0; k < sp.size(); ++k) {
      double want = expand_coeff(full, x0, sp.multi_index(k));
      CHECK(J[0].coeff(k) == doctest::Approx(want).epsilon(1e-11).scale(1.0));
    }
  }
}

TEST_CASE("property: jet division inverts multiplication") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3, m = 3;
    Poly p = random_poly(rng, n, 2, 4), q = random_poly(rng, n, 2, 3);
    q[{0, 0, 0}] += 3.0;  // keep the divisor away from zero
    std::string a = "(" + poly_string(p) + ")", b = "(" + poly_string(q) + ")";
    std::vector<double> x0{u(rng), u(rng), u(rng)};
    auto lhs = eval_jet(Program({parse_expr("(" + a + "*" + b + ")/" + b, n)}, n), x0, m);
    auto rhs = eval_jet(Program({parse_expr(a, n)}, n), x0, m);
    for (int k = 0; k < lhs[0].space().size(); ++k)
      CHECK(lhs[0].coeff(k) == doctest::Approx(rhs[0].coeff(k)).epsilon(1e-11).scale(1.0));
  }
}

TEST_CASE("property: transcendental first derivatives match central differences") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  const char* exprs[] = {"sin(x1*x2)+cos(x3)", "exp(x1-x2^2)*x3", "sqrt(2+x1*x3)/(1.5+x2)",
                         "x1/(2+sin(x2))-exp(cos(x1*x3))", "sqrt(exp(x2)+x1^2)"};
  for (const char* s : exprs) {
    Program p({parse_expr(s, 3)}, 3);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<double> x{u(rng), u(rng), u(rng)};
      auto J = eval_jet(p, x, 2);
      for (int i = 0; i < 3; ++i) {
        const double h = 1e-5;
        auto xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        double fd = (p.eval(xp)[0] - p.eval(xm)[0]) / (2 * h);
        double d = J[0].partial(i);
        CHECK(std::abs(d - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
      }
    }
  }
}

TEST_CASE("second-order coefficients of univariate functions") {
  auto sp = JetSpace::get(1, 4);
  Jet x = Jet::variable(sp, 0, 0.3);
  Jet s = sin(x), c = cos(x), e = exp(x), r = sqrt(x);
  CHECK(s.coeff(2) == doctest::Approx(-std::sin(0.3) / 2));
  CHECK(c.coeff(3) == doctest::Approx(std::sin(0.3) / 6));
  CHECK(e.coeff(4) == doctest::Approx(std::exp(0.3) / 24));
  // d^2/dx^2 sqrt x = -x^{-3/2}/4
  CHECK(r.coeff(2) == doctest::Approx(-std::pow(0.3, -1.5) / 8));
  CHECK_THROWS_AS(sqrt(Jet::variable(sp, 0, 0.0)), EvalError);
}

TEST_CASE("order-0 jets equal plain evaluation bit for bit") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  Program p({parse_expr("sin(x1)*x2^3/(1.7+x3)", 3), parse_expr("sqrt(3+x1)-exp(x2*x3)+cos(x1)", 3)}, 3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x{u(rng), u(rng), u(rng)};
    auto plain = p.eval(x);
    auto J = eval_jet(p, x, 0);
    for (int o = 0; o < 2; ++o) {
      double a = plain[o], b = J[o].value();
      CHECK(std::memcmp(&a, &b, sizeof a) == 0);
    }
  }
}

TEST_CASE("jet divisor check reports the node") {
  Program p({parse_expr("x2/(x1-1)", 2)}, 2);
  CHECK_THROWS_AS(eval_jet(p, {1.0, 2.0}, 2), EvalError);
}
