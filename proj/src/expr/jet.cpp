#include "abnormal/jet.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <mutex>

#include "abnormal/errors.hpp"

namespace abnormal {

namespace {

void enumerate(int n, int d, int var, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (var == n - 1) {
    cur[var] = d;
    out.push_back(cur);
    cur[var] = 0;
    return;
  }
  for (int k = d; k >= 0; --k) {
    cur[var] = k;
    enumerate(n, d - k, var + 1, cur, out);
  }
  cur[var] = 0;
}

}  // namespace

JetSpace::JetSpace(int n, int m) : n_(n), m_(m) {
  if (n < 1 || m < 0) throw EvalError("bad jet space");
  std::vector<int> cur(n, 0);
  for (int d = 0; d <= m; ++d) {
    prefix_.push_back(static_cast<int>(idx_.size()));
    enumerate(n, d, 0, cur, idx_);
  }
  prefix_.push_back(static_cast<int>(idx_.size()));
  // prefix_[d] = count of degree < d; shift so size_up_to(d) counts degree <= d
  prefix_.erase(prefix_.begin());
  for (const auto& a : idx_) {
    int s = 0;
    for (int v : a) s += v;
    deg_.push_back(s);
  }
  for (int a = 0; a < size(); ++a)
    for (int b = 0; b < size() && deg_[a] + deg_[b] <= m; ++b) {
      std::vector<int> s(n);
      for (int v = 0; v < n; ++v) s[v] = idx_[a][v] + idx_[b][v];
      mul_.push_back({a, b, find(s)});
    }
  std::stable_sort(mul_.begin(), mul_.end(), [](const Term& x, const Term& y) { return x.c < y.c; });
  diff_.assign(n, {});
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < size(); ++k) {
      if (idx_[k][i] == 0) {
        diff_[i].push_back({-1, 0.0});
        continue;
      }
      std::vector<int> a = idx_[k];
      a[i] -= 1;
      diff_[i].push_back({find(a), static_cast<double>(idx_[k][i])});
    }
}

int JetSpace::find(const std::vector<int>& alpha) const {
  if (static_cast<int>(alpha.size()) != n_) return -1;
  int d = 0;
  for (int v : alpha) {
    if (v < 0) return -1;
    d += v;
  }
  if (d > m_) return -1;
  int lo = d == 0 ? 0 : prefix_[d - 1];
  for (int k = lo; k < prefix_[d]; ++k)
    if (idx_[k] == alpha) return k;
  return -1;
}

std::shared_ptr<const JetSpace> JetSpace::get(int n, int m) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const JetSpace>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{n, m}];
  if (!slot) slot = std::make_shared<JetSpace>(n, m);
  return slot;
}

Jet::Jet(std::shared_ptr<const JetSpace> s, double c0) : space_(std::move(s)), c_(space_->size(), 0.0) {
  c_[0] = c0;
}

Jet Jet::variable(std::shared_ptr<const JetSpace> s, int i, double base) {
  Jet j(s, base);
  if (s->order() >= 1) {
    std::vector<int> e(s->vars(), 0);
    e[i] = 1;
    j.c_[s->find(e)] = 1.0;
  }
  return j;
}

double Jet::coeff(const std::vector<int>& alpha) const {
  int k = space_->find(alpha);
  return k < 0 ? 0.0 : c_[k];
}

double Jet::partial(int i) const {
  if (order() < 1) throw EvalError("jet order too low for a derivative");
  std::vector<int> e(space_->vars(), 0);
  e[i] = 1;
  return coeff(e);
}

Jet Jet::truncated(int m) const {
  if (m >= order()) return *this;
  Jet r(JetSpace::get(space_->vars(), m));
  std::copy(c_.begin(), c_.begin() + r.space_->size(), r.c_.begin());
  return r;
}

Jet Jet::derivative(int i) const {
  if (order() < 1) throw EvalError("jet order too low for a derivative");
  Jet r(JetSpace::get(space_->vars(), order() - 1));
  const auto& d = space_->diff(i);
  for (int k = 0; k < space_->size(); ++k)
    if (d[k].target >= 0) r.c_[d[k].target] += d[k].factor * c_[k];
  return r;
}

Jet Jet::operator-() const {
  Jet r = *this;
  for (double& v : r.c_) v = -v;
  return r;
}

namespace {
// bring two jets to a common order
void align(Jet& a, Jet& b) {
  if (a.order() > b.order()) a = a.truncated(b.order());
  if (b.order() > a.order()) b = b.truncated(a.order());
}
}  // namespace

Jet& Jet::operator+=(const Jet& o) {
  if (o.order() != order()) {
    Jet b = o;
    align(*this, b);
    return *this += b;
  }
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] = c_[k] + o.c_[k];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  if (o.order() != order()) {
    Jet b = o;
    align(*this, b);
    return *this -= b;
  }
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] = c_[k] - o.c_[k];
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

Jet operator*(const Jet& x, const Jet& y) {
  if (x.order() != y.order()) {
    Jet a = x, b = y;
    align(a, b);
    return a * b;
  }
  Jet r(x.space_);
  if (x.order() == 0) {
    r.c_[0] = x.c_[0] * y.c_[0];
    return r;
  }
  for (const auto& t : x.space_->products()) r.c_[t.c] += x.c_[t.a] * y.c_[t.b];
  return r;
}

Jet operator/(const Jet& x, const Jet& y) {
  if (x.order() != y.order()) {
    Jet a = x, b = y;
    align(a, b);
    return a / b;
  }
  if (tiny_divisor(x.c_[0], y.c_[0])) throw EvalError("near-zero divisor in jet division");
  Jet q(x.space_);
  q.c_[0] = x.c_[0] / y.c_[0];
  if (x.order() == 0) return q;
  // graded order: every product feeding c with b != 0 uses a lower q index, already final
  const auto& terms = x.space_->products();
  std::size_t t = 0;
  for (int c = 1; c < x.space_->size(); ++c) {
    while (t < terms.size() && terms[t].c < c) ++t;
    double s = x.c_[c];
    for (; t < terms.size() && terms[t].c == c; ++t)
      if (terms[t].b != 0) s -= q.c_[terms[t].a] * y.c_[terms[t].b];
    q.c_[c] = s / y.c_[0];
  }
  return q;
}

Jet pow_int(const Jet& a, int k) {
  if (k < 0) throw EvalError("negative exponent");
  if (k == 0) return Jet(a.space_ptr(), 1.0);
  Jet r = a;
  for (int i = 1; i < k; ++i) r = r * a;
  return r;
}

namespace {

// sum_k f[k] * (a - a0)^k
Jet compose(const Jet& a, const std::vector<double>& f) {
  Jet r(a.space_ptr(), f[0]);
  if (a.order() == 0) return r;
  Jet h = a;
  h.coeff(0) = 0.0;
  Jet hk = h;
  for (int k = 1; k <= a.order(); ++k) {
    r += f[k] * hk;
    if (k < a.order()) hk = hk * h;
  }
  return r;
}

std::vector<double> trig_series(double x, int m, bool is_sin) {
  double s = std::sin(x), c = std::cos(x);
  double cyc[4] = {s, c, -s, -c};
  int off = is_sin ? 0 : 1;
  std::vector<double> f(m + 1);
  double fact = 1.0;
  for (int k = 0; k <= m; ++k) {
    if (k) fact *= k;
    f[k] = cyc[(k + off) % 4] / fact;
  }
  return f;
}

}  // namespace

Jet sin(const Jet& a) { return compose(a, trig_series(a.value(), a.order(), true)); }
Jet cos(const Jet& a) { return compose(a, trig_series(a.value(), a.order(), false)); }

Jet exp(const Jet& a) {
  std::vector<double> f(a.order() + 1);
  double e = std::exp(a.value()), fact = 1.0;
  for (int k = 0; k <= a.order(); ++k) {
    if (k) fact *= k;
    f[k] = e / fact;
  }
  return compose(a, f);
}

Jet sqrt(const Jet& a) {
  double x = a.value();
  if (a.order() > 0 && !(x > 0.0)) throw EvalError("sqrt of non-positive value in jet");
  std::vector<double> f(a.order() + 1);
  f[0] = std::sqrt(x);
  double binom = 1.0;
  for (int k = 1; k <= a.order(); ++k) {
    binom *= (0.5 - (k - 1)) / k;
    f[k] = binom * std::pow(x, 0.5 - k);
  }
  return compose(a, f);
}

std::vector<Jet> eval_jet(const Program& prog, const std::vector<double>& point, int order) {
  const int n = prog.dimension();
  if (static_cast<int>(point.size()) != n) throw EvalError("point dimension mismatch");
  if (order < 0) throw EvalError("negative jet order");
  auto space = JetSpace::get(n, order);
  const auto& code = prog.code();
  std::vector<Jet> r(code.size());
  for (std::size_t i = 0; i < code.size(); ++i) {
    const Instr& in = code[i];
    switch (in.op) {
      case Op::kConst: r[i] = Jet(space, in.c); break;
      case Op::kVar: r[i] = Jet::variable(space, in.k, point[in.k]); break;
      case Op::kNeg: r[i] = -r[in.a]; break;
      case Op::kAdd: r[i] = r[in.a] + r[in.b]; break;
      case Op::kSub: r[i] = r[in.a] - r[in.b]; break;
      case Op::kMul: r[i] = r[in.a] * r[in.b]; break;
      case Op::kDiv:
        if (tiny_divisor(r[in.a].value(), r[in.b].value())) {
          std::string p;
          char buf[32];
          for (int v = 0; v < n; ++v) {
            std::snprintf(buf, sizeof buf, "%.6g", point[v]);
            p += (v ? ", " : "") + std::string(buf);
          }
          throw EvalError("near-zero divisor in " + prog.div_label(in.label) + " at (" + p + ")");
        }
        r[i] = r[in.a] / r[in.b];
        break;
      case Op::kPow: r[i] = pow_int(r[in.a], in.k); break;
      case Op::kSin: r[i] = sin(r[in.a]); break;
      case Op::kCos: r[i] = cos(r[in.a]); break;
      case Op::kExp: r[i] = exp(r[in.a]); break;
      case Op::kSqrt: r[i] = sqrt(r[in.a]); break;
    }
  }
  std::vector<Jet> out;
  for (int reg : prog.output_registers()) out.push_back(r[reg]);
  return out;
}

std::vector<Jet> eval_jet(const VectorFieldExpr& field, const std::vector<double>& point, int order) {
  return eval_jet(field.program(), point, order);
}

}  // namespace abnormal
