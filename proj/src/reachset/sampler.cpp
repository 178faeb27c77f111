#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "abnormal/boundary.hpp"
#include "abnormal/errors.hpp"
#include "abnormal/reachset.hpp"
#include "abnormal/simd.hpp"
#include "controls.hpp"

namespace abnormal {

namespace {

constexpr int kLanes = 64;

// RK4 on one block of lanes; state stored variable-major
struct LaneBlock {
  const ControlSystem& sys;
  int n, L;
  std::vector<double> s, tmp, k, acc, xo, yo, av, bv;
  std::vector<double> scratch;
  std::vector<const double*> in;
  std::vector<double*> outx, outy;

  LaneBlock(const ControlSystem& sys_, int lanes) : sys(sys_), n(sys_.dimension()), L(lanes) {
    const std::size_t sz = static_cast<std::size_t>(n) * L;
    s.resize(sz);
    tmp.resize(sz);
    k.resize(sz);
    acc.resize(sz);
    xo.resize(sz);
    yo.resize(sz);
    av.resize(L);
    bv.resize(L);
    in.resize(n);
    outx.resize(n);
    outy.resize(n);
    for (int i = 0; i < n; ++i) {
      outx[i] = xo.data() + i * L;
      outy[i] = yo.data() + i * L;
    }
  }

  // k = a X(state) + b Y(state)
  void field(const std::vector<double>& state, const simd::Kernels& K) {
    for (int i = 0; i < n; ++i) in[i] = state.data() + i * L;
    sys.X().program().eval_batch(in.data(), outx.data(), L, scratch);
    sys.Y().program().eval_batch(in.data(), outy.data(), L, scratch);
    for (int i = 0; i < n; ++i) {
      double* ki = k.data() + i * L;
      K.mul(av.data(), outx[i], ki, L);
      K.mul(bv.data(), outy[i], outy[i], L);
      K.add(ki, outy[i], ki, L);
    }
  }

  void step(double h, const simd::Kernels& K) {
    const std::size_t sz = s.size();
    // acc = s + h/6 k1 + h/3 k2 + h/3 k3 + h/6 k4
    std::copy(s.begin(), s.end(), acc.begin());
    field(s, K);
    K.axpy(h / 6, k.data(), acc.data(), sz);
    std::copy(s.begin(), s.end(), tmp.begin());
    K.axpy(h / 2, k.data(), tmp.data(), sz);
    field(tmp, K);
    K.axpy(h / 3, k.data(), acc.data(), sz);
    std::copy(s.begin(), s.end(), tmp.begin());
    K.axpy(h / 2, k.data(), tmp.data(), sz);
    field(tmp, K);
    K.axpy(h / 3, k.data(), acc.data(), sz);
    std::copy(s.begin(), s.end(), tmp.begin());
    K.axpy(h, k.data(), tmp.data(), sz);
    field(tmp, K);
    K.axpy(h / 6, k.data(), acc.data(), sz);
    std::swap(s, acc);
  }
};

void check_finite(const Eigen::VectorXd& x) {
  if (!x.allFinite() || x.cwiseAbs().maxCoeff() > 1e12) throw NumericalError("trajectory blow-up in sampler");
}

}  // namespace

Eigen::MatrixXd integrate_lanes(const ControlSystem& sys, const Eigen::VectorXd& x0, double T,
                                const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b,
                                int substeps) {
  const int n = sys.dimension();
  const int lanes = static_cast<int>(b.size());
  if (!a.empty() && static_cast<int>(a.size()) != lanes) throw NumericalError("lane count mismatch");
  if (lanes == 0) return Eigen::MatrixXd(n, 0);
  const int steps = static_cast<int>(b[0].size());
  if (steps < 1 || substeps < 1) throw NumericalError("need at least one step");
  const double h = T / steps / substeps;
  const simd::Kernels& K = simd::active();
  Eigen::MatrixXd out(n, lanes);
  for (int base = 0; base < lanes; base += kLanes) {
    const int L = std::min(kLanes, lanes - base);
    LaneBlock blk(sys, L);
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < L; ++l) blk.s[i * L + l] = x0[i];
    for (int st = 0; st < steps; ++st) {
      for (int l = 0; l < L; ++l) {
        blk.av[l] = a.empty() ? 1.0 : a[base + l][st];
        blk.bv[l] = b[base + l][st];
      }
      for (int sub = 0; sub < substeps; ++sub) blk.step(h, K);
    }
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < L; ++l) out(i, base + l) = blk.s[i * L + l];
  }
  for (int l = 0; l < lanes; ++l) check_finite(out.col(l));
  return out;
}

Eigen::VectorXd integrate_single(const ControlSystem& sys, const Eigen::VectorXd& x0, double T,
                                 const std::vector<double>& a, const std::vector<double>& b, int substeps) {
  const int steps = static_cast<int>(b.size());
  if (steps < 1 || substeps < 1) throw NumericalError("need at least one step");
  const double h = T / steps / substeps;
  Eigen::VectorXd x = x0;
  for (int st = 0; st < steps; ++st) {
    const double av = a.empty() ? 1.0 : a[st], bv = b[st];
    auto f = [&](const Eigen::VectorXd& y) -> Eigen::VectorXd { return av * sys.drift(y) + bv * sys.input(y); };
    for (int sub = 0; sub < substeps; ++sub) {
      Eigen::VectorXd k1 = f(x), k2 = f(x + h / 2 * k1), k3 = f(x + h / 2 * k2), k4 = f(x + h * k3);
      x += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
  }
  check_finite(x);
  return x;
}

namespace {

// contact minimizer of the Hessian as a per-step shape, kicks kept separate
bool kernel_shape(const ControlSystem& sys, const Eigen::VectorXd& x0, double T, int steps, detail::KernelShape& out) {
  try {
    auto tr = adjoint_along(reference_trajectory(sys, x0, T, 16), sys);
    auto q = hessian_form(tr, sys, 64);
    Eigen::VectorXd v = contact_minimizer(q);
    out.body.resize(steps);
    for (int st = 0; st < steps; ++st) out.body[st] = q.basis.value(v, (st + 0.5) * T / steps);
    out.kick_start = v[q.basis.impulse_start()];
    out.kick_end = v[q.basis.impulse_end()];
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

SampleCloud run_sampler(const ControlSystem& sys, const Eigen::VectorXd& x0, double T, double bound, int N,
                        std::uint64_t seed, const SamplerOptions& opt, CloudCase cc) {
  if (N < 1) throw ConfigError("sample count must be positive");
  if (x0.size() != sys.dimension()) throw ConfigError("x0 has the wrong dimension");
  const int steps = opt.steps;
  SampleCloud cloud;
  cloud.cloud_case = cc;
  cloud.horizon = T;
  cloud.bound = bound;
  cloud.steps = steps;
  cloud.seed = seed;
  detail::KernelShape shape;
  cloud.kernel_family = opt.kernel_family && bound > 0 && kernel_shape(sys, x0, T, steps, shape);
  const int n = sys.dimension();
  cloud.states.resize(n, N);
  cloud.controls.resize(N);
  const int batches = (N + kLanes - 1) / kLanes;
  std::vector<double> excess(batches, 0.0);
  // controls of the first few SR lanes, kept for the reparametrization check
  const int keep = cc == CloudCase::kSR ? std::min(N, opt.reparam_checks) : 0;
  std::vector<std::vector<double>> kept_a(keep), kept_b(keep);

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int bi = next++; bi < batches; bi = next++) {
      // stream per batch: independent of thread count, and a prefix of a larger run
      std::seed_seq ss{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(bi)};
      std::mt19937_64 rng(ss);
      const int base = bi * kLanes;
      const int L = std::min(kLanes, N - base);
      std::vector<std::vector<double>> a(cc == CloudCase::kSR ? L : 0), b(L);
      for (int l = 0; l < L; ++l) {
        detail::LaneControl c = cc == CloudCase::kSR
                                    ? detail::draw_sr(rng, steps, T, bound, cloud.kernel_family ? &shape : nullptr)
                                    : detail::draw_affine(rng, steps, T, bound, cloud.kernel_family ? &shape : nullptr);
        excess[bi] = std::max(excess[bi], detail::constraint_excess(c, cc, bound));
        ControlDescriptor& d = cloud.controls[base + l];
        d.family = c.family;
        d.amplitude = c.amplitude;
        double sup = 0, l2 = 0;
        for (int st = 0; st < steps; ++st) {
          double av = c.a.empty() ? 1.0 : c.a[st];
          double e = std::hypot(av - 1.0, c.b[st]);
          sup = std::max(sup, e);
          l2 += e * e * T / steps;
        }
        d.sup_dist = sup;
        d.l2_dist = std::sqrt(l2);
        if (cc == CloudCase::kSR) a[l] = std::move(c.a);
        b[l] = std::move(c.b);
      }
      Eigen::MatrixXd out = integrate_lanes(sys, x0, T, a, b);
      cloud.states.middleCols(base, L) = out;
      for (int l = 0; l < L; ++l)
        if (base + l < keep) {
          kept_a[base + l] = a[l];
          kept_b[base + l] = b[l];
        }
    }
  };
  const int threads = std::max(1, std::min(opt.threads, batches));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(threads);
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&, t]() {
        try {
          worker();
        } catch (...) {
          errs[t] = std::current_exception();
          next = batches;
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errs)
      if (e) std::rethrow_exception(e);
  }
  cloud.max_constraint_excess = *std::max_element(excess.begin(), excess.end());
  if (cloud.max_constraint_excess > 1e-12) throw NumericalError("sampled control violates its constraint");

  // s' = v, w = u/v: the same end-point as an affine trajectory of horizon s(T), re-integrated on its own grid
  for (int i = 0; i < keep; ++i) {
    const double h = T / steps;
    double S = 0, wmax = 0;
    std::vector<double> w(steps);
    for (int st = 0; st < steps; ++st) {
      S += kept_a[i][st] * h;
      w[st] = kept_b[i][st] / kept_a[i][st];
      wmax = std::max(wmax, std::abs(w[st]));
    }
    Eigen::VectorXd x = x0;
    for (int st = 0; st < steps; ++st) {
      std::vector<double> one{w[st]};
      x = integrate_single(sys, x, kept_a[i][st] * h, {}, one, 2);
    }
    cloud.reparam_max_error = std::max(cloud.reparam_max_error, (x - cloud.states.col(i)).cwiseAbs().maxCoeff());
    cloud.reparam_max_w = std::max(cloud.reparam_max_w, wmax);
    cloud.reparam_max_s = std::max(cloud.reparam_max_s, S);
    ++cloud.reparam_checked;
  }
  return cloud;
}

}  // namespace

SampleCloud sample_affine(const ControlSystem& sys, const Eigen::VectorXd& x0, double T, double eta, int N,
                          std::uint64_t seed, const SamplerOptions& opt) {
  if (!(eta >= 0)) throw ConfigError("eta must be nonnegative");
  return run_sampler(sys, x0, T, eta, N, seed, opt, CloudCase::kAffine);
}

SampleCloud sample_sr(const ControlSystem& sys, const Eigen::VectorXd& x0, double T, double alpha, int N,
                      std::uint64_t seed, const SamplerOptions& opt) {
  if (!(alpha > 0 && alpha < 1)) throw ConfigError("alpha must lie in (0, 1)");
  return run_sampler(sys, x0, T, alpha, N, seed, opt, CloudCase::kSR);
}

}  // namespace abnormal
