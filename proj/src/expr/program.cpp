#include <cmath>
#include <cstdio>

#include "abnormal/errors.hpp"
#include "abnormal/expr.hpp"
#include "abnormal/simd.hpp"

namespace abnormal {

namespace {

std::string point_string(const double* x, int n) {
  std::string s = "(";
  char buf[32];
  for (int i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof buf, "%.6g", x[i]);
    s += (i ? ", " : "") + std::string(buf);
  }
  return s + ")";
}

// x^k as repeated left multiplication; the batch path does the same sequence
inline double ipow(double x, int k) {
  if (k == 0) return 1.0;
  double r = x;
  for (int i = 1; i < k; ++i) r = r * x;
  return r;
}

}  // namespace

Program::Program(const std::vector<Expr>& outputs, int n) : n_(n) {
  for (const auto& e : outputs) {
    if (e.max_variable() >= n) throw ParseError("variable outside dimension", 0);
    out_.push_back(emit(e));
  }
}

int Program::emit(const Expr& e) {
  const Node& nd = e.node();
  Instr in{nd.op};
  switch (nd.op) {
    case Op::kConst:
      in.c = nd.value;
      break;
    case Op::kVar:
      in.k = nd.index;
      break;
    case Op::kPow:
      in.a = emit(nd.lhs);
      in.k = nd.index;
      break;
    case Op::kNeg:
    case Op::kSin:
    case Op::kCos:
    case Op::kExp:
    case Op::kSqrt:
      in.a = emit(nd.lhs);
      break;
    default:
      in.a = emit(nd.lhs);
      in.b = emit(nd.rhs);
      if (nd.op == Op::kDiv) {
        in.label = static_cast<int>(div_labels_.size());
        div_labels_.push_back(to_string(e));
      }
  }
  code_.push_back(in);
  return static_cast<int>(code_.size()) - 1;
}

void Program::eval(const double* x, double* out, std::vector<double>& r) const {
  r.resize(code_.size());
  for (std::size_t i = 0; i < code_.size(); ++i) {
    const Instr& in = code_[i];
    switch (in.op) {
      case Op::kConst: r[i] = in.c; break;
      case Op::kVar: r[i] = x[in.k]; break;
      case Op::kNeg: r[i] = -r[in.a]; break;
      case Op::kAdd: r[i] = r[in.a] + r[in.b]; break;
      case Op::kSub: r[i] = r[in.a] - r[in.b]; break;
      case Op::kMul: r[i] = r[in.a] * r[in.b]; break;
      case Op::kDiv:
        if (tiny_divisor(r[in.a], r[in.b]))
          throw EvalError("near-zero divisor in " + div_labels_[in.label] + " at " +
                          point_string(x, n_));
        r[i] = r[in.a] / r[in.b];
        break;
      case Op::kPow: r[i] = ipow(r[in.a], in.k); break;
      case Op::kSin: r[i] = std::sin(r[in.a]); break;
      case Op::kCos: r[i] = std::cos(r[in.a]); break;
      case Op::kExp: r[i] = std::exp(r[in.a]); break;
      case Op::kSqrt: r[i] = std::sqrt(r[in.a]); break;
    }
  }
  for (std::size_t o = 0; o < out_.size(); ++o) out[o] = r[out_[o]];
}

std::vector<double> Program::eval(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != n_) throw EvalError("point dimension mismatch");
  std::vector<double> out(out_.size()), scratch;
  eval(x.data(), out.data(), scratch);
  return out;
}

void Program::eval_batch(const double* const* x, double* const* out, std::size_t lanes,
                         std::vector<double>& scratch) const {
  const simd::Kernels& k = simd::active();
  scratch.resize(code_.size() * lanes);
  std::vector<const double*> reg(code_.size());
  for (std::size_t i = 0; i < code_.size(); ++i) {
    const Instr& in = code_[i];
    double* dst = scratch.data() + i * lanes;
    reg[i] = dst;
    switch (in.op) {
      case Op::kConst: k.fill(in.c, dst, lanes); break;
      case Op::kVar: reg[i] = x[in.k]; break;
      case Op::kNeg: k.neg(reg[in.a], dst, lanes); break;
      case Op::kAdd: k.add(reg[in.a], reg[in.b], dst, lanes); break;
      case Op::kSub: k.sub(reg[in.a], reg[in.b], dst, lanes); break;
      case Op::kMul: k.mul(reg[in.a], reg[in.b], dst, lanes); break;
      case Op::kDiv: {
        std::size_t bad = k.tiny_divisor(reg[in.a], reg[in.b], lanes);
        if (bad < lanes) {
          std::vector<double> p(n_);
          for (int v = 0; v < n_; ++v) p[v] = x[v][bad];
          throw EvalError("near-zero divisor in " + div_labels_[in.label] + " at " +
                          point_string(p.data(), n_));
        }
        k.div(reg[in.a], reg[in.b], dst, lanes);
        break;
      }
      case Op::kPow:
        if (in.k == 0) {
          k.fill(1.0, dst, lanes);
        } else {
          // copy then multiply in place: same order as ipow
          for (std::size_t l = 0; l < lanes; ++l) dst[l] = reg[in.a][l];
          for (int j = 1; j < in.k; ++j) k.mul(dst, reg[in.a], dst, lanes);
        }
        break;
      case Op::kSqrt: k.sqrt(reg[in.a], dst, lanes); break;
      case Op::kSin:
        for (std::size_t l = 0; l < lanes; ++l) dst[l] = std::sin(reg[in.a][l]);
        break;
      case Op::kCos:
        for (std::size_t l = 0; l < lanes; ++l) dst[l] = std::cos(reg[in.a][l]);
        break;
      case Op::kExp:
        for (std::size_t l = 0; l < lanes; ++l) dst[l] = std::exp(reg[in.a][l]);
        break;
    }
  }
  for (std::size_t o = 0; o < out_.size(); ++o) {
    const double* src = reg[out_[o]];
    for (std::size_t l = 0; l < lanes; ++l) out[o][l] = src[l];
  }
}

VectorFieldExpr::VectorFieldExpr(std::vector<Expr> comps, std::string name)
    : comps_(std::move(comps)), name_(std::move(name)) {
  prog_ = Program(comps_, dimension());
}

std::vector<std::string> VectorFieldExpr::to_strings() const {
  std::vector<std::string> s;
  for (const auto& c : comps_) s.push_back(to_string(c));
  return s;
}

}  // namespace abnormal
