#include "dpi/tape.hpp"

#include <algorithm>
#include <cmath>

namespace dpi {

namespace {

void resize_like(Tensor& t, const std::vector<int>& shape) {
  t.shape = shape;
  t.v.resize(static_cast<size_t>(t.numel()));
}

void fill_zero(Tensor& t) { std::fill(t.v.begin(), t.v.end(), 0.0); }

}  // namespace

Tape::Node& Tape::push(Op op, Id a, Id b) {
  if (used_ == nodes_.size()) nodes_.emplace_back();
  Node& n = nodes_[used_++];
  n.op = op;
  n.a = a;
  n.b = b;
  n.c = -1;
  n.c0 = n.c1 = 0.0;
  n.idx.clear();
  n.bound = nullptr;
  return n;
}

Tape::Id Tape::constant(Tensor t) {
  Node& n = push(Op::kConst, -1, -1);
  n.val = std::move(t);
  return static_cast<Id>(used_ - 1);
}

Tape::Id Tape::param(Parameter& p) {
  Node& n = push(Op::kParam, -1, -1);
  n.val = p.value;
  n.bound = &p;
  return static_cast<Id>(used_ - 1);
}

double Tape::scalar_val(Id id) const {
  const Tensor& t = val(id);
  if (t.numel() != 1) throw UsageError("Tape::scalar_val: node is not a scalar");
  return t.v[0];
}

void Tape::check_finite(Id id, const std::string& site) const {
  if (!val(id).finite()) throw NumericError(site, "non-finite value in forward pass");
}

#define UNARY_CASE(name, opk, fwd_expr)                          \
  Tape::Id Tape::name(Id a) {                                    \
    const Tensor& x = val(a);                                    \
    Node& n = push(Op::opk, a, -1);                              \
    resize_like(n.val, x.shape);                                 \
    for (size_t i = 0; i < x.v.size(); ++i) {                    \
      const double xv = x.v[i];                                  \
      (void)xv;                                                  \
      n.val.v[i] = (fwd_expr);                                   \
    }                                                            \
    return static_cast<Id>(used_ - 1);                           \
  }

UNARY_CASE(neg, kNeg, -xv)
UNARY_CASE(sigmoid, kSigmoid, 1.0 / (1.0 + std::exp(-xv)))
UNARY_CASE(tanh_, kTanh, std::tanh(xv))
UNARY_CASE(relu, kRelu, xv > 0.0 ? xv : 0.0)
UNARY_CASE(exp_, kExp, std::exp(xv))
UNARY_CASE(log_, kLog, std::log(xv))
UNARY_CASE(sqrt_, kSqrt, std::sqrt(xv))
UNARY_CASE(square, kSquare, xv * xv)

#undef UNARY_CASE

Tape::Id Tape::leaky_relu(Id a, double slope) {
  const Tensor& x = val(a);
  Node& n = push(Op::kLeakyRelu, a, -1);
  n.c0 = slope;
  resize_like(n.val, x.shape);
  for (size_t i = 0; i < x.v.size(); ++i)
    n.val.v[i] = x.v[i] > 0.0 ? x.v[i] : slope * x.v[i];
  return static_cast<Id>(used_ - 1);
}

Tape::Id Tape::clamp(Id a, double lo, double hi) {
  const Tensor& x = val(a);
  Node& n = push(Op::kClamp, a, -1);
  n.c0 = lo;
  n.c1 = hi;
  resize_like(n.val, x.shape);
  for (size_t i = 0; i < x.v.size(); ++i) n.val.v[i] = std::clamp(x.v[i], lo, hi);
  return static_cast<Id>(used_ - 1);
}

Tape::Id Tape::scale(Id a, double c) {
  const Tensor& x = val(a);
  Node& n = push(Op::kScale, a, -1);
  n.c0 = c;
  resize_like(n.val, x.shape);
  for (size_t i = 0; i < x.v.size(); ++i) n.val.v[i] = c * x.v[i];
  return static_cast<Id>(used_ - 1);
}

Tape::Id Tape::add_const(Id a, double c) {
  const Tensor& x = val(a);
  Node& n = push(Op::kAddConst, a, -1);
  n.c0 = c;
  resize_like(n.val, x.shape);
  for (size_t i = 0; i < x.v.size(); ++i) n.val.v[i] = c + x.v[i];
  return static_cast<Id>(used_ - 1);
}

#define BINARY_CASE(name, opk, fwd_expr)                                   \
  Tape::Id Tape::name(Id a, Id b) {                                        \
    const Tensor& x = val(a);                                              \
    const Tensor& y = val(b);                                              \
    if (!x.same_shape(y)) throw UsageError("Tape::" #name ": shape mismatch"); \
    Node& n = push(Op::opk, a, b);                                         \
    resize_like(n.val, x.shape);                                           \
    for (size_t i = 0; i < x.v.size(); ++i) {                              \
      const double xv = x.v[i], yv = y.v[i];                               \
      n.val.v[i] = (fwd_expr);                                             \
    }                                                                      \
    return static_cast<Id>(used_ - 1);                                     \
  }

BINARY_CASE(add, kAdd, xv + yv)
BINARY_CASE(sub, kSub, xv - yv)
BINARY_CASE(mul, kMul, xv* yv)
BINARY_CASE(div, kDiv, xv / yv)
BINARY_CASE(minimum, kMin, xv <= yv ? xv : yv)

#undef BINARY_CASE

Tape::Id Tape::add_row(Id m, Id row) {
  const Tensor& x = val(m);
  const Tensor& r = val(row);
  if (r.rows() != 1 || r.cols() != x.cols())
    throw UsageError("Tape::add_row: bias must be [1, cols]");
  Node& n = push(Op::kAddRow, m, row);
  resize_like(n.val, x.shape);
  const int B = x.rows(), N = x.cols();
  for (int i = 0; i < B; ++i)
    for (int j = 0; j < N; ++j) n.val.at(i, j) = x.at(i, j) + r.v[static_cast<size_t>(j)];
  return static_cast<Id>(used_ - 1);
}

Tape::Id Tape::matmul(Id a, Id b) {
  const Tensor& x = val(a);
  const Tensor& y = val(b);
  if (x.cols() != y.rows()) throw UsageError("Tape::matmul: inner dimension mismatch");
  Node& n = push(Op::kMatMul, a, b);
  const int B = x.rows(), K = x.cols(), N = y.cols();
  resize_like(n.val, {B, N});
  fill_zero(n.val);
  for (int i = 0; i < B; ++i) {
    const double* xi = &x.v[static_cast<size_t>(i) * K];
    double* oi = &n.val.v[static_cast<size_t>(i) * N];
    for (int k = 0; k < K; ++k) {
      const double xv = xi[k];
      if (xv == 0.0) continue;
      const double* yk = &y.v[static_cast<size_t>(k) * N];
      for (int j = 0; j < N; ++j) oi[j] += xv * yk[j];
    }
  }
  return static_cast<Id>(used_ - 1);
}

Tape::Id Tape::concat_cols(Id a, Id b) {
  const Tensor& x = val(a);
  const Tensor& y = val(b);
  if (x.rows() != y.rows()) throw UsageError("Tape::concat_cols: row mismatch");
  Node& n = push(Op::kConcatCols, a, b);
  const int B = x.rows(), N1 = x.cols(), N2 = y.cols();
  resize_like(n.val, {B, N1 + N2});
  for (int i = 0; i < B; ++i) {
    for (int j = 0; j < N1; ++j) n.val.at(i, j) = x.at(i, j);
    for (int j = 0; j < N2; ++j) n.val.at(i, N1 + j) = y.at(i, j);
  }
  return static_cast<Id>(used_ - 1);
}

Tape::Id Tape::softmax_rows(Id a) {
  const Tensor& x = val(a);
  Node& n = push(Op::kSoftmaxRows, a, -1);
  resize_like(n.val, x.shape);
  const int B = x.rows(), N = x.cols();
  for (int i = 0; i < B; ++i) {
    double mx = x.at(i, 0);
    for (int j = 1; j < N; ++j) mx = std::max(mx, x.at(i, j));
    double total = 0.0;
    for (int j = 0; j < N; ++j) {
      const double e = std::exp(x.at(i, j) - mx);
      n.val.at(i, j) = e;
      total += e;
    }
    for (int j = 0; j < N; ++j) n.val.at(i, j) /= total;
  }
  return static_cast<Id>(used_ - 1);
}

Tape::Id Tape::log_softmax_rows(Id a) {
  const Tensor& x = val(a);
  Node& n = push(Op::kLogSoftmaxRows, a, -1);
  resize_like(n.val, x.shape);
  const int B = x.rows(), N = x.cols();
  for (int i = 0; i < B; ++i) {
    double mx = x.at(i, 0);
    for (int j = 1; j < N; ++j) mx = std::max(mx, x.at(i, j));
    double total = 0.0;
    for (int j = 0; j < N; ++j) total += std::exp(x.at(i, j) - mx);
    const double lse = mx + std::log(total);
    for (int j = 0; j < N; ++j) n.val.at(i, j) = x.at(i, j) - lse;
  }
  return static_cast<Id>(used_ - 1);
}

Tape::Id Tape::sum_all(Id a) {
  const Tensor& x = val(a);
  Node& n = push(Op::kSumAll, a, -1);
  double total = 0.0;
  for (double xv : x.v) total += xv;
  resize_like(n.val, {1, 1});
  n.val.v[0] = total;
  return static_cast<Id>(used_ - 1);
}

Tape::Id Tape::mean_all(Id a) {
  const Tensor& x = val(a);
  Node& n = push(Op::kMeanAll, a, -1);
  double total = 0.0;
  for (double xv : x.v) total += xv;
  resize_like(n.val, {1, 1});
  n.val.v[0] = total / static_cast<double>(x.v.size());
  return static_cast<Id>(used_ - 1);
}

Tape::Id Tape::sum_rows(Id a) {
  const Tensor& x = val(a);
  Node& n = push(Op::kSumRows, a, -1);
  const int B = x.rows(), N = x.cols();
  resize_like(n.val, {B, 1});
  for (int i = 0; i < B; ++i) {
    double total = 0.0;
    for (int j = 0; j < N; ++j) total += x.at(i, j);
    n.val.v[static_cast<size_t>(i)] = total;
  }
  return static_cast<Id>(used_ - 1);
}

Tape::Id Tape::row_dot(Id a, Id b) {
  const Tensor& x = val(a);
  const Tensor& y = val(b);
  if (!x.same_shape(y)) throw UsageError("Tape::row_dot: shape mismatch");
  Node& n = push(Op::kRowDot, a, b);
  const int B = x.rows(), N = x.cols();
  resize_like(n.val, {B, 1});
  for (int i = 0; i < B; ++i) {
    double total = 0.0;
    for (int j = 0; j < N; ++j) total += x.at(i, j) * y.at(i, j);
    n.val.v[static_cast<size_t>(i)] = total;
  }
  return static_cast<Id>(used_ - 1);
}

Tape::Id Tape::pick_cols(Id m, std::vector<int> idx) {
  const Tensor& x = val(m);
  if (static_cast<int>(idx.size()) != x.rows())
    throw UsageError("Tape::pick_cols: one index per row required");
  Node& n = push(Op::kPickCols, m, -1);
  n.idx = std::move(idx);
  const int B = x.rows();
  resize_like(n.val, {B, 1});
  for (int i = 0; i < B; ++i) n.val.v[static_cast<size_t>(i)] = x.at(i, n.idx[static_cast<size_t>(i)]);
  return static_cast<Id>(used_ - 1);
}

Tape::Id Tape::conv2d(Id xid, Id wid, Id bid, const ConvMeta& meta) {
  const Tensor& x = val(xid);
  const Tensor& w = val(wid);
  const Tensor& b = val(bid);
  const int C = meta.in_channels, H = meta.height, W = meta.width;
  const int F = meta.out_channels, K = meta.ksize;
  if (x.cols() != C * H * W) throw UsageError("Tape::conv2d: input size mismatch");
  if (w.rows() != F || w.cols() != C * K * K) throw UsageError("Tape::conv2d: weight size mismatch");
  if (b.numel() != F) throw UsageError("Tape::conv2d: bias size mismatch");
  Node& n = push(Op::kConv2d, xid, wid);
  n.c = bid;
  n.conv = meta;
  const int B = x.rows();
  const int pad = K / 2;
  resize_like(n.val, {B, F * H * W});
  for (int img = 0; img < B; ++img) {
    const double* in = &x.v[static_cast<size_t>(img) * C * H * W];
    double* out = &n.val.v[static_cast<size_t>(img) * F * H * W];
    for (int f = 0; f < F; ++f) {
      const double* wf = &w.v[static_cast<size_t>(f) * C * K * K];
      for (int y = 0; y < H; ++y) {
        for (int xcol = 0; xcol < W; ++xcol) {
          double acc = b.v[static_cast<size_t>(f)];
          for (int c = 0; c < C; ++c) {
            for (int ky = 0; ky < K; ++ky) {
              const int iy = y + ky - pad;
              if (iy < 0 || iy >= H) continue;
              for (int kx = 0; kx < K; ++kx) {
                const int ix = xcol + kx - pad;
                if (ix < 0 || ix >= W) continue;
                acc += in[(c * H + iy) * W + ix] * wf[(c * K + ky) * K + kx];
              }
            }
          }
          out[(f * H + y) * W + xcol] = acc;
        }
      }
    }
  }
  return static_cast<Id>(used_ - 1);
}

void Tape::backward(Id loss) {
  if (used_ == 0) throw UsageError("Tape::backward: empty tape");
  if (loss < 0 || loss >= static_cast<Id>(used_))
    throw UsageError("Tape::backward: invalid node id");
  if (val(loss).numel() != 1) throw UsageError("Tape::backward: loss must be a scalar");

  for (size_t i = 0; i < used_; ++i) {
    Node& n = nodes_[i];
    resize_like(n.grad, n.val.shape);
    fill_zero(n.grad);
  }
  node(loss).grad.v[0] = 1.0;

  for (Id id = loss; id >= 0; --id) backward_node(node(id));

  for (size_t i = 0; i < used_; ++i) {
    Node& n = nodes_[i];
    if (n.op == Op::kParam && n.bound != nullptr) {
      for (size_t j = 0; j < n.grad.v.size(); ++j) n.bound->grad.v[j] += n.grad.v[j];
    }
  }
}

void Tape::backward_node(Node& n) {
  const Tensor& g = n.grad;
  switch (n.op) {
    case Op::kConst:
    case Op::kParam:
      return;
    case Op::kAdd: {
      Tensor& ga = node(n.a).grad;
      Tensor& gb = node(n.b).grad;
      for (size_t i = 0; i < g.v.size(); ++i) {
        ga.v[i] += g.v[i];
        gb.v[i] += g.v[i];
      }
      return;
    }
    case Op::kAddRow: {
      Tensor& ga = node(n.a).grad;
      Tensor& gb = node(n.b).grad;
      const int B = n.val.rows(), N = n.val.cols();
      for (int i = 0; i < B; ++i)
        for (int j = 0; j < N; ++j) {
          const double gv = g.at(i, j);
          ga.at(i, j) += gv;
          gb.v[static_cast<size_t>(j)] += gv;
        }
      return;
    }
    case Op::kSub: {
      Tensor& ga = node(n.a).grad;
      Tensor& gb = node(n.b).grad;
      for (size_t i = 0; i < g.v.size(); ++i) {
        ga.v[i] += g.v[i];
        gb.v[i] -= g.v[i];
      }
      return;
    }
    case Op::kMul: {
      const Tensor& xa = node(n.a).val;
      const Tensor& xb = node(n.b).val;
      Tensor& ga = node(n.a).grad;
      Tensor& gb = node(n.b).grad;
      for (size_t i = 0; i < g.v.size(); ++i) {
        ga.v[i] += g.v[i] * xb.v[i];
        gb.v[i] += g.v[i] * xa.v[i];
      }
      return;
    }
    case Op::kDiv: {
      const Tensor& xa = node(n.a).val;
      const Tensor& xb = node(n.b).val;
      Tensor& ga = node(n.a).grad;
      Tensor& gb = node(n.b).grad;
      for (size_t i = 0; i < g.v.size(); ++i) {
        if (g.v[i] == 0.0) continue;  // keep inactive paths NaN-free
        ga.v[i] += g.v[i] / xb.v[i];
        gb.v[i] -= g.v[i] * xa.v[i] / (xb.v[i] * xb.v[i]);
      }
      return;
    }
    case Op::kMin: {
      const Tensor& xa = node(n.a).val;
      const Tensor& xb = node(n.b).val;
      Tensor& ga = node(n.a).grad;
      Tensor& gb = node(n.b).grad;
      for (size_t i = 0; i < g.v.size(); ++i) {
        if (xa.v[i] <= xb.v[i])
          ga.v[i] += g.v[i];
        else
          gb.v[i] += g.v[i];
      }
      return;
    }
    case Op::kNeg: {
      Tensor& ga = node(n.a).grad;
      for (size_t i = 0; i < g.v.size(); ++i) ga.v[i] -= g.v[i];
      return;
    }
    case Op::kScale: {
      Tensor& ga = node(n.a).grad;
      for (size_t i = 0; i < g.v.size(); ++i) ga.v[i] += n.c0 * g.v[i];
      return;
    }
    case Op::kAddConst: {
      Tensor& ga = node(n.a).grad;
      for (size_t i = 0; i < g.v.size(); ++i) ga.v[i] += g.v[i];
      return;
    }
    case Op::kSigmoid: {
      Tensor& ga = node(n.a).grad;
      for (size_t i = 0; i < g.v.size(); ++i) {
        const double s = n.val.v[i];
        ga.v[i] += g.v[i] * s * (1.0 - s);
      }
      return;
    }
    case Op::kTanh: {
      Tensor& ga = node(n.a).grad;
      for (size_t i = 0; i < g.v.size(); ++i) {
        const double t = n.val.v[i];
        ga.v[i] += g.v[i] * (1.0 - t * t);
      }
      return;
    }
    case Op::kRelu: {
      const Tensor& xa = node(n.a).val;
      Tensor& ga = node(n.a).grad;
      for (size_t i = 0; i < g.v.size(); ++i)
        if (xa.v[i] > 0.0) ga.v[i] += g.v[i];
      return;
    }
    case Op::kLeakyRelu: {
      const Tensor& xa = node(n.a).val;
      Tensor& ga = node(n.a).grad;
      for (size_t i = 0; i < g.v.size(); ++i)
        ga.v[i] += g.v[i] * (xa.v[i] > 0.0 ? 1.0 : n.c0);
      return;
    }
    case Op::kExp: {
      Tensor& ga = node(n.a).grad;
      for (size_t i = 0; i < g.v.size(); ++i) ga.v[i] += g.v[i] * n.val.v[i];
      return;
    }
    case Op::kLog: {
      const Tensor& xa = node(n.a).val;
      Tensor& ga = node(n.a).grad;
      for (size_t i = 0; i < g.v.size(); ++i)
        if (g.v[i] != 0.0) ga.v[i] += g.v[i] / xa.v[i];
      return;
    }
    case Op::kSqrt: {
      Tensor& ga = node(n.a).grad;
      for (size_t i = 0; i < g.v.size(); ++i)
        if (g.v[i] != 0.0) ga.v[i] += g.v[i] * 0.5 / n.val.v[i];
      return;
    }
    case Op::kSquare: {
      const Tensor& xa = node(n.a).val;
      Tensor& ga = node(n.a).grad;
      for (size_t i = 0; i < g.v.size(); ++i) ga.v[i] += g.v[i] * 2.0 * xa.v[i];
      return;
    }
    case Op::kClamp: {
      const Tensor& xa = node(n.a).val;
      Tensor& ga = node(n.a).grad;
      for (size_t i = 0; i < g.v.size(); ++i)
        if (xa.v[i] > n.c0 && xa.v[i] < n.c1) ga.v[i] += g.v[i];
      return;
    }
    case Op::kMatMul: {
      const Tensor& xa = node(n.a).val;  // [B,K]
      const Tensor& xb = node(n.b).val;  // [K,N]
      Tensor& ga = node(n.a).grad;
      Tensor& gb = node(n.b).grad;
      const int B = xa.rows(), K = xa.cols(), N = xb.cols();
      // dA = dY * B^T
      for (int i = 0; i < B; ++i) {
        const double* gi = &g.v[static_cast<size_t>(i) * N];
        double* gai = &ga.v[static_cast<size_t>(i) * K];
        for (int k = 0; k < K; ++k) {
          const double* bk = &xb.v[static_cast<size_t>(k) * N];
          double acc = 0.0;
          for (int j = 0; j < N; ++j) acc += gi[j] * bk[j];
          gai[k] += acc;
        }
      }
      // dB = A^T * dY
      for (int i = 0; i < B; ++i) {
        const double* ai = &xa.v[static_cast<size_t>(i) * K];
        const double* gi = &g.v[static_cast<size_t>(i) * N];
        for (int k = 0; k < K; ++k) {
          const double av = ai[k];
          if (av == 0.0) continue;
          double* gbk = &gb.v[static_cast<size_t>(k) * N];
          for (int j = 0; j < N; ++j) gbk[j] += av * gi[j];
        }
      }
      return;
    }
    case Op::kConcatCols: {
      Tensor& ga = node(n.a).grad;
      Tensor& gb = node(n.b).grad;
      const int B = n.val.rows(), N1 = ga.cols(), N2 = gb.cols();
      for (int i = 0; i < B; ++i) {
        for (int j = 0; j < N1; ++j) ga.at(i, j) += g.at(i, j);
        for (int j = 0; j < N2; ++j) gb.at(i, j) += g.at(i, N1 + j);
      }
      return;
    }
    case Op::kSoftmaxRows: {
      Tensor& ga = node(n.a).grad;
      const int B = n.val.rows(), N = n.val.cols();
      for (int i = 0; i < B; ++i) {
        double dot = 0.0;
        for (int j = 0; j < N; ++j) dot += g.at(i, j) * n.val.at(i, j);
        for (int j = 0; j < N; ++j)
          ga.at(i, j) += n.val.at(i, j) * (g.at(i, j) - dot);
      }
      return;
    }
    case Op::kLogSoftmaxRows: {
      Tensor& ga = node(n.a).grad;
      const int B = n.val.rows(), N = n.val.cols();
      for (int i = 0; i < B; ++i) {
        double gsum = 0.0;
        for (int j = 0; j < N; ++j) gsum += g.at(i, j);
        for (int j = 0; j < N; ++j)
          ga.at(i, j) += g.at(i, j) - std::exp(n.val.at(i, j)) * gsum;
      }
      return;
    }
    case Op::kSumAll: {
      Tensor& ga = node(n.a).grad;
      for (auto& gv : ga.v) gv += g.v[0];
      return;
    }
    case Op::kMeanAll: {
      Tensor& ga = node(n.a).grad;
      const double s = g.v[0] / static_cast<double>(ga.v.size());
      for (auto& gv : ga.v) gv += s;
      return;
    }
    case Op::kSumRows: {
      Tensor& ga = node(n.a).grad;
      const int B = ga.rows(), N = ga.cols();
      for (int i = 0; i < B; ++i) {
        const double gv = g.v[static_cast<size_t>(i)];
        for (int j = 0; j < N; ++j) ga.at(i, j) += gv;
      }
      return;
    }
    case Op::kRowDot: {
      const Tensor& xa = node(n.a).val;
      const Tensor& xb = node(n.b).val;
      Tensor& ga = node(n.a).grad;
      Tensor& gb = node(n.b).grad;
      const int B = xa.rows(), N = xa.cols();
      for (int i = 0; i < B; ++i) {
        const double gv = g.v[static_cast<size_t>(i)];
        for (int j = 0; j < N; ++j) {
          ga.at(i, j) += gv * xb.at(i, j);
          gb.at(i, j) += gv * xa.at(i, j);
        }
      }
      return;
    }
    case Op::kPickCols: {
      Tensor& ga = node(n.a).grad;
      const int B = ga.rows();
      for (int i = 0; i < B; ++i)
        ga.at(i, n.idx[static_cast<size_t>(i)]) += g.v[static_cast<size_t>(i)];
      return;
    }
    case Op::kConv2d: {
      const Tensor& x = node(n.a).val;
      const Tensor& w = node(n.b).val;
      Tensor& gx = node(n.a).grad;
      Tensor& gw = node(n.b).grad;
      Tensor& gb = node(n.c).grad;
      const int C = n.conv.in_channels, H = n.conv.height, W = n.conv.width;
      const int F = n.conv.out_channels, K = n.conv.ksize;
      const int B = x.rows();
      const int pad = K / 2;
      for (int img = 0; img < B; ++img) {
        const double* in = &x.v[static_cast<size_t>(img) * C * H * W];
        const double* go = &g.v[static_cast<size_t>(img) * F * H * W];
        double* gin = &gx.v[static_cast<size_t>(img) * C * H * W];
        for (int f = 0; f < F; ++f) {
          const double* wf = &w.v[static_cast<size_t>(f) * C * K * K];
          double* gwf = &gw.v[static_cast<size_t>(f) * C * K * K];
          for (int y = 0; y < H; ++y) {
            for (int xcol = 0; xcol < W; ++xcol) {
              const double gv = go[(f * H + y) * W + xcol];
              if (gv == 0.0) continue;
              gb.v[static_cast<size_t>(f)] += gv;
              for (int c = 0; c < C; ++c) {
                for (int ky = 0; ky < K; ++ky) {
                  const int iy = y + ky - pad;
                  if (iy < 0 || iy >= H) continue;
                  for (int kx = 0; kx < K; ++kx) {
                    const int ix = xcol + kx - pad;
                    if (ix < 0 || ix >= W) continue;
                    gwf[(c * K + ky) * K + kx] += gv * in[(c * H + iy) * W + ix];
                    gin[(c * H + iy) * W + ix] += gv * wf[(c * K + ky) * K + kx];
                  }
                }
              }
            }
          }
        }
      }
      return;
    }
  }
}

}  // namespace dpi
