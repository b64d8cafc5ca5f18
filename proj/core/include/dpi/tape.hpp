#pragma once

#include <span>
#include <string>
#include <vector>

#include "dpi/params.hpp"
#include "dpi/tensor.hpp"

namespace dpi {

/// Reverse-mode autodiff over 2-D tensors.
///
/// Ops append nodes to a tape; creation order is a valid topological order,
/// so backward() is a single reverse sweep. backward() may be called several
/// times; gradients accumulate additively into the bound Parameters until
/// ParamSet::zero_grad(). reset() recycles node storage so a tape can be
/// reused per step without reallocating.
class Tape {
 public:
  using Id = int;

  struct ConvMeta {
    int in_channels = 0, height = 0, width = 0;
    int out_channels = 0, ksize = 0;  // square kernel, stride 1, same padding
  };

  // ---- leaves ----
  Id constant(Tensor t);
  Id constant_scalar(double c) { return constant(Tensor::scalar(c)); }
  Id param(Parameter& p);

  // ---- elementwise / broadcast ----
  Id add(Id a, Id b);        // same shape
  Id add_row(Id m, Id row);  // [B,N] + [1,N]
  Id sub(Id a, Id b);
  Id mul(Id a, Id b);  // Hadamard
  Id div(Id a, Id b);
  Id minimum(Id a, Id b);  // grad follows the smaller branch (ties: a)
  Id neg(Id a);
  Id scale(Id a, double c);
  Id add_const(Id a, double c);
  Id sigmoid(Id a);
  Id tanh_(Id a);
  Id relu(Id a);
  Id leaky_relu(Id a, double slope);
  Id exp_(Id a);
  Id log_(Id a);
  Id sqrt_(Id a);
  Id square(Id a);
  Id clamp(Id a, double lo, double hi);  // zero gradient outside [lo, hi]

  // ---- linear algebra / structure ----
  Id matmul(Id a, Id b);  // [B,K] x [K,N]
  Id concat_cols(Id a, Id b);
  Id softmax_rows(Id a);
  Id log_softmax_rows(Id a);
  Id sum_all(Id a);   // -> [1,1]
  Id mean_all(Id a);  // -> [1,1]
  Id sum_rows(Id a);  // [B,N] -> [B,1]
  Id row_dot(Id a, Id b);  // [B,N],[B,N] -> [B,1]
  Id pick_cols(Id m, std::vector<int> idx);  // [B,N] -> [B,1]
  Id conv2d(Id x, Id w, Id bias, const ConvMeta& meta);  // rows are CHW images

  // ---- access ----
  const Tensor& val(Id id) const { return nodes_[static_cast<size_t>(id)].val; }
  double scalar_val(Id id) const;
  /// Gradient of the last backward() target w.r.t. this node.
  const Tensor& grad(Id id) const { return nodes_[static_cast<size_t>(id)].grad; }

  /// Throws NumericError tagged with `site` if the value holds a non-finite.
  void check_finite(Id id, const std::string& site) const;

  /// Reverse sweep from a scalar loss node. UsageError if `loss` is not a
  /// scalar or the tape is empty.
  void backward(Id loss);

  void reset() { used_ = 0; }
  int size() const { return static_cast<int>(used_); }

 private:
  enum class Op {
    kConst, kParam,
    kAdd, kAddRow, kSub, kMul, kDiv, kMin, kNeg, kScale, kAddConst,
    kSigmoid, kTanh, kRelu, kLeakyRelu, kExp, kLog, kSqrt, kSquare, kClamp,
    kMatMul, kConcatCols, kSoftmaxRows, kLogSoftmaxRows,
    kSumAll, kMeanAll, kSumRows, kRowDot, kPickCols, kConv2d,
  };

  struct Node {
    Op op{};
    Id a = -1, b = -1, c = -1;
    double c0 = 0.0, c1 = 0.0;
    std::vector<int> idx;
    ConvMeta conv;
    Parameter* bound = nullptr;
    Tensor val;
    Tensor grad;
  };

  Node& push(Op op, Id a, Id b);
  Node& node(Id id) { return nodes_[static_cast<size_t>(id)]; }
  const Node& node(Id id) const { return nodes_[static_cast<size_t>(id)]; }
  void backward_node(Node& n);

  std::vector<Node> nodes_;
  size_t used_ = 0;
};

}  // namespace dpi
