#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include "dpi/errors.hpp"

namespace dpi {

/// Dense row-major tensor of doubles. Most of the code treats tensors as
/// 2-D matrices [rows, cols]; scalars are stored as [1, 1].
struct Tensor {
  std::vector<int> shape;
  std::vector<double> v;

  Tensor() = default;
  Tensor(std::vector<int> s, std::vector<double> values)
      : shape(std::move(s)), v(std::move(values)) {
    if (numel() != static_cast<int>(v.size()))
      throw UsageError("Tensor: shape/value size mismatch");
  }

  static Tensor zeros(std::vector<int> s) {
    Tensor t;
    t.shape = std::move(s);
    t.v.assign(static_cast<size_t>(t.numel()), 0.0);
    return t;
  }
  static Tensor full(std::vector<int> s, double c) {
    Tensor t = zeros(std::move(s));
    for (auto& x : t.v) x = c;
    return t;
  }
  static Tensor scalar(double c) { return Tensor({1, 1}, {c}); }
  /// 1 x n row vector.
  static Tensor row(std::vector<double> values) {
    const int n = static_cast<int>(values.size());
    return Tensor({1, n}, std::move(values));
  }

  int numel() const {
    int n = 1;
    for (int d : shape) n *= d;
    return shape.empty() ? 0 : n;
  }
  int rows() const { return shape.empty() ? 0 : shape[0]; }
  int cols() const { return shape.size() < 2 ? 1 : shape[1]; }

  double& at(int r, int c) { return v[static_cast<size_t>(r) * cols() + c]; }
  double at(int r, int c) const { return v[static_cast<size_t>(r) * cols() + c]; }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }

  bool finite() const {
    for (double x : v)
      if (!std::isfinite(x)) return false;
    return true;
  }
};

}  // namespace dpi
