#pragma once

#include <map>
#include <string>
#include <vector>

#include "dpi/rng.hpp"
#include "dpi/tensor.hpp"

namespace dpi {

/// A named trainable tensor together with its gradient accumulator.
struct Parameter {
  Tensor value;
  Tensor grad;

  explicit Parameter(Tensor init) : value(std::move(init)) {
    grad = Tensor::zeros(value.shape);
  }
  Parameter() = default;

  void zero_grad() {
    for (auto& g : grad.v) g = 0.0;
  }
};

/// Ordered collection of parameters. std::map gives pointer stability (layers
/// keep Parameter* handles) and a deterministic iteration order.
class ParamSet {
 public:
  Parameter& add(const std::string& name, Tensor init) {
    auto [it, inserted] = params_.emplace(name, Parameter(std::move(init)));
    if (!inserted) throw UsageError("ParamSet: duplicate parameter " + name);
    return it->second;
  }

  Parameter& at(const std::string& name) {
    auto it = params_.find(name);
    if (it == params_.end()) throw UsageError("ParamSet: unknown parameter " + name);
    return it->second;
  }
  const Parameter& at(const std::string& name) const {
    auto it = params_.find(name);
    if (it == params_.end()) throw UsageError("ParamSet: unknown parameter " + name);
    return it->second;
  }
  bool contains(const std::string& name) const { return params_.count(name) > 0; }

  void zero_grad() {
    for (auto& [_, p] : params_) p.zero_grad();
  }

  size_t size() const { return params_.size(); }
  int numel() const {
    int n = 0;
    for (const auto& [_, p] : params_) n += p.value.numel();
    return n;
  }

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

 private:
  std::map<std::string, Parameter> params_;
};

/// Uniform(-a, a) with a = sqrt(6 / (fan_in + fan_out)).
inline Tensor glorot_uniform(std::vector<int> shape, int fan_in, int fan_out, Rng& rng) {
  Tensor t = Tensor::zeros(std::move(shape));
  const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (auto& x : t.v) x = rng.uniform(-a, a);
  return t;
}

}  // namespace dpi
