#pragma once

#include <map>
#include <string>

#include "dpi/params.hpp"

namespace dpi {

struct AdamConfig {
  double lr = 2.5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Bias-corrected Adam. init() must be called before the first step();
/// step() consumes and then zeroes the accumulated gradients.
class Adam {
 public:
  Adam() = default;
  explicit Adam(AdamConfig cfg) : cfg_(cfg) {}

  void init(const ParamSet& params) {
    m_.clear();
    v_.clear();
    for (const auto& [name, p] : params) {
      m_.emplace(name, Tensor::zeros(p.value.shape));
      v_.emplace(name, Tensor::zeros(p.value.shape));
    }
    t_ = 0;
    initialized_ = true;
  }

  void step(ParamSet& params) {
    if (!initialized_) throw UsageError("Adam::step before init");
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (auto& [name, p] : params) {
      Tensor& m = m_.at(name);
      Tensor& v = v_.at(name);
      for (size_t i = 0; i < p.value.v.size(); ++i) {
        const double g = p.grad.v[i];
        m.v[i] = cfg_.beta1 * m.v[i] + (1.0 - cfg_.beta1) * g;
        v.v[i] = cfg_.beta2 * v.v[i] + (1.0 - cfg_.beta2) * g * g;
        const double mhat = m.v[i] / bc1;
        const double vhat = v.v[i] / bc2;
        p.value.v[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
      }
    }
    params.zero_grad();
  }

  int64_t step_count() const { return t_; }
  AdamConfig& config() { return cfg_; }

 private:
  AdamConfig cfg_;
  std::map<std::string, Tensor> m_;
  std::map<std::string, Tensor> v_;
  int64_t t_ = 0;
  bool initialized_ = false;
};

}  // namespace dpi
