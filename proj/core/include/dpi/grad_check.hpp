#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dpi/params.hpp"

namespace dpi {

struct GradCheckReport {
  struct Entry {
    std::string name;
    double max_rel_err = 0.0;
  };
  std::vector<Entry> entries;
  double tolerance = 0.0;
  bool pass = false;
};

/// Compares analytic gradients against central finite differences.
///
/// `loss` must rebuild the computation from the current parameter values and
/// return the scalar loss; when `with_grad` is true it must also accumulate
/// gradients into the ParamSet. Relative error per element is
/// |a - n| / max(|a| + |n|, 1e-4).
inline GradCheckReport grad_check(const std::function<double(bool with_grad)>& loss,
                                  ParamSet& params, double tolerance,
                                  double step = 1e-5) {
  if (params.size() == 0) throw UsageError("grad_check: no parameters");
  GradCheckReport report;
  report.tolerance = tolerance;

  params.zero_grad();
  loss(/*with_grad=*/true);
  std::map<std::string, Tensor> analytic;
  for (auto& [name, p] : params) analytic.emplace(name, p.grad);

  for (auto& [name, p] : params) {
    double worst = 0.0;
    for (size_t i = 0; i < p.value.v.size(); ++i) {
      const double saved = p.value.v[i];
      p.value.v[i] = saved + step;
      const double up = loss(false);
      p.value.v[i] = saved - step;
      const double down = loss(false);
      p.value.v[i] = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double a = analytic.at(name).v[i];
      const double rel = std::abs(a - numeric) /
                         std::max(std::abs(a) + std::abs(numeric), 1e-4);
      worst = std::max(worst, rel);
    }
    report.entries.push_back({name, worst});
  }

  params.zero_grad();
  report.pass = true;
  for (const auto& e : report.entries)
    if (!(e.max_rel_err < tolerance)) report.pass = false;
  return report;
}

}  // namespace dpi
