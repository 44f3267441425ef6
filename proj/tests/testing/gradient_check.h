/* Copyright 2026 The HetGNN Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef HETGNN_TESTS_TESTING_GRADIENT_CHECK_H_
#define HETGNN_TESTS_TESTING_GRADIENT_CHECK_H_

// Central finite-difference oracle for tape gradients. Independent of the
// backward functions it checks: it only ever evaluates forward values.

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hetgnn/autodiff.h"

namespace hetgnn::testing {

using LossFn = std::function<Tensor(const std::map<std::string, Tensor>&)>;

// Central differences carry roundoff of about eps * |loss| / h (~1e-11 for
// h = 1e-5). Gradients whose norm is below this floor, such as ones that
// vanish analytically, are compared in absolute terms against it.
inline constexpr double kNormFloor = 1e-6;

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst_input;
};

// Relative error per input tensor:
//   ||analytic - numeric||_2 / max(||analytic||_2, ||numeric||_2, kNormFloor)
inline GradCheckResult CheckGradients(const LossFn& loss_fn,
                                      const std::map<std::string, DenseTensor>& inputs,
                                      double h = 1e-5) {
  Tape tape;
  std::map<std::string, Tensor> watched;
  for (const auto& [name, value] : inputs) {
    watched.emplace(name, tape.Watch(name, value.Cast(DType::kFloat64)));
  }
  const std::map<std::string, DenseTensor> analytic = tape.Backward(loss_fn(watched));

  auto evaluate = [&](const std::string& name, const DenseTensor& replaced) {
    std::map<std::string, Tensor> constants;
    for (const auto& [n, v] : inputs) {
      constants.emplace(n, Tensor(n == name ? replaced : v.Cast(DType::kFloat64)));
    }
    return loss_fn(constants).value().flat(0);
  };

  GradCheckResult result;
  for (const auto& [name, value] : inputs) {
    std::vector<double> base = value.Cast(DType::kFloat64).ToDoubles();
    std::vector<double> numeric(base.size());
    for (size_t i = 0; i < base.size(); ++i) {
      std::vector<double> plus = base;
      std::vector<double> minus = base;
      plus[i] += h;
      minus[i] -= h;
      numeric[i] = (evaluate(name, DenseTensor(value.shape(), plus)) -
                    evaluate(name, DenseTensor(value.shape(), minus))) /
                   (2.0 * h);
    }
    std::vector<double> exact(base.size(), 0.0);
    if (auto it = analytic.find(name); it != analytic.end()) exact = it->second.ToDoubles();
    double diff = 0.0, norm_a = 0.0, norm_n = 0.0;
    for (size_t i = 0; i < base.size(); ++i) {
      diff += (exact[i] - numeric[i]) * (exact[i] - numeric[i]);
      norm_a += exact[i] * exact[i];
      norm_n += numeric[i] * numeric[i];
    }
    const double rel = std::sqrt(diff) /
                       std::max({std::sqrt(norm_a), std::sqrt(norm_n), kNormFloor});
    if (rel >= result.max_relative_error) {
      result.max_relative_error = rel;
      result.worst_input = name;
    }
  }
  return result;
}

}  // namespace hetgnn::testing

#endif  // HETGNN_TESTS_TESTING_GRADIENT_CHECK_H_
