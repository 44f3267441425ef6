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
#include "hetgnn/optimizer.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hetgnn/logging.h"

namespace hetgnn {

std::vector<std::string> AdamStep(ParameterStore& params,
                                  const std::map<std::string, DenseTensor>& grads,
                                  AdamState& state, double learning_rate) {
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(state.beta1, t);
  const double correction2 = 1.0 - std::pow(state.beta2, t);
  std::vector<std::string> skipped;
  for (const std::string& name : params.Names()) {
    auto g_it = grads.find(name);
    if (g_it == grads.end()) {
      skipped.push_back(name);
      if (state.warned.insert(name).second) {
        LogWarning("adam: no gradient for parameter '" + name + "', skipping");
      }
      continue;
    }
    const DenseTensor& value = params.Get(name);
    if (g_it->second.shape() != value.shape()) {
      throw DimensionError("adam: gradient for '" + name + "' has shape " +
                           ShapeString(g_it->second.shape()) + ", parameter has " +
                           ShapeString(value.shape()));
    }
    const std::vector<double> g = g_it->second.ToDoubles();
    std::vector<double> w = value.ToDoubles();
    auto m_it = state.m.find(name);
    std::vector<double> m = m_it == state.m.end() ? std::vector<double>(w.size(), 0.0)
                                                  : m_it->second.ToDoubles();
    auto v_it = state.v.find(name);
    std::vector<double> v = v_it == state.v.end() ? std::vector<double>(w.size(), 0.0)
                                                  : v_it->second.ToDoubles();
    for (size_t i = 0; i < w.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      w[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
    params.Set(name, DenseTensor::FromDoubles(value.shape(), w, value.dtype()));
    state.m.insert_or_assign(name, DenseTensor::FromDoubles(value.shape(), m, value.dtype()));
    state.v.insert_or_assign(name, DenseTensor::FromDoubles(value.shape(), v, value.dtype()));
  }
  return skipped;
}

double CosineDecayLearningRate(int64_t step, int64_t total_steps, double base_lr,
                               double floor_fraction) {
  if (total_steps < 1) throw InvalidArgument("total_steps must be at least 1");
  if (step < 0) throw InvalidArgument("step must be non-negative");
  const double progress =
      static_cast<double>(std::min(step, total_steps)) / static_cast<double>(total_steps);
  const double cosine = 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
  return base_lr * (floor_fraction + (1.0 - floor_fraction) * cosine);
}

}  // namespace hetgnn
