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
#ifndef HETGNN_OPTIMIZER_H_
#define HETGNN_OPTIMIZER_H_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hetgnn/parameters.h"

namespace hetgnn {

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int64_t step = 0;
  std::map<std::string, DenseTensor> m;  // first moments
  std::map<std::string, DenseTensor> v;  // second moments
  std::set<std::string> warned;          // parameters already reported as skipped
};

// One bias-corrected Adam update of every parameter in `params`. Parameters
// without a gradient are left untouched; their names are returned (and
// logged once per parameter).
std::vector<std::string> AdamStep(ParameterStore& params,
                                  const std::map<std::string, DenseTensor>& grads,
                                  AdamState& state, double learning_rate);

// base_lr * (floor + (1 - floor) * 0.5 * (1 + cos(pi * min(step, total) / total)))
double CosineDecayLearningRate(int64_t step, int64_t total_steps, double base_lr,
                               double floor_fraction = 0.0);

}  // namespace hetgnn

#endif  // HETGNN_OPTIMIZER_H_
