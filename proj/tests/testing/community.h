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

#ifndef HETGNN_TESTS_TESTING_COMMUNITY_H_
#define HETGNN_TESTS_TESTING_COMMUNITY_H_

#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "hetgnn/runner.h"

namespace hetgnn::testing {

// Independent separability check: 1-D logistic regression on the root's
// degree, fit by plain gradient descent.
inline double LogisticOnDegreeAccuracy(const CommunityData& data) {
  std::map<std::string, double> degree;
  for (const auto& [s, t] : data.knows) degree[s] += 1;
  const size_t n = data.user_ids.size();
  std::vector<double> x(n);
  double mean = 0, var = 0;
  for (size_t i = 0; i < n; ++i) mean += x[i] = degree[data.user_ids[i]];
  mean /= n;
  for (double v : x) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / n);
  for (double& v : x) v = (v - mean) / sd;
  double w = 0, b = 0;
  for (int it = 0; it < 2000; ++it) {
    double gw = 0, gb = 0;
    for (size_t i = 0; i < n; ++i) {
      const double p = 1 / (1 + std::exp(-(w * x[i] + b)));
      gw += (p - data.blocks[i]) * x[i];
      gb += p - data.blocks[i];
    }
    w -= 0.5 * gw / n;
    b -= 0.5 * gb / n;
  }
  int correct = 0;
  for (size_t i = 0; i < n; ++i) correct += ((w * x[i] + b > 0) ? 1 : 0) == data.blocks[i];
  return static_cast<double>(correct) / n;
}

inline std::vector<int64_t> Range(int64_t n) {
  std::vector<int64_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

// 200 steps at batch 20.
inline TrainerConfig CommunityTrainer() {
  TrainerConfig t;
  t.batch_size = 20;
  t.epochs = 20;  // 10 steps per epoch, 200 steps
  t.learning_rate = 0.01;
  t.seed = 5;
  return t;
}

inline TaskConfig CommunityTask() {
  return TaskConfig{TaskKind::kRootMulticlass, "user", 2, "label", LabelSource::kRootNode};
}

struct CommunitySplits {
  GraphSchema schema;
  std::vector<GraphTensor> train, valid;
};

// 200 training roots and 200 held-out roots, built once.
inline const CommunitySplits& Splits() {
  static const CommunitySplits* splits = [] {
    auto* s = new CommunitySplits;
    CommunityData train = MakeCommunityData({});
    // Held-out roots come from an independent draw of the same generator.
    CommunityOptions vo;
    vo.seed = 2;
    CommunityData valid = MakeCommunityData(vo);
    s->schema = train.schema;
    s->train = CommunityGraphs(train, Range(200));
    s->valid = CommunityGraphs(valid, Range(200));
    return s;
  }();
  return *splits;
}

}  // namespace hetgnn::testing

#endif  // HETGNN_TESTS_TESTING_COMMUNITY_H_
