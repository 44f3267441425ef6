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
#ifndef HETGNN_TESTS_TESTING_LAYER_CHECK_H_
#define HETGNN_TESTS_TESTING_LAYER_CHECK_H_

// Finite-difference check of layer parameter gradients. The numeric side
// perturbs values in the ParameterStore and re-runs forward passes without
// a tape, so it shares nothing with the backward functions.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "hetgnn/layers.h"
#include "testing/dense_oracle.h"
#include "testing/gradient_check.h"

namespace hetgnn::testing {

using LayerLossFn = std::function<Tensor(RunContext&)>;

inline constexpr uint64_t kCheckSeed = 99;

inline GradCheckResult CheckLayerGradients(ParameterStore& params, const LayerLossFn& loss_fn,
                                           bool training = false, double h = 1e-5) {
  Tape tape;
  RunContext ctx(&params, &tape, training, kCheckSeed, 0);
  const std::map<std::string, DenseTensor> analytic = tape.Backward(loss_fn(ctx));

  auto evaluate = [&]() {
    RunContext plain(&params, nullptr, training, kCheckSeed, 0);
    return loss_fn(plain).value().flat(0);
  };

  GradCheckResult result;
  for (const std::string& name : params.Names()) {
    const DenseTensor original = params.Get(name);
    std::vector<double> base = original.ToDoubles();
    std::vector<double> numeric(base.size());
    for (size_t i = 0; i < base.size(); ++i) {
      std::vector<double> v = base;
      v[i] = base[i] + h;
      params.Set(name, DenseTensor::FromDoubles(original.shape(), v, params.dtype()));
      const double plus = evaluate();
      v[i] = base[i] - h;
      params.Set(name, DenseTensor::FromDoubles(original.shape(), v, params.dtype()));
      const double minus = evaluate();
      numeric[i] = (plus - minus) / (2.0 * h);
    }
    params.Set(name, original);
    std::vector<double> exact(base.size(), 0.0);
    if (auto it = analytic.find(name); it != analytic.end()) exact = it->second.ToDoubles();
    double diff = 0.0, norm_a = 0.0, norm_n = 0.0;
    for (size_t i = 0; i < base.size(); ++i) {
      diff += (exact[i] - numeric[i]) * (exact[i] - numeric[i]);
      norm_a += exact[i] * exact[i];
      norm_n += numeric[i] * numeric[i];
    }
    const double rel =
        std::sqrt(diff) / std::max({std::sqrt(norm_a), std::sqrt(norm_n), kNormFloor});
    if (rel >= result.max_relative_error) {
      result.max_relative_error = rel;
      result.worst_input = name;
    }
  }
  return result;
}

// A scalar that depends on every output entry with distinct weights.
inline Tensor ProbeLoss(const Tensor& out, uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> w(static_cast<size_t>(out.value().size()));
  for (double& x : w) x = dist(gen);
  return Sum(Multiply(out, Tensor(DenseTensor::FromDoubles(out.shape(), w, out.dtype()))));
}

// ---- dense loop-oracle helpers

inline Dense ParamDense(const ParameterStore& params, const std::string& name) {
  const DenseTensor& t = params.Get(name);
  Dense d(t.dim(0), t.rank() > 1 ? t.dim(1) : 1);
  d.v = t.ToDoubles();
  return d;
}

inline Dense StateDense(const GraphTensor& graph, const std::string& node_set) {
  const DenseTensor& t = graph.node_set(node_set).features.at(kHiddenState).tensor().value();
  Dense d(t.dim(0), t.dim(1));
  d.v = t.ToDoubles();
  return d;
}

inline Dense ToDense(const Tensor& t) {
  Dense d(t.dim(0), t.rank() > 1 ? t.dim(1) : 1);
  d.v = t.value().ToDoubles();
  return d;
}

inline std::vector<double> Row(const Dense& m, int64_t r) {
  return {m.v.begin() + r * m.cols, m.v.begin() + (r + 1) * m.cols};
}

// y = x W + b for one row.
inline std::vector<double> Affine(const std::vector<double>& x, const Dense& w,
                                  const std::vector<double>& b = {}) {
  std::vector<double> y(static_cast<size_t>(w.cols), 0.0);
  for (int64_t j = 0; j < w.cols; ++j) {
    double acc = b.empty() ? 0.0 : b[j];
    for (int64_t k = 0; k < w.rows; ++k) acc += x[k] * w(k, j);
    y[j] = acc;
  }
  return y;
}

inline std::vector<double> Cat(std::vector<double> a, const std::vector<double>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

inline double ReluD(double x) { return x > 0 ? x : 0.0; }

// sigma(D^-1/2 (A + I) D^-1/2 H W) with A[v, u] counting edges u -> v.
inline Dense GcnOracle(const GraphTensor& g, const Dense& w, bool relu) {
  const Dense h = StateDense(g, "n");
  const int64_t n = h.rows;
  Dense a_hat(n, n);
  for (int64_t i = 0; i < n; ++i) a_hat(i, i) = 1.0;
  const Adjacency& adj = g.edge_set("e").adjacency;
  for (int64_t e = 0; e < adj.size(); ++e) a_hat(adj.target()[e], adj.source()[e]) += 1.0;
  std::vector<double> d(n, 0.0);
  for (int64_t i = 0; i < n; ++i)
    for (int64_t j = 0; j < n; ++j) d[i] += a_hat(i, j);
  Dense norm(n, n);
  for (int64_t i = 0; i < n; ++i)
    for (int64_t j = 0; j < n; ++j) norm(i, j) = a_hat(i, j) / std::sqrt(d[i] * d[j]);
  Dense out = MatMul(MatMul(norm, h), w);
  if (relu) {
    for (double& x : out.v) x = ReluD(x);
  }
  return out;
}

}  // namespace hetgnn::testing

#endif  // HETGNN_TESTS_TESTING_LAYER_CHECK_H_
