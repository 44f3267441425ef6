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
#include "hetgnn/ops.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "hetgnn/kernels.h"

namespace hetgnn {
namespace {

using Grads = std::vector<std::optional<DenseTensor>>;
using IndexVec = std::shared_ptr<const std::vector<int64_t>>;

IndexVec CopyIndices(std::span<const int64_t> ids) {
  return std::make_shared<const std::vector<int64_t>>(ids.begin(), ids.end());
}

void RequireSameDType(const Tensor& a, const Tensor& b, const char* op) {
  if (a.dtype() != b.dtype()) {
    throw InvalidArgument(std::string(op) + ": mixed dtypes " + DTypeName(a.dtype()) +
                          " and " + DTypeName(b.dtype()));
  }
}

void RequireRank2(const Tensor& t, const char* op) {
  if (t.rank() != 2) {
    throw DimensionError(std::string(op) + " expects a rank-2 tensor, got " +
                         ShapeString(t.shape()));
  }
}

// Row count and flattened row width of a rank>=1 tensor.
int64_t RowWidth(const DenseTensor& t) {
  return t.dim(0) == 0 ? NumElements(Shape(t.shape().begin() + 1, t.shape().end()))
                       : t.size() / t.dim(0);
}

Shape WithLeading(const Shape& shape, int64_t leading) {
  Shape out = shape;
  out[0] = leading;
  return out;
}

}  // namespace

ReduceType ParseReduceType(std::string_view name) {
  if (name == "sum") return ReduceType::kSum;
  if (name == "mean") return ReduceType::kMean;
  if (name == "max") return ReduceType::kMax;
  if (name == "min") return ReduceType::kMin;
  throw InvalidArgument("unknown reduce type '" + std::string(name) + "'");
}

const char* ReduceTypeName(ReduceType type) {
  switch (type) {
    case ReduceType::kSum: return "sum";
    case ReduceType::kMean: return "mean";
    case ReduceType::kMax: return "max";
    case ReduceType::kMin: return "min";
  }
  return "?";
}

Activation Activation::Parse(std::string_view name) {
  if (name == "identity" || name == "linear" || name.empty()) return {};
  if (name == "relu") return {ActivationKind::kRelu};
  if (name == "leaky_relu") return {ActivationKind::kLeakyRelu, 0.2};
  if (name == "sigmoid") return {ActivationKind::kSigmoid};
  if (name == "log1p") return {ActivationKind::kLog1p};
  throw InvalidArgument("unknown activation '" + std::string(name) + "'");
}

std::string Activation::Name() const {
  switch (kind) {
    case ActivationKind::kIdentity: return "identity";
    case ActivationKind::kRelu: return "relu";
    case ActivationKind::kLeakyRelu: return "leaky_relu";
    case ActivationKind::kSigmoid: return "sigmoid";
    case ActivationKind::kLog1p: return "log1p";
  }
  return "?";
}

Tensor Linear(const Tensor& x, const Tensor& weights, const std::optional<Tensor>& bias) {
  RequireRank2(x, "linear");
  RequireRank2(weights, "linear");
  RequireSameDType(x, weights, "linear");
  if (x.dim(1) != weights.dim(0)) {
    throw DimensionError("linear: input " + ShapeString(x.shape()) +
                         " does not match weights " + ShapeString(weights.shape()));
  }
  DenseTensor y = kernels::MatMul(x.value(), weights.value());
  if (bias) {
    RequireSameDType(x, *bias, "linear");
    if (bias->rank() != 1 || bias->dim(0) != weights.dim(1)) {
      throw DimensionError("linear: bias " + ShapeString(bias->shape()) +
                           " does not match weights " + ShapeString(weights.shape()));
    }
    y = DispatchDType(y.dtype(), [&]<typename T>() {
      auto yv = y.data<T>();
      auto bv = bias->value().data<T>();
      std::vector<T> out(yv.begin(), yv.end());
      const int64_t d = weights.dim(1);
      for (size_t i = 0; i < out.size(); ++i) out[i] += bv[i % d];
      return DenseTensor(y.shape(), std::move(out));
    });
  }
  DenseTensor xv = x.value();
  DenseTensor wv = weights.value();
  const bool has_bias = bias.has_value();
  std::vector<Tensor> inputs{x, weights};
  if (bias) inputs.push_back(*bias);
  return Tape::Record(std::move(y), inputs, [xv, wv, has_bias](const DenseTensor& g) {
    Grads grads;
    grads.push_back(kernels::MatMul(g, wv, false, true));
    grads.push_back(kernels::MatMul(xv, g, true, false));
    if (has_bias) grads.push_back(kernels::ColumnSum(g));
    return grads;
  });
}

Tensor Activate(const Tensor& x, Activation act) {
  if (act.kind == ActivationKind::kIdentity) return x;
  DenseTensor xv = x.value();
  DenseTensor y = DispatchDType(xv.dtype(), [&]<typename T>() {
    auto in = xv.data<T>();
    std::vector<T> out(in.size());
    for (size_t i = 0; i < in.size(); ++i) {
      const T v = in[i];
      switch (act.kind) {
        case ActivationKind::kRelu: out[i] = v > T(0) ? v : T(0); break;
        case ActivationKind::kLeakyRelu:
          out[i] = v > T(0) ? v : static_cast<T>(act.alpha * v);
          break;
        case ActivationKind::kSigmoid: out[i] = T(1) / (T(1) + std::exp(-v)); break;
        case ActivationKind::kLog1p: out[i] = std::log1p(v); break;
        case ActivationKind::kIdentity: out[i] = v; break;
      }
    }
    return DenseTensor(xv.shape(), std::move(out));
  });
  DenseTensor yv = y;
  return Tape::Record(std::move(y), std::span(&x, 1), [xv, yv, act](const DenseTensor& g) {
    return Grads{DispatchDType(g.dtype(), [&]<typename T>() {
      auto gi = g.data<T>();
      auto in = xv.data<T>();
      auto out = yv.data<T>();
      std::vector<T> dx(gi.size());
      for (size_t i = 0; i < gi.size(); ++i) {
        T slope = T(1);
        switch (act.kind) {
          case ActivationKind::kRelu: slope = in[i] > T(0) ? T(1) : T(0); break;
          case ActivationKind::kLeakyRelu:
            slope = in[i] > T(0) ? T(1) : static_cast<T>(act.alpha);
            break;
          case ActivationKind::kSigmoid: slope = out[i] * (T(1) - out[i]); break;
          case ActivationKind::kLog1p: slope = T(1) / (T(1) + in[i]); break;
          case ActivationKind::kIdentity: break;
        }
        dx[i] = gi[i] * slope;
      }
      return DenseTensor(g.shape(), std::move(dx));
    })};
  });
}

Tensor ConcatLast(std::span<const Tensor> parts) {
  if (parts.empty()) throw InvalidArgument("concat of zero tensors");
  const int64_t rows = parts[0].dim(0);
  std::vector<int64_t> widths;
  int64_t total = 0;
  for (const Tensor& p : parts) {
    RequireRank2(p, "concat");
    RequireSameDType(parts[0], p, "concat");
    if (p.dim(0) != rows) {
      throw DimensionError("concat: row counts differ (" + ShapeString(parts[0].shape()) +
                           " vs " + ShapeString(p.shape()) + ")");
    }
    widths.push_back(p.dim(1));
    total += p.dim(1);
  }
  if (parts.size() == 1) return parts[0];
  DenseTensor y = DispatchDType(parts[0].dtype(), [&]<typename T>() {
    std::vector<T> out(static_cast<size_t>(rows * total));
    int64_t offset = 0;
    for (size_t k = 0; k < parts.size(); ++k) {
      auto in = parts[k].value().data<T>();
      const int64_t w = widths[k];
      for (int64_t i = 0; i < rows; ++i) {
        std::copy_n(in.data() + i * w, w, out.data() + i * total + offset);
      }
      offset += w;
    }
    return DenseTensor({rows, total}, std::move(out));
  });
  return Tape::Record(std::move(y), parts, [widths, rows, total](const DenseTensor& g) {
    Grads grads;
    int64_t offset = 0;
    for (int64_t w : widths) {
      grads.push_back(DispatchDType(g.dtype(), [&]<typename T>() {
        auto gi = g.data<T>();
        std::vector<T> dx(static_cast<size_t>(rows * w));
        for (int64_t i = 0; i < rows; ++i) {
          std::copy_n(gi.data() + i * total + offset, w, dx.data() + i * w);
        }
        return DenseTensor({rows, w}, std::move(dx));
      }));
      offset += w;
    }
    return grads;
  });
}

Tensor SegmentReduce(const Tensor& values, std::span<const int64_t> segment_ids,
                     int64_t num_segments, ReduceType reduce_type) {
  const DenseTensor& v = values.value();
  if (v.dim(0) != static_cast<int64_t>(segment_ids.size())) {
    throw DimensionError("segment reduce: " + std::to_string(segment_ids.size()) +
                         " segment ids for values " + ShapeString(v.shape()));
  }
  kernels::CheckIndices(segment_ids, num_segments, "segment id");
  const int64_t m = v.dim(0);
  const int64_t d = RowWidth(v);
  const Shape out_shape = WithLeading(v.shape(), num_segments);
  IndexVec ids = CopyIndices(segment_ids);

  std::vector<int64_t> counts(static_cast<size_t>(num_segments), 0);
  for (int64_t s : *ids) ++counts[s];

  if (reduce_type == ReduceType::kSum || reduce_type == ReduceType::kMean) {
    const bool mean = reduce_type == ReduceType::kMean;
    DenseTensor y = DispatchDType(v.dtype(), [&]<typename T>() {
      auto in = v.data<T>();
      std::vector<double> acc(static_cast<size_t>(num_segments * d), 0.0);
      for (int64_t i = 0; i < m; ++i) {
        const int64_t s = (*ids)[i];
        for (int64_t j = 0; j < d; ++j) acc[s * d + j] += in[i * d + j];
      }
      std::vector<T> out(acc.size());
      for (int64_t s = 0; s < num_segments; ++s) {
        const double div = mean ? static_cast<double>(std::max<int64_t>(counts[s], 1)) : 1.0;
        for (int64_t j = 0; j < d; ++j) out[s * d + j] = static_cast<T>(acc[s * d + j] / div);
      }
      return DenseTensor(out_shape, std::move(out));
    });
    Shape in_shape = v.shape();
    return Tape::Record(std::move(y), std::span(&values, 1),
                        [ids, counts, mean, in_shape, d](const DenseTensor& g) {
      return Grads{DispatchDType(g.dtype(), [&]<typename T>() {
        auto gi = g.data<T>();
        std::vector<T> dx(static_cast<size_t>(NumElements(in_shape)));
        for (size_t i = 0; i < ids->size(); ++i) {
          const int64_t s = (*ids)[i];
          const double div = mean ? static_cast<double>(std::max<int64_t>(counts[s], 1)) : 1.0;
          for (int64_t j = 0; j < d; ++j) dx[i * d + j] = static_cast<T>(gi[s * d + j] / div);
        }
        return DenseTensor(in_shape, std::move(dx));
      })};
    });
  }

  // max / min: remember the winning row per (segment, column).
  const bool is_max = reduce_type == ReduceType::kMax;
  auto winners = std::make_shared<std::vector<int64_t>>(static_cast<size_t>(num_segments * d), -1);
  DenseTensor y = DispatchDType(v.dtype(), [&]<typename T>() {
    auto in = v.data<T>();
    std::vector<T> out(static_cast<size_t>(num_segments * d), T(0));
    for (int64_t i = 0; i < m; ++i) {
      const int64_t s = (*ids)[i];
      for (int64_t j = 0; j < d; ++j) {
        int64_t& w = (*winners)[s * d + j];
        const T x = in[i * d + j];
        if (w < 0 || (is_max ? x > out[s * d + j] : x < out[s * d + j])) {
          w = i;
          out[s * d + j] = x;
        }
      }
    }
    return DenseTensor(out_shape, std::move(out));
  });
  Shape in_shape = v.shape();
  return Tape::Record(std::move(y), std::span(&values, 1), [winners, in_shape, d](const DenseTensor& g) {
    return Grads{DispatchDType(g.dtype(), [&]<typename T>() {
      auto gi = g.data<T>();
      std::vector<T> dx(static_cast<size_t>(NumElements(in_shape)), T(0));
      for (size_t k = 0; k < winners->size(); ++k) {
        const int64_t i = (*winners)[k];
        if (i >= 0) dx[i * d + static_cast<int64_t>(k) % d] += gi[k];
      }
      return DenseTensor(in_shape, std::move(dx));
    })};
  });
}

Tensor SegmentSoftmax(const Tensor& logits, std::span<const int64_t> segment_ids,
                      int64_t num_segments) {
  const DenseTensor& v = logits.value();
  if (v.dim(0) != static_cast<int64_t>(segment_ids.size())) {
    throw DimensionError("segment softmax: " + std::to_string(segment_ids.size()) +
                         " segment ids for logits " + ShapeString(v.shape()));
  }
  kernels::CheckIndices(segment_ids, num_segments, "segment id");
  const int64_t m = v.dim(0);
  const int64_t d = RowWidth(v);
  IndexVec ids = CopyIndices(segment_ids);
  DenseTensor y = DispatchDType(v.dtype(), [&]<typename T>() {
    auto in = v.data<T>();
    std::vector<double> maxima(static_cast<size_t>(num_segments * d),
                               -std::numeric_limits<double>::infinity());
    for (int64_t i = 0; i < m; ++i) {
      const int64_t s = (*ids)[i];
      for (int64_t j = 0; j < d; ++j) {
        maxima[s * d + j] = std::max<double>(maxima[s * d + j], in[i * d + j]);
      }
    }
    std::vector<double> ex(static_cast<size_t>(m * d));
    std::vector<double> sums(static_cast<size_t>(num_segments * d), 0.0);
    for (int64_t i = 0; i < m; ++i) {
      const int64_t s = (*ids)[i];
      for (int64_t j = 0; j < d; ++j) {
        ex[i * d + j] = std::exp(in[i * d + j] - maxima[s * d + j]);
        sums[s * d + j] += ex[i * d + j];
      }
    }
    std::vector<T> out(ex.size());
    for (int64_t i = 0; i < m; ++i) {
      const int64_t s = (*ids)[i];
      for (int64_t j = 0; j < d; ++j) out[i * d + j] = static_cast<T>(ex[i * d + j] / sums[s * d + j]);
    }
    return DenseTensor(v.shape(), std::move(out));
  });
  DenseTensor yv = y;
  return Tape::Record(std::move(y), std::span(&logits, 1),
                      [ids, yv, num_segments, d](const DenseTensor& g) {
    return Grads{DispatchDType(g.dtype(), [&]<typename T>() {
      auto gi = g.data<T>();
      auto out = yv.data<T>();
      const int64_t m = static_cast<int64_t>(ids->size());
      std::vector<double> dots(static_cast<size_t>(num_segments * d), 0.0);
      for (int64_t i = 0; i < m; ++i) {
        const int64_t s = (*ids)[i];
        for (int64_t j = 0; j < d; ++j) dots[s * d + j] += static_cast<double>(out[i * d + j]) * gi[i * d + j];
      }
      std::vector<T> dx(static_cast<size_t>(m * d));
      for (int64_t i = 0; i < m; ++i) {
        const int64_t s = (*ids)[i];
        for (int64_t j = 0; j < d; ++j) {
          dx[i * d + j] = static_cast<T>(out[i * d + j] * (gi[i * d + j] - dots[s * d + j]));
        }
      }
      return DenseTensor(yv.shape(), std::move(dx));
    })};
  });
}

Tensor GatherRows(const Tensor& values, std::span<const int64_t> indices) {
  const DenseTensor& v = values.value();
  const int64_t n = v.dim(0);
  kernels::CheckIndices(indices, n, "gather index");
  const int64_t d = RowWidth(v);
  const int64_t m = static_cast<int64_t>(indices.size());
  IndexVec ids = CopyIndices(indices);
  DenseTensor y = DispatchDType(v.dtype(), [&]<typename T>() {
    auto in = v.data<T>();
    std::vector<T> out(static_cast<size_t>(m * d));
    for (int64_t i = 0; i < m; ++i) {
      std::copy_n(in.data() + (*ids)[i] * d, d, out.data() + i * d);
    }
    return DenseTensor(WithLeading(v.shape(), m), std::move(out));
  });
  Shape in_shape = v.shape();
  return Tape::Record(std::move(y), std::span(&values, 1), [ids, in_shape, d](const DenseTensor& g) {
    DenseTensor flat = g.Reshaped({static_cast<int64_t>(ids->size()), d});
    return Grads{kernels::ScatterAddRows(flat, *ids, in_shape[0]).Reshaped(in_shape)};
  });
}

Tensor LayerNorm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double epsilon) {
  RequireRank2(x, "layer_norm");
  RequireSameDType(x, gamma, "layer_norm");
  RequireSameDType(x, beta, "layer_norm");
  const int64_t n = x.dim(0);
  const int64_t d = x.dim(1);
  if (d < 1) throw DimensionError("layer_norm needs at least one column");
  if (gamma.shape() != Shape{d} || beta.shape() != Shape{d}) {
    throw DimensionError("layer_norm: gamma/beta must have shape [" + std::to_string(d) + "]");
  }
  auto normalized = std::make_shared<std::vector<double>>(static_cast<size_t>(n * d));
  auto inv_std = std::make_shared<std::vector<double>>(static_cast<size_t>(n));
  DenseTensor y = DispatchDType(x.dtype(), [&]<typename T>() {
    auto in = x.value().data<T>();
    auto gm = gamma.value().data<T>();
    auto bt = beta.value().data<T>();
    std::vector<T> out(static_cast<size_t>(n * d));
    for (int64_t i = 0; i < n; ++i) {
      double mean = 0.0;
      for (int64_t j = 0; j < d; ++j) mean += in[i * d + j];
      mean /= static_cast<double>(d);
      double var = 0.0;
      for (int64_t j = 0; j < d; ++j) {
        const double c = in[i * d + j] - mean;
        var += c * c;
      }
      var /= static_cast<double>(d);
      const double s = 1.0 / std::sqrt(var + epsilon);
      (*inv_std)[i] = s;
      for (int64_t j = 0; j < d; ++j) {
        const double z = (in[i * d + j] - mean) * s;
        (*normalized)[i * d + j] = z;
        out[i * d + j] = static_cast<T>(z * gm[j] + bt[j]);
      }
    }
    return DenseTensor(x.shape(), std::move(out));
  });
  DenseTensor gamma_v = gamma.value();
  std::vector<Tensor> inputs{x, gamma, beta};
  return Tape::Record(std::move(y), inputs, [normalized, inv_std, gamma_v, n, d](const DenseTensor& g) {
    return DispatchDType(g.dtype(), [&]<typename T>() {
      auto gi = g.data<T>();
      auto gm = gamma_v.data<T>();
      std::vector<T> dx(static_cast<size_t>(n * d));
      std::vector<double> dgamma(static_cast<size_t>(d), 0.0);
      std::vector<double> dbeta(static_cast<size_t>(d), 0.0);
      std::vector<double> dz(static_cast<size_t>(d));
      for (int64_t i = 0; i < n; ++i) {
        double mean_dz = 0.0;
        double mean_dz_z = 0.0;
        for (int64_t j = 0; j < d; ++j) {
          const double z = (*normalized)[i * d + j];
          dgamma[j] += gi[i * d + j] * z;
          dbeta[j] += gi[i * d + j];
          dz[j] = static_cast<double>(gi[i * d + j]) * gm[j];
          mean_dz += dz[j];
          mean_dz_z += dz[j] * z;
        }
        mean_dz /= static_cast<double>(d);
        mean_dz_z /= static_cast<double>(d);
        for (int64_t j = 0; j < d; ++j) {
          const double z = (*normalized)[i * d + j];
          dx[i * d + j] = static_cast<T>((*inv_std)[i] * (dz[j] - mean_dz - z * mean_dz_z));
        }
      }
      return Grads{DenseTensor({n, d}, std::move(dx)),
                   DenseTensor({d}, std::vector<T>(dgamma.begin(), dgamma.end())),
                   DenseTensor({d}, std::vector<T>(dbeta.begin(), dbeta.end()))};
    });
  });
}

Tensor Dropout(const Tensor& x, double rate, bool training, RngStream& rng) {
  if (rate < 0.0 || rate >= 1.0) {
    throw InvalidArgument("dropout rate must be in [0, 1), got " + std::to_string(rate));
  }
  if (!training || rate == 0.0) return x;
  const double keep_scale = 1.0 / (1.0 - rate);
  auto mask = std::make_shared<std::vector<double>>(static_cast<size_t>(x.value().size()));
  for (double& m : *mask) m = rng.NextDouble() >= rate ? keep_scale : 0.0;
  DenseTensor y = DispatchDType(x.dtype(), [&]<typename T>() {
    auto in = x.value().data<T>();
    std::vector<T> out(in.size());
    for (size_t i = 0; i < in.size(); ++i) out[i] = static_cast<T>(in[i] * (*mask)[i]);
    return DenseTensor(x.shape(), std::move(out));
  });
  return Tape::Record(std::move(y), std::span(&x, 1), [mask](const DenseTensor& g) {
    return Grads{DispatchDType(g.dtype(), [&]<typename T>() {
      auto gi = g.data<T>();
      std::vector<T> dx(gi.size());
      for (size_t i = 0; i < gi.size(); ++i) dx[i] = static_cast<T>(gi[i] * (*mask)[i]);
      return DenseTensor(g.shape(), std::move(dx));
    })};
  });
}

Tensor Add(const Tensor& a, const Tensor& b) {
  DenseTensor y = kernels::Add(a.value(), b.value());
  std::vector<Tensor> inputs{a, b};
  return Tape::Record(std::move(y), inputs, [](const DenseTensor& g) { return Grads{g, g}; });
}

Tensor AddN(std::span<const Tensor> terms) {
  if (terms.empty()) throw InvalidArgument("add_n of zero tensors");
  if (terms.size() == 1) return terms[0];
  DenseTensor y = terms[0].value();
  for (size_t i = 1; i < terms.size(); ++i) y = kernels::Add(y, terms[i].value());
  const size_t k = terms.size();
  return Tape::Record(std::move(y), terms, [k](const DenseTensor& g) { return Grads(k, g); });
}

Tensor Multiply(const Tensor& a, const Tensor& b) {
  DenseTensor av = a.value();
  DenseTensor bv = b.value();
  DenseTensor y = kernels::Multiply(av, bv);
  std::vector<Tensor> inputs{a, b};
  return Tape::Record(std::move(y), inputs, [av, bv](const DenseTensor& g) {
    return Grads{kernels::Multiply(g, bv), kernels::Multiply(g, av)};
  });
}

Tensor Scale(const Tensor& x, double factor) {
  return Tape::Record(kernels::Scale(x.value(), factor), std::span(&x, 1),
                      [factor](const DenseTensor& g) { return Grads{kernels::Scale(g, factor)}; });
}

Tensor ScaleRows(const Tensor& x, std::span<const double> factors) {
  const DenseTensor& v = x.value();
  if (v.dim(0) != static_cast<int64_t>(factors.size())) {
    throw DimensionError("scale_rows: " + std::to_string(factors.size()) +
                         " factors for " + ShapeString(v.shape()));
  }
  auto f = std::make_shared<const std::vector<double>>(factors.begin(), factors.end());
  auto apply = [f](const DenseTensor& t) {
    const int64_t d = RowWidth(t);
    return DispatchDType(t.dtype(), [&]<typename T>() {
      auto in = t.data<T>();
      std::vector<T> out(in.size());
      for (size_t i = 0; i < in.size(); ++i) {
        out[i] = static_cast<T>(in[i] * (*f)[i / static_cast<size_t>(d)]);
      }
      return DenseTensor(t.shape(), std::move(out));
    });
  };
  return Tape::Record(apply(v), std::span(&x, 1),
                      [apply](const DenseTensor& g) { return Grads{apply(g)}; });
}

Tensor Sum(const Tensor& x) {
  Shape in_shape = x.shape();
  DenseTensor y = DispatchDType(x.dtype(), [&]<typename T>() {
    double acc = 0.0;
    for (T v : x.value().data<T>()) acc += v;
    return DenseTensor({1}, std::vector<T>{static_cast<T>(acc)});
  });
  return Tape::Record(std::move(y), std::span(&x, 1), [in_shape](const DenseTensor& g) {
    return Grads{DenseTensor::Filled(in_shape, g.flat(0), g.dtype())};
  });
}

Tensor SumSquares(const Tensor& x) {
  DenseTensor xv = x.value();
  DenseTensor y = DispatchDType(x.dtype(), [&]<typename T>() {
    double acc = 0.0;
    for (T v : xv.data<T>()) acc += static_cast<double>(v) * v;
    return DenseTensor({1}, std::vector<T>{static_cast<T>(acc)});
  });
  return Tape::Record(std::move(y), std::span(&x, 1), [xv](const DenseTensor& g) {
    return Grads{kernels::Scale(xv, 2.0 * g.flat(0))};
  });
}

Tensor HeadDot(const Tensor& x, const Tensor& kernel) {
  RequireRank2(x, "head_dot");
  RequireRank2(kernel, "head_dot");
  RequireSameDType(x, kernel, "head_dot");
  const int64_t m = x.dim(0);
  const int64_t channels = kernel.dim(0);
  const int64_t heads = kernel.dim(1);
  if (x.dim(1) != heads * channels) {
    throw DimensionError("head_dot: input " + ShapeString(x.shape()) +
                         " does not match kernel " + ShapeString(kernel.shape()));
  }
  DenseTensor xv = x.value();
  DenseTensor kv = kernel.value();
  DenseTensor y = DispatchDType(x.dtype(), [&]<typename T>() {
    auto in = xv.data<T>();
    auto k = kv.data<T>();
    std::vector<T> out(static_cast<size_t>(m * heads));
    for (int64_t i = 0; i < m; ++i) {
      for (int64_t h = 0; h < heads; ++h) {
        double acc = 0.0;
        for (int64_t c = 0; c < channels; ++c) {
          acc += static_cast<double>(in[i * heads * channels + h * channels + c]) * k[c * heads + h];
        }
        out[i * heads + h] = static_cast<T>(acc);
      }
    }
    return DenseTensor({m, heads}, std::move(out));
  });
  std::vector<Tensor> inputs{x, kernel};
  return Tape::Record(std::move(y), inputs, [xv, kv, m, heads, channels](const DenseTensor& g) {
    return DispatchDType(g.dtype(), [&]<typename T>() {
      auto gi = g.data<T>();
      auto in = xv.data<T>();
      auto k = kv.data<T>();
      std::vector<T> dx(static_cast<size_t>(m * heads * channels));
      std::vector<double> dk(static_cast<size_t>(channels * heads), 0.0);
      for (int64_t i = 0; i < m; ++i) {
        for (int64_t h = 0; h < heads; ++h) {
          const double gv = gi[i * heads + h];
          for (int64_t c = 0; c < channels; ++c) {
            const int64_t xi = i * heads * channels + h * channels + c;
            dx[xi] = static_cast<T>(gv * k[c * heads + h]);
            dk[c * heads + h] += gv * in[xi];
          }
        }
      }
      return Grads{DenseTensor({m, heads * channels}, std::move(dx)),
                   DenseTensor({channels, heads}, std::vector<T>(dk.begin(), dk.end()))};
    });
  });
}

Tensor ScaleHeads(const Tensor& values, const Tensor& coefficients) {
  RequireRank2(values, "scale_heads");
  RequireRank2(coefficients, "scale_heads");
  RequireSameDType(values, coefficients, "scale_heads");
  const int64_t m = values.dim(0);
  const int64_t heads = coefficients.dim(1);
  if (coefficients.dim(0) != m || heads == 0 || values.dim(1) % heads != 0) {
    throw DimensionError("scale_heads: values " + ShapeString(values.shape()) +
                         " incompatible with coefficients " + ShapeString(coefficients.shape()));
  }
  const int64_t channels = values.dim(1) / heads;
  DenseTensor vv = values.value();
  DenseTensor cv = coefficients.value();
  DenseTensor y = DispatchDType(vv.dtype(), [&]<typename T>() {
    auto v = vv.data<T>();
    auto c = cv.data<T>();
    std::vector<T> out(v.size());
    for (size_t i = 0; i < out.size(); ++i) {
      const int64_t row = static_cast<int64_t>(i) / (heads * channels);
      const int64_t h = (static_cast<int64_t>(i) % (heads * channels)) / channels;
      out[i] = v[i] * c[row * heads + h];
    }
    return DenseTensor(vv.shape(), std::move(out));
  });
  std::vector<Tensor> inputs{values, coefficients};
  return Tape::Record(std::move(y), inputs, [vv, cv, m, heads, channels](const DenseTensor& g) {
    return DispatchDType(g.dtype(), [&]<typename T>() {
      auto gi = g.data<T>();
      auto v = vv.data<T>();
      auto c = cv.data<T>();
      std::vector<T> dv(gi.size());
      std::vector<double> dc(static_cast<size_t>(m * heads), 0.0);
      for (size_t i = 0; i < gi.size(); ++i) {
        const int64_t row = static_cast<int64_t>(i) / (heads * channels);
        const int64_t h = (static_cast<int64_t>(i) % (heads * channels)) / channels;
        dv[i] = gi[i] * c[row * heads + h];
        dc[row * heads + h] += static_cast<double>(gi[i]) * v[i];
      }
      return Grads{DenseTensor(vv.shape(), std::move(dv)),
                   DenseTensor({m, heads}, std::vector<T>(dc.begin(), dc.end()))};
    });
  });
}

namespace {

void CheckLossInputs(const Tensor& logits, std::span<const int64_t> labels,
                     std::span<const double> weights, const char* op) {
  RequireRank2(logits, op);
  if (static_cast<int64_t>(labels.size()) != logits.dim(0) ||
      static_cast<int64_t>(weights.size()) != logits.dim(0)) {
    throw DimensionError(std::string(op) + ": " + std::to_string(labels.size()) + " labels and " +
                         std::to_string(weights.size()) + " weights for logits " +
                         ShapeString(logits.shape()));
  }
}

}  // namespace

Tensor SoftmaxCrossEntropy(const Tensor& logits, std::span<const int64_t> labels,
                           std::span<const double> weights) {
  CheckLossInputs(logits, labels, weights, "softmax_cross_entropy");
  const int64_t n = logits.dim(0);
  const int64_t c = logits.dim(1);
  double total_weight = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] != 0.0 && (labels[i] < 0 || labels[i] >= c)) {
      throw InvalidArgument("label " + std::to_string(labels[i]) + " out of range for " +
                            std::to_string(c) + " classes");
    }
    total_weight += weights[i];
  }
  auto probs = std::make_shared<std::vector<double>>(static_cast<size_t>(n * c));
  auto lab = CopyIndices(labels);
  auto w = std::make_shared<const std::vector<double>>(weights.begin(), weights.end());
  double loss = 0.0;
  const std::vector<double> z = logits.value().ToDoubles();
  for (int64_t i = 0; i < n; ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (int64_t j = 0; j < c; ++j) mx = std::max(mx, z[i * c + j]);
    double s = 0.0;
    for (int64_t j = 0; j < c; ++j) s += std::exp(z[i * c + j] - mx);
    const double lse = mx + std::log(s);
    for (int64_t j = 0; j < c; ++j) (*probs)[i * c + j] = std::exp(z[i * c + j] - lse);
    if ((*w)[i] != 0.0) loss += (*w)[i] * (lse - z[i * c + (*lab)[i]]);
  }
  if (total_weight > 0.0) loss /= total_weight;
  const DType dtype = logits.dtype();
  DenseTensor y = DenseTensor::Filled({1}, loss, dtype);
  return Tape::Record(std::move(y), std::span(&logits, 1),
                      [probs, lab, w, total_weight, n, c, dtype](const DenseTensor& g) {
    std::vector<double> dz(static_cast<size_t>(n * c), 0.0);
    if (total_weight > 0.0) {
      const double scale = g.flat(0) / total_weight;
      for (int64_t i = 0; i < n; ++i) {
        if ((*w)[i] == 0.0) continue;
        for (int64_t j = 0; j < c; ++j) {
          const double onehot = j == (*lab)[i] ? 1.0 : 0.0;
          dz[i * c + j] = scale * (*w)[i] * ((*probs)[i * c + j] - onehot);
        }
      }
    }
    return Grads{DenseTensor::FromDoubles({n, c}, dz, dtype)};
  });
}

Tensor SigmoidCrossEntropy(const Tensor& logits, std::span<const int64_t> labels,
                           std::span<const double> weights) {
  CheckLossInputs(logits, labels, weights, "sigmoid_cross_entropy");
  if (logits.dim(1) != 1) {
    throw DimensionError("sigmoid_cross_entropy expects logits [n, 1], got " +
                         ShapeString(logits.shape()));
  }
  const int64_t n = logits.dim(0);
  double total_weight = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] != 0.0 && labels[i] != 0 && labels[i] != 1) {
      throw InvalidArgument("binary label must be 0 or 1, got " + std::to_string(labels[i]));
    }
    total_weight += weights[i];
  }
  const std::vector<double> z = logits.value().ToDoubles();
  auto lab = CopyIndices(labels);
  auto w = std::make_shared<const std::vector<double>>(weights.begin(), weights.end());
  double loss = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    if ((*w)[i] == 0.0) continue;
    const double x = z[i];
    const double y = static_cast<double>((*lab)[i]);
    loss += (*w)[i] * (std::max(x, 0.0) - x * y + std::log1p(std::exp(-std::abs(x))));
  }
  if (total_weight > 0.0) loss /= total_weight;
  const DType dtype = logits.dtype();
  return Tape::Record(DenseTensor::Filled({1}, loss, dtype), std::span(&logits, 1),
                      [z, lab, w, total_weight, n, dtype](const DenseTensor& g) {
    std::vector<double> dz(static_cast<size_t>(n), 0.0);
    if (total_weight > 0.0) {
      const double scale = g.flat(0) / total_weight;
      for (int64_t i = 0; i < n; ++i) {
        const double p = 1.0 / (1.0 + std::exp(-z[i]));
        dz[i] = scale * (*w)[i] * (p - static_cast<double>((*lab)[i]));
      }
    }
    return Grads{DenseTensor::FromDoubles({n, 1}, dz, dtype)};
  });
}

}  // namespace hetgnn
