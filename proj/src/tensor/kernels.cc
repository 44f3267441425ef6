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
#include "hetgnn/kernels.h"

#include <string>
#include <vector>

namespace hetgnn::kernels {
namespace {

void CheckSameLayout(const DenseTensor& a, const DenseTensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shapes " + ShapeString(a.shape()) +
                         " and " + ShapeString(b.shape()) + " differ");
  }
  if (a.dtype() != b.dtype()) {
    throw InvalidArgument(std::string(op) + ": dtypes " + DTypeName(a.dtype()) +
                          " and " + DTypeName(b.dtype()) + " differ");
  }
}

template <typename Fn>
DenseTensor Binary(const DenseTensor& a, const DenseTensor& b, const char* op, Fn fn) {
  CheckSameLayout(a, b, op);
  return DispatchDType(a.dtype(), [&]<typename T>() {
    auto x = a.data<T>();
    auto y = b.data<T>();
    std::vector<T> out(x.size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = fn(x[i], y[i]);
    return DenseTensor(a.shape(), std::move(out));
  });
}

}  // namespace

DenseTensor Add(const DenseTensor& a, const DenseTensor& b) {
  return Binary(a, b, "add", [](auto x, auto y) { return x + y; });
}

DenseTensor Multiply(const DenseTensor& a, const DenseTensor& b) {
  return Binary(a, b, "multiply", [](auto x, auto y) { return x * y; });
}

DenseTensor Scale(const DenseTensor& a, double factor) {
  return DispatchDType(a.dtype(), [&]<typename T>() {
    auto x = a.data<T>();
    std::vector<T> out(x.size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = static_cast<T>(x[i] * factor);
    return DenseTensor(a.shape(), std::move(out));
  });
}

DenseTensor MatMul(const DenseTensor& a, const DenseTensor& b, bool transpose_a,
                   bool transpose_b) {
  if (a.rank() != 2 || b.rank() != 2) {
    throw DimensionError("matmul needs rank-2 operands, got " + ShapeString(a.shape()) +
                         " and " + ShapeString(b.shape()));
  }
  if (a.dtype() != b.dtype()) throw InvalidArgument("matmul: mixed dtypes");
  const int64_t n = transpose_a ? a.dim(1) : a.dim(0);
  const int64_t k = transpose_a ? a.dim(0) : a.dim(1);
  const int64_t kb = transpose_b ? b.dim(1) : b.dim(0);
  const int64_t m = transpose_b ? b.dim(0) : b.dim(1);
  if (k != kb) {
    throw DimensionError("matmul inner dimensions differ: " + ShapeString(a.shape()) +
                         (transpose_a ? "^T" : "") + " x " + ShapeString(b.shape()) +
                         (transpose_b ? "^T" : ""));
  }
  return DispatchDType(a.dtype(), [&]<typename T>() {
    auto x = a.data<T>();
    auto y = b.data<T>();
    const int64_t lda = a.dim(1);
    const int64_t ldb = b.dim(1);
    std::vector<T> out(static_cast<size_t>(n * m));
    std::vector<double> row(static_cast<size_t>(m));
    for (int64_t i = 0; i < n; ++i) {
      std::fill(row.begin(), row.end(), 0.0);
      for (int64_t p = 0; p < k; ++p) {
        const double xv = transpose_a ? x[p * lda + i] : x[i * lda + p];
        if (xv == 0.0) continue;
        if (transpose_b) {
          for (int64_t j = 0; j < m; ++j) row[j] += xv * y[j * ldb + p];
        } else {
          const T* yr = &y[p * ldb];
          for (int64_t j = 0; j < m; ++j) row[j] += xv * yr[j];
        }
      }
      for (int64_t j = 0; j < m; ++j) out[i * m + j] = static_cast<T>(row[j]);
    }
    return DenseTensor({n, m}, std::move(out));
  });
}

DenseTensor ColumnSum(const DenseTensor& a) {
  if (a.rank() != 2) throw DimensionError("column sum needs a rank-2 tensor");
  const int64_t n = a.dim(0);
  const int64_t d = a.dim(1);
  return DispatchDType(a.dtype(), [&]<typename T>() {
    auto x = a.data<T>();
    std::vector<double> acc(static_cast<size_t>(d), 0.0);
    for (int64_t i = 0; i < n; ++i) {
      for (int64_t j = 0; j < d; ++j) acc[j] += x[i * d + j];
    }
    return DenseTensor({d}, std::vector<T>(acc.begin(), acc.end()));
  });
}

void CheckIndices(std::span<const int64_t> ids, int64_t bound, const char* what) {
  for (size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= bound) {
      throw InvalidArgument(std::string(what) + " " + std::to_string(ids[i]) +
                            " at position " + std::to_string(i) +
                            " out of range [0, " + std::to_string(bound) + ")");
    }
  }
}

DenseTensor ScatterAddRows(const DenseTensor& values, std::span<const int64_t> ids,
                           int64_t num_rows) {
  if (values.rank() != 2) throw DimensionError("scatter-add needs rank-2 values");
  const int64_t d = values.dim(1);
  return DispatchDType(values.dtype(), [&]<typename T>() {
    auto x = values.data<T>();
    std::vector<double> acc(static_cast<size_t>(num_rows * d), 0.0);
    for (size_t i = 0; i < ids.size(); ++i) {
      const int64_t r = ids[i];
      for (int64_t j = 0; j < d; ++j) acc[r * d + j] += x[i * d + j];
    }
    return DenseTensor({num_rows, d}, std::vector<T>(acc.begin(), acc.end()));
  });
}

}  // namespace hetgnn::kernels
