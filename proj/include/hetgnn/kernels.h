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
#ifndef HETGNN_KERNELS_H_
#define HETGNN_KERNELS_H_

// Value-only numeric kernels shared by forward ops and their gradients.
// None of these record on a tape.

#include <span>

#include "hetgnn/tensor.h"

namespace hetgnn::kernels {

DenseTensor Add(const DenseTensor& a, const DenseTensor& b);
DenseTensor Scale(const DenseTensor& a, double factor);
DenseTensor Multiply(const DenseTensor& a, const DenseTensor& b);

// [n,k] x [k,m] with optional transposition of either operand, accumulated
// in double.
DenseTensor MatMul(const DenseTensor& a, const DenseTensor& b,
                   bool transpose_a = false, bool transpose_b = false);

// Sum over rows of a rank-2 tensor: [n,d] -> [d].
DenseTensor ColumnSum(const DenseTensor& a);

// Out-of-range ids throw InvalidArgument.
void CheckIndices(std::span<const int64_t> ids, int64_t bound, const char* what);

// out[ids[i]] += values[i] row-wise: [m,d] -> [num_rows,d].
DenseTensor ScatterAddRows(const DenseTensor& values, std::span<const int64_t> ids,
                           int64_t num_rows);

}  // namespace hetgnn::kernels

#endif  // HETGNN_KERNELS_H_
