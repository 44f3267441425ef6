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
#ifndef HETGNN_TENSOR_H_
#define HETGNN_TENSOR_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "hetgnn/errors.h"

namespace hetgnn {

enum class DType { kFloat32, kFloat64 };

const char* DTypeName(DType dtype);

using Shape = std::vector<int64_t>;

int64_t NumElements(const Shape& shape);
std::string ShapeString(const Shape& shape);

template <typename T>
constexpr DType DTypeOf() {
  static_assert(std::is_same_v<T, float> || std::is_same_v<T, double>);
  return std::is_same_v<T, float> ? DType::kFloat32 : DType::kFloat64;
}

// Invokes `fn.template operator()<T>()` with T matching `dtype`.
template <typename Fn>
decltype(auto) DispatchDType(DType dtype, Fn&& fn) {
  if (dtype == DType::kFloat32) return fn.template operator()<float>();
  return fn.template operator()<double>();
}

// Immutable row-major numeric array. Copies share storage, so passing
// tensors by value is cheap and they may be read from any thread.
class DenseTensor {
 public:
  DenseTensor();
  DenseTensor(Shape shape, std::vector<float> values);
  DenseTensor(Shape shape, std::vector<double> values);

  static DenseTensor Zeros(const Shape& shape, DType dtype);
  static DenseTensor Filled(const Shape& shape, double value, DType dtype);
  // Converts from doubles, rounding when `dtype` is float32.
  static DenseTensor FromDoubles(const Shape& shape,
                                 std::span<const double> values, DType dtype);

  const Shape& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int64_t dim(int axis) const;
  int64_t size() const { return size_; }
  DType dtype() const;

  template <typename T>
  std::span<const T> data() const {
    using Ptr = std::shared_ptr<const std::vector<T>>;
    const Ptr* p = std::get_if<Ptr>(&storage_);
    if (p == nullptr) {
      throw InvalidArgument(std::string("tensor holds ") + DTypeName(dtype()) +
                            ", requested " + DTypeName(DTypeOf<T>()));
    }
    return {(*p)->data(), (*p)->size()};
  }

  // Element `i` of the flat buffer, widened to double.
  double flat(int64_t i) const;
  // Element [row, col] of a rank-2 tensor, widened to double.
  double at(int64_t row, int64_t col) const { return flat(row * dim(1) + col); }
  std::vector<double> ToDoubles() const;

  DenseTensor Cast(DType dtype) const;
  // Same buffer viewed with another shape of equal element count.
  DenseTensor Reshaped(Shape shape) const;

  // Same shape, dtype, and bit patterns.
  bool BitwiseEqual(const DenseTensor& other) const;

 private:
  Shape shape_;
  int64_t size_ = 0;
  std::variant<std::shared_ptr<const std::vector<float>>,
               std::shared_ptr<const std::vector<double>>>
      storage_;
};

}  // namespace hetgnn

#endif  // HETGNN_TENSOR_H_
