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
#include "hetgnn/tensor.h"

#include <cstring>
#include <sstream>

namespace hetgnn {
namespace {

void CheckShape(const Shape& shape, size_t num_values) {
  if (shape.empty()) {
    throw DimensionError("tensor rank must be at least 1");
  }
  for (int64_t d : shape) {
    if (d < 0) throw DimensionError("negative extent in shape " + ShapeString(shape));
  }
  if (NumElements(shape) != static_cast<int64_t>(num_values)) {
    throw DimensionError("shape " + ShapeString(shape) + " needs " +
                         std::to_string(NumElements(shape)) + " values, got " +
                         std::to_string(num_values));
  }
}

}  // namespace

const char* DTypeName(DType dtype) {
  return dtype == DType::kFloat32 ? "float32" : "float64";
}

int64_t NumElements(const Shape& shape) {
  int64_t n = 1;
  for (int64_t d : shape) n *= d;
  return n;
}

std::string ShapeString(const Shape& shape) {
  std::ostringstream out;
  out << '[';
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out << ", ";
    if (shape[i] < 0) {
      out << "None";
    } else {
      out << shape[i];
    }
  }
  out << ']';
  return out.str();
}

DenseTensor::DenseTensor()
    : shape_{0}, storage_(std::make_shared<const std::vector<float>>()) {}

DenseTensor::DenseTensor(Shape shape, std::vector<float> values) {
  CheckShape(shape, values.size());
  shape_ = std::move(shape);
  size_ = static_cast<int64_t>(values.size());
  storage_ = std::make_shared<const std::vector<float>>(std::move(values));
}

DenseTensor::DenseTensor(Shape shape, std::vector<double> values) {
  CheckShape(shape, values.size());
  shape_ = std::move(shape);
  size_ = static_cast<int64_t>(values.size());
  storage_ = std::make_shared<const std::vector<double>>(std::move(values));
}

DenseTensor DenseTensor::Zeros(const Shape& shape, DType dtype) {
  return Filled(shape, 0.0, dtype);
}

DenseTensor DenseTensor::Filled(const Shape& shape, double value, DType dtype) {
  const auto n = static_cast<size_t>(NumElements(shape));
  if (dtype == DType::kFloat32) {
    return DenseTensor(shape, std::vector<float>(n, static_cast<float>(value)));
  }
  return DenseTensor(shape, std::vector<double>(n, value));
}

DenseTensor DenseTensor::FromDoubles(const Shape& shape,
                                     std::span<const double> values,
                                     DType dtype) {
  if (dtype == DType::kFloat32) {
    return DenseTensor(shape, std::vector<float>(values.begin(), values.end()));
  }
  return DenseTensor(shape, std::vector<double>(values.begin(), values.end()));
}

int64_t DenseTensor::dim(int axis) const {
  if (axis < 0) axis += rank();
  if (axis < 0 || axis >= rank()) {
    throw DimensionError("axis " + std::to_string(axis) + " out of range for shape " +
                         ShapeString(shape_));
  }
  return shape_[axis];
}

DType DenseTensor::dtype() const {
  return storage_.index() == 0 ? DType::kFloat32 : DType::kFloat64;
}

double DenseTensor::flat(int64_t i) const {
  return DispatchDType(dtype(), [&]<typename T>() -> double {
    return static_cast<double>(data<T>()[i]);
  });
}

std::vector<double> DenseTensor::ToDoubles() const {
  return DispatchDType(dtype(), [&]<typename T>() {
    auto d = data<T>();
    return std::vector<double>(d.begin(), d.end());
  });
}

DenseTensor DenseTensor::Cast(DType target) const {
  if (target == dtype()) return *this;
  return FromDoubles(shape_, ToDoubles(), target);
}

DenseTensor DenseTensor::Reshaped(Shape shape) const {
  if (shape.empty() || NumElements(shape) != size_) {
    throw DimensionError("cannot reshape " + ShapeString(shape_) + " to " +
                         ShapeString(shape));
  }
  DenseTensor out = *this;
  out.shape_ = std::move(shape);
  return out;
}

bool DenseTensor::BitwiseEqual(const DenseTensor& other) const {
  if (shape_ != other.shape_ || dtype() != other.dtype()) return false;
  return DispatchDType(dtype(), [&]<typename T>() {
    auto a = data<T>();
    auto b = other.data<T>();
    return a.empty() || std::memcmp(a.data(), b.data(), a.size_bytes()) == 0;
  });
}

}  // namespace hetgnn
