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
#include <cstring>
#include <numeric>

#include "hetgnn/graph_tensor.h"

namespace hetgnn {
namespace {

void CheckArray(const Shape& shape, size_t count, const char* kind) {
  if (shape.empty()) throw DimensionError(std::string(kind) + " feature needs rank >= 1");
  if (NumElements(shape) != static_cast<int64_t>(count)) {
    throw DimensionError(std::string(kind) + " feature shape " + ShapeString(shape) +
                         " does not match " + std::to_string(count) + " values");
  }
}

int64_t RowWidth(const Shape& shape) {
  int64_t w = 1;
  for (size_t i = 1; i < shape.size(); ++i) w *= shape[i];
  return w;
}

}  // namespace

Feature::Feature() : Feature(DenseTensor::Zeros({0}, DType::kFloat32)) {}

Feature::Feature(Tensor values) {
  if (values.rank() < 1) throw DimensionError("feature needs rank >= 1");
  impl_ = std::make_shared<const Impl>(Impl{std::move(values), std::nullopt});
}

Feature::Feature(DenseTensor values) : Feature(Tensor(std::move(values))) {}

Feature::Feature(IntArray values) {
  CheckArray(values.shape, values.values.size(), "int64");
  impl_ = std::make_shared<const Impl>(Impl{std::move(values), std::nullopt});
}

Feature::Feature(StringArray values) {
  CheckArray(values.shape, values.values.size(), "string");
  impl_ = std::make_shared<const Impl>(Impl{std::move(values), std::nullopt});
}

Feature Feature::Ints(Shape shape, std::vector<int64_t> values) {
  return Feature(IntArray{std::move(shape), std::move(values)});
}

Feature Feature::Strings(Shape shape, std::vector<std::string> values) {
  return Feature(StringArray{std::move(shape), std::move(values)});
}

Feature Feature::Ragged(const Feature& flat, std::vector<int64_t> row_lengths) {
  if (flat.ragged()) throw InvalidArgument("ragged features cannot nest");
  int64_t total = 0;
  for (int64_t n : row_lengths) {
    if (n < 0) throw InvalidArgument("negative ragged row length");
    total += n;
  }
  if (total != flat.flat_shape()[0]) {
    throw DimensionError("ragged row lengths sum to " + std::to_string(total) + " but values have " +
                         std::to_string(flat.flat_shape()[0]) + " rows");
  }
  return Feature(std::make_shared<const Impl>(Impl{flat.impl_->values, std::move(row_lengths)}));
}

FeatureDType Feature::dtype() const {
  return std::visit(
      [](const auto& v) -> FeatureDType {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Tensor>) {
          return v.dtype() == DType::kFloat32 ? FeatureDType::kFloat32 : FeatureDType::kFloat64;
        } else if constexpr (std::is_same_v<V, IntArray>) {
          return FeatureDType::kInt64;
        } else {
          return FeatureDType::kString;
        }
      },
      impl_->values);
}

bool Feature::ragged() const { return impl_->row_lengths.has_value(); }

const Shape& Feature::flat_shape() const {
  return std::visit(
      [](const auto& v) -> const Shape& {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, Tensor>) {
          return v.shape();
        } else {
          return v.shape;
        }
      },
      impl_->values);
}

int64_t Feature::num_items() const {
  if (ragged()) return static_cast<int64_t>(impl_->row_lengths->size());
  return flat_shape()[0];
}

Shape Feature::item_shape() const {
  const Shape& flat = flat_shape();
  Shape out(flat.begin() + 1, flat.end());
  if (ragged()) out.insert(out.begin(), kRaggedDim);
  return out;
}

const Tensor& Feature::tensor() const {
  const Tensor* t = std::get_if<Tensor>(&impl_->values);
  if (t == nullptr) {
    throw InvalidArgument(std::string("feature holds ") + FeatureDTypeName(dtype()) +
                          ", not float values");
  }
  return *t;
}

std::span<const int64_t> Feature::ints() const {
  const IntArray* a = std::get_if<IntArray>(&impl_->values);
  if (a == nullptr) {
    throw InvalidArgument(std::string("feature holds ") + FeatureDTypeName(dtype()) +
                          ", not int64 values");
  }
  return a->values;
}

std::span<const std::string> Feature::strings() const {
  const StringArray* a = std::get_if<StringArray>(&impl_->values);
  if (a == nullptr) {
    throw InvalidArgument(std::string("feature holds ") + FeatureDTypeName(dtype()) +
                          ", not strings");
  }
  return a->values;
}

std::span<const int64_t> Feature::row_lengths() const {
  if (!ragged()) throw InvalidArgument("feature is not ragged");
  return *impl_->row_lengths;
}

Feature Feature::flat_values() const {
  return Feature(std::make_shared<const Impl>(Impl{impl_->values, std::nullopt}));
}

Feature Feature::Rows(int64_t begin, int64_t end) const {
  if (begin < 0 || end < begin || end > num_items()) {
    throw InvalidArgument("row range [" + std::to_string(begin) + ", " + std::to_string(end) +
                          ") outside " + std::to_string(num_items()) + " items");
  }
  int64_t flat_begin = begin, flat_end = end;
  std::optional<std::vector<int64_t>> lengths;
  if (ragged()) {
    const auto& rl = *impl_->row_lengths;
    flat_begin = std::accumulate(rl.begin(), rl.begin() + begin, int64_t{0});
    flat_end = flat_begin + std::accumulate(rl.begin() + begin, rl.begin() + end, int64_t{0});
    lengths.emplace(rl.begin() + begin, rl.begin() + end);
  }
  const Shape& fs = flat_shape();
  const int64_t w = RowWidth(fs);
  Shape shape = fs;
  shape[0] = flat_end - flat_begin;
  auto values = std::visit(
      [&](const auto& v) -> std::variant<Tensor, IntArray, StringArray> {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Tensor>) {
          return DispatchDType(v.dtype(), [&]<typename T>() {
            auto d = v.value().template data<T>();
            return Tensor(DenseTensor(
                shape, std::vector<T>(d.begin() + flat_begin * w, d.begin() + flat_end * w)));
          });
        } else {
          V out{shape, {}};
          out.values.assign(v.values.begin() + flat_begin * w, v.values.begin() + flat_end * w);
          return out;
        }
      },
      impl_->values);
  return Feature(std::make_shared<const Impl>(Impl{std::move(values), std::move(lengths)}));
}

Feature Feature::Gather(std::span<const int64_t> items) const {
  const int64_t n = num_items();
  for (int64_t i : items) {
    if (i < 0 || i >= n) {
      throw InvalidArgument("item " + std::to_string(i) + " outside " + std::to_string(n) +
                            " items");
    }
  }
  // Flat row ranges of the selected items.
  std::vector<int64_t> starts(items.size()), counts(items.size(), 1);
  std::optional<std::vector<int64_t>> lengths;
  if (ragged()) {
    const auto& rl = *impl_->row_lengths;
    std::vector<int64_t> offsets(rl.size() + 1, 0);
    std::partial_sum(rl.begin(), rl.end(), offsets.begin() + 1);
    lengths.emplace();
    for (size_t k = 0; k < items.size(); ++k) {
      starts[k] = offsets[items[k]];
      counts[k] = rl[items[k]];
      lengths->push_back(rl[items[k]]);
    }
  } else {
    std::copy(items.begin(), items.end(), starts.begin());
  }
  const Shape& fs = flat_shape();
  const int64_t w = RowWidth(fs);
  Shape shape = fs;
  shape[0] = std::accumulate(counts.begin(), counts.end(), int64_t{0});
  auto pick = [&](const auto& src, auto& dst) {
    dst.reserve(static_cast<size_t>(shape[0] * w));
    for (size_t k = 0; k < starts.size(); ++k) {
      dst.insert(dst.end(), src.begin() + starts[k] * w, src.begin() + (starts[k] + counts[k]) * w);
    }
  };
  auto values = std::visit(
      [&](const auto& v) -> std::variant<Tensor, IntArray, StringArray> {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Tensor>) {
          return DispatchDType(v.dtype(), [&]<typename T>() {
            std::vector<T> out;
            pick(v.value().template data<T>(), out);
            return Tensor(DenseTensor(shape, std::move(out)));
          });
        } else {
          V out{shape, {}};
          pick(v.values, out.values);
          return out;
        }
      },
      impl_->values);
  return Feature(std::make_shared<const Impl>(Impl{std::move(values), std::move(lengths)}));
}

Feature Feature::Concat(std::span<const Feature> parts) {
  if (parts.empty()) throw InvalidArgument("cannot concatenate zero features");
  const Feature& first = parts[0];
  for (const Feature& p : parts) {
    if (p.dtype() != first.dtype() || p.item_shape() != first.item_shape()) {
      throw DimensionError(std::string("cannot concatenate ") + FeatureDTypeName(p.dtype()) +
                           ShapeString(p.item_shape()) + " with " +
                           FeatureDTypeName(first.dtype()) + ShapeString(first.item_shape()));
    }
  }
  Shape shape = first.flat_shape();
  shape[0] = 0;
  for (const Feature& p : parts) shape[0] += p.flat_shape()[0];
  std::optional<std::vector<int64_t>> lengths;
  if (first.ragged()) {
    lengths.emplace();
    for (const Feature& p : parts) {
      auto rl = p.row_lengths();
      lengths->insert(lengths->end(), rl.begin(), rl.end());
    }
  }
  std::variant<Tensor, IntArray, StringArray> values;
  switch (first.dtype()) {
    case FeatureDType::kFloat32:
    case FeatureDType::kFloat64:
      values = DispatchDType(first.tensor().dtype(), [&]<typename T>() {
        std::vector<T> out;
        out.reserve(static_cast<size_t>(NumElements(shape)));
        for (const Feature& p : parts) {
          auto d = p.tensor().value().template data<T>();
          out.insert(out.end(), d.begin(), d.end());
        }
        return Tensor(DenseTensor(shape, std::move(out)));
      });
      break;
    case FeatureDType::kInt64: {
      IntArray out{shape, {}};
      for (const Feature& p : parts) out.values.insert(out.values.end(), p.ints().begin(), p.ints().end());
      values = std::move(out);
      break;
    }
    case FeatureDType::kString: {
      StringArray out{shape, {}};
      for (const Feature& p : parts) {
        out.values.insert(out.values.end(), p.strings().begin(), p.strings().end());
      }
      values = std::move(out);
      break;
    }
  }
  return Feature(std::make_shared<const Impl>(Impl{std::move(values), std::move(lengths)}));
}

Feature Feature::Filler(const Feature& like, int64_t num_items) {
  Shape shape = like.flat_shape();
  std::optional<std::vector<int64_t>> lengths;
  if (like.ragged()) {
    shape[0] = 0;
    lengths.emplace(static_cast<size_t>(num_items), 0);
  } else {
    shape[0] = num_items;
  }
  const size_t n = static_cast<size_t>(NumElements(shape));
  std::variant<Tensor, IntArray, StringArray> values;
  switch (like.dtype()) {
    case FeatureDType::kFloat32:
    case FeatureDType::kFloat64:
      values = Tensor(DenseTensor::Zeros(shape, like.tensor().dtype()));
      break;
    case FeatureDType::kInt64:
      values = IntArray{shape, std::vector<int64_t>(n, 0)};
      break;
    case FeatureDType::kString:
      values = StringArray{shape, std::vector<std::string>(n)};
      break;
  }
  return Feature(std::make_shared<const Impl>(Impl{std::move(values), std::move(lengths)}));
}

bool Feature::Equals(const Feature& other) const {
  if (dtype() != other.dtype() || ragged() != other.ragged() || flat_shape() != other.flat_shape()) {
    return false;
  }
  if (ragged() && *impl_->row_lengths != *other.impl_->row_lengths) return false;
  switch (dtype()) {
    case FeatureDType::kFloat32:
    case FeatureDType::kFloat64:
      return tensor().value().BitwiseEqual(other.tensor().value());
    case FeatureDType::kInt64:
      return std::equal(ints().begin(), ints().end(), other.ints().begin());
    case FeatureDType::kString:
      return std::equal(strings().begin(), strings().end(), other.strings().begin());
  }
  return false;
}

}  // namespace hetgnn
