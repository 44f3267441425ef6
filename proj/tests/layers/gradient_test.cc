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
#include <gtest/gtest.h>

#include "testing/gradient_suite.h"

namespace hetgnn {
namespace {

class LayerGradientTest : public ::testing::TestWithParam<testing::GradientCase> {};

TEST_P(LayerGradientTest, MatchesFiniteDifferences) {
  auto results = testing::RunGradientSuite(20, 7, {GetParam()});
  EXPECT_LE(results[0].max_relative_error, 1e-4);
}

INSTANTIATE_TEST_SUITE_P(AllLayers, LayerGradientTest,
                         ::testing::ValuesIn(testing::GradientCases()),
                         [](const auto& info) { return info.param.name; });

}  // namespace
}  // namespace hetgnn
