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
#include <filesystem>
#include <fstream>
#include <sstream>

#include "common/json_util.h"
#include "hetgnn/runner.h"

namespace hetgnn {
namespace {

using json = nlohmann::json;

std::string Resolve(const std::string& base_dir, const std::string& path) {
  if (path.empty() || std::filesystem::path(path).is_absolute()) return path;
  return (std::filesystem::path(base_dir) / path).string();
}

// Resolves each entry of a comma-separated list.
std::string ResolveList(const std::string& base_dir, const std::string& paths) {
  std::stringstream in(paths);
  std::string item, out;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    if (!out.empty()) out += ",";
    out += Resolve(base_dir, item);
  }
  return out;
}

std::string ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SizeConstraints ParseConstraints(const json& v) {
  SizeConstraints c;
  for (const auto& [key, value] : v.items()) {
    if (key == "total_components") {
      c.total_components = value.get<int64_t>();
    } else if (key == "total_nodes") {
      c.total_nodes = value.get<std::map<std::string, int64_t>>();
    } else if (key == "total_edges") {
      c.total_edges = value.get<std::map<std::string, int64_t>>();
    } else {
      throw ValidationError("unknown padding key \"" + key + "\"");
    }
  }
  return c;
}

}  // namespace

TrainingJob ParseTrainingJob(std::string_view text, const std::string& base_dir) {
  json doc = internal::ParseJson(text, "training config");
  if (!doc.is_object()) throw ValidationError("training config must be a JSON object");
  TrainingJob job;
  bool has_model = false, has_task = false;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "schema") {
        job.schema_path = Resolve(base_dir, value.get<std::string>());
      } else if (key == "train_records") {
        job.train_records = ResolveList(base_dir, value.get<std::string>());
      } else if (key == "valid_records") {
        job.valid_records = ResolveList(base_dir, value.get<std::string>());
      } else if (key == "model") {
        job.model = ParseModelConfig(value.is_string()
                                         ? ReadText(Resolve(base_dir, value.get<std::string>()))
                                         : value.dump());
        has_model = true;
      } else if (key == "task") {
        job.task = ParseTaskConfig(value.dump());
        has_task = true;
      } else if (key == "batch_size") {
        job.trainer.batch_size = value.get<int64_t>();
      } else if (key == "epochs") {
        job.trainer.epochs = value.get<int64_t>();
      } else if (key == "steps_per_epoch") {
        job.trainer.steps_per_epoch = value.get<int64_t>();
      } else if (key == "lr") {
        job.trainer.learning_rate = value.get<double>();
      } else if (key == "l2") {
        job.trainer.l2 = value.get<double>();
      } else if (key == "seed") {
        job.trainer.seed = value.get<uint64_t>();
      } else if (key == "padding") {
        if (value.is_null()) continue;
        PaddingConfig padding;
        if (value.is_string()) {
          if (value.get<std::string>() != "auto") {
            throw ValidationError("padding must be \"auto\" or an object");
          }
          padding.automatic = true;
        } else {
          padding.constraints = ParseConstraints(value);
        }
        job.trainer.padding = padding;
      } else {
        throw ValidationError("unknown training config key \"" + key + "\"");
      }
    }
  } catch (const json::type_error& e) {
    throw ValidationError(std::string("training config: ") + e.what());
  }
  if (job.schema_path.empty()) throw ValidationError("training config needs \"schema\"");
  if (job.train_records.empty()) throw ValidationError("training config needs \"train_records\"");
  if (!has_model) throw ValidationError("training config needs \"model\"");
  if (!has_task) throw ValidationError("training config needs \"task\"");
  if (job.trainer.batch_size < 1 || job.trainer.epochs < 1 || job.trainer.steps_per_epoch < 0) {
    throw ValidationError("batch_size and epochs must be positive");
  }
  return job;
}

}  // namespace hetgnn
