/* Copyright 2026 The crae Authors. All Rights Reserved.

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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crae/autoencoder.hpp"
#include "crae/classifier.hpp"

namespace crae {

inline constexpr std::uint32_t kModelFormatVersion = 1;

/// Everything needed to run the pipeline: the feature layers (first layer
/// consumes raw input), each layer's class means, and optionally the
/// classifier trained on the top layer's features.
struct ModelContainer {
  std::vector<AutoencoderLayer<double>> layers;
  std::vector<ClassMeans<double>> means;
  std::optional<MlpModel<double>> classifier;
  std::vector<std::string> class_names;

  Index input_dim() const { return layers.empty() ? 0 : layers.front().input_dim(); }
  Index feature_dim() const { return layers.empty() ? 0 : layers.back().hidden_dim(); }

  void validate() const;
};

/// CRAE container bytes; docs/formats.md describes the layout.
std::vector<std::uint8_t> serialize_model(const ModelContainer& model);
ModelContainer deserialize_model(std::span<const std::uint8_t> bytes,
                                 const std::string& source = "<memory>");

void save_model(const std::filesystem::path& path, const ModelContainer& model);
ModelContainer load_model(const std::filesystem::path& path);

}  // namespace crae
