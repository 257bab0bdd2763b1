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
#include <utility>
#include <vector>

#include "crae/dataset.hpp"

namespace crae {

/// Grayscale image, row-major, values in [0, 1].
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;

  double at(int row, int col) const {
    return pixels[static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(col)];
  }
};

/// Reads binary or ASCII PGM (P5/P2) and PPM (P6/P3). Colour pixels are
/// converted with luminance weights 0.299/0.587/0.114; values are divided by
/// the file's maxval.
GrayImage read_pnm(const std::filesystem::path& path);

/// Writes an 8-bit binary PGM; each byte is round(clamp(v, 0, 1) * 255).
void write_pgm(const std::filesystem::path& path, const GrayImage& image);

std::uint8_t to_byte(double v);

/// Bilinear resampling with half-pixel centres: output pixel x samples the
/// source at (x + 0.5) * in/out - 0.5, clamped to the source edge.
GrayImage resize_bilinear(const GrayImage& image, int target_width, int target_height);
GrayImage resize_bilinear(const GrayImage& image, int target_side);

/// Resizes every row of an image dataset to target_side x target_side.
LabeledDataset resize_bilinear(const LabeledDataset& data, int target_side);

GrayImage row_as_image(const LabeledDataset& data, Index row);

/// Loads the images listed in a manifest. Each line is
/// `relative_path,label_name[,subject_id]`; an optional first line
/// `path,label[,subject]` is treated as a header, blank lines and lines starting
/// with '#' are skipped. Label names map to indices in first-appearance order.
/// All images must share one size unless `resize_side` is given.
LabeledDataset load_image_dir(const std::filesystem::path& root,
                              const std::filesystem::path& manifest,
                              std::optional<int> resize_side = std::nullopt);

/// Two-class synthetic image set.
///
/// Class templates are base +- (class_separation / 2) * pattern, where base and
/// pattern are fixed smooth sinusoid products with unit peak amplitude, so the
/// two templates differ by at most class_separation per pixel. template_shift
/// in [0, 1] blends toward a second template set whose class pattern is
/// orthogonal to the first, emulating a new acquisition domain. Each sample adds
/// N(0, noise_sigma^2) per pixel and is clamped to [0, 1]. Templates do not
/// depend on the seed; the seed drives the noise only.
struct SynthSpec {
  int resolution = 16;
  int per_class = 200;
  double class_separation = 0.4;
  double noise_sigma = 0.1;
  double template_shift = 0.0;
  std::uint64_t seed = 7;

  void validate() const;
};

LabeledDataset generate_synthetic(const SynthSpec& spec);

/// Noise-free class template of the generator, exposed for inspection.
GrayImage synthetic_template(const SynthSpec& spec, int label);

/// Row-wise concatenation. Named classes are merged by name (b's new names are
/// appended); unnamed datasets keep their indices.
LabeledDataset concat(const LabeledDataset& a, const LabeledDataset& b);

/// Seeded shuffle then split. With subject ids the split assigns whole
/// subjects to one side. Throws DataError if either side misses a class.
std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& data, double train_fraction,
                                                std::uint64_t seed,
                                                std::span<const std::string> subject_ids = {});

/// Random subsample keeping min(class count, per_class_limit) rows of every
/// class; per_class_limit 0 means "the smallest class count".
LabeledDataset balance_classes(const LabeledDataset& data, std::uint64_t seed,
                               Index per_class_limit = 0);

/// CRDS dataset cache. See docs/formats.md for the byte layout.
void save_dataset(const std::filesystem::path& path, const LabeledDataset& data);
LabeledDataset load_dataset(const std::filesystem::path& path);

}  // namespace crae
