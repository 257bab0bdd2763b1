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

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "crae/autoencoder.hpp"
#include "crae/dataset.hpp"

namespace crae {

/// Classification metrics with exact counts. Accuracies are ratios in [0, 1].
struct EvalReport {
  int n_classes = 0;
  std::vector<Index> class_totals;
  std::vector<Index> class_correct;
  std::vector<double> per_class_accuracy;
  double mean_classwise_accuracy = 0.0;
  double overall_accuracy = 0.0;
  std::vector<std::vector<Index>> confusion;  // [true class][predicted class]
  std::vector<std::string> misclassified_ids;
};

/// Counts predictions against ground truth. Every class in [0, n_classes)
/// must occur in `truth`. Misclassified ids follow input order; row indices
/// are used when `ids` is empty.
EvalReport evaluate(std::span<const int> predicted, std::span<const int> truth, int n_classes,
                    std::span<const std::string> ids = {});

/// n_classes inferred as one past the largest label seen in either input.
EvalReport evaluate(std::span<const int> predicted, std::span<const int> truth,
                    std::span<const std::string> ids = {});

/// "90.10" style percentage with two decimals.
std::string format_percent(double ratio);

struct RocCurve {
  std::vector<std::pair<double, double>> points;  // (fpr, tpr)
  std::vector<double> thresholds;                 // score at which each point is reached
  double auc = 0.0;
};

/// Threshold sweep over unique scores in descending order; tied scores move
/// the curve in a single step. AUC by the trapezoid rule. Label 1 is the
/// positive class.
RocCurve roc(std::span<const double> scores, std::span<const int> labels);

void write_report(const std::filesystem::path& path, const EvalReport& report,
                  const std::vector<std::string>& class_names = {},
                  std::optional<double> auc = std::nullopt);
void write_confusion_csv(const std::filesystem::path& path, const EvalReport& report);
void write_roc_csv(const std::filesystem::path& path, const RocCurve& curve);

/// Writes input_NNNN.pgm / recon_NNNN.pgm for the first `count` rows and
/// mean_class_C.pgm for each class mean decoded back to input space.
/// Returns the written paths.
std::vector<std::filesystem::path> export_reconstructions(
    std::span<const AutoencoderLayer<double>> layers, const ClassMeans<double>& top_means,
    const Matrix& samples, int width, int height, const std::filesystem::path& out_dir,
    Index count);

/// Mean Euclidean distances in the top hidden space. distances(c, k) is the
/// average over class-c samples of |r - mean_k|; `intra` averages each
/// sample's distance to its own mean, `inter` each sample's average distance
/// to the other class means, and ratio = intra / inter.
struct DistanceReport {
  Matrix distances;
  double intra = 0.0;
  double inter = 0.0;
  double ratio = 0.0;
};

DistanceReport distance_report(std::span<const AutoencoderLayer<double>> layers,
                               const LabeledDataset& data);

/// Same, on precomputed hidden representations.
DistanceReport distance_report(const Matrix& hidden, std::span<const int> labels, int n_classes);

}  // namespace crae
