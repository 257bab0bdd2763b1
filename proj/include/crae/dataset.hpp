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

#include <string>
#include <vector>

#include "crae/numkit.hpp"

namespace crae {

/// Samples (one flattened image or feature vector per row) with class labels.
///
/// `class_names`, `sample_ids` and `subject_ids` are optional: each is either
/// empty or has one entry per class / row respectively. `width` and `height`
/// record the image geometry when the rows are images (0 when unknown).
template <typename Scalar = double>
struct BasicLabeledDataset {
  MatrixX<Scalar> samples;
  std::vector<int> labels;
  int n_classes = 0;
  std::vector<std::string> class_names;
  std::vector<std::string> sample_ids;
  std::vector<std::string> subject_ids;
  int width = 0;
  int height = 0;

  Index rows() const { return samples.rows(); }
  Index dim() const { return samples.cols(); }
  bool empty() const { return samples.rows() == 0; }

  std::vector<Index> class_counts() const {
    std::vector<Index> counts(static_cast<std::size_t>(n_classes), 0);
    for (int l : labels) ++counts[static_cast<std::size_t>(l)];
    return counts;
  }

  /// Throws DataError if the label/row bookkeeping is inconsistent.
  void validate() const {
    if (static_cast<Index>(labels.size()) != samples.rows()) {
      throw DataError("dataset has " + std::to_string(samples.rows()) + " rows but " +
                      std::to_string(labels.size()) + " labels");
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] < 0 || labels[i] >= n_classes) {
        throw DataError("row " + std::to_string(i) + ": label " + std::to_string(labels[i]) +
                        " outside [0, " + std::to_string(n_classes) + ")");
      }
    }
    if (!class_names.empty() && static_cast<int>(class_names.size()) != n_classes) {
      throw DataError("dataset has " + std::to_string(n_classes) + " classes but " +
                      std::to_string(class_names.size()) + " class names");
    }
    if (!sample_ids.empty() && static_cast<Index>(sample_ids.size()) != samples.rows()) {
      throw DataError("sample id count does not match row count");
    }
    if (!subject_ids.empty() && static_cast<Index>(subject_ids.size()) != samples.rows()) {
      throw DataError("subject id count does not match row count");
    }
  }

  /// Copy of the selected rows, carrying ids and metadata along.
  BasicLabeledDataset subset(const std::vector<Index>& rows_to_keep) const {
    BasicLabeledDataset out;
    out.samples.resize(static_cast<Index>(rows_to_keep.size()), samples.cols());
    out.n_classes = n_classes;
    out.class_names = class_names;
    out.width = width;
    out.height = height;
    for (std::size_t k = 0; k < rows_to_keep.size(); ++k) {
      const Index r = rows_to_keep[k];
      out.samples.row(static_cast<Index>(k)) = samples.row(r);
      out.labels.push_back(labels[static_cast<std::size_t>(r)]);
      if (!sample_ids.empty()) out.sample_ids.push_back(sample_ids[static_cast<std::size_t>(r)]);
      if (!subject_ids.empty()) out.subject_ids.push_back(subject_ids[static_cast<std::size_t>(r)]);
    }
    return out;
  }

  std::string sample_id(Index row) const {
    return sample_ids.empty() ? std::to_string(row) : sample_ids[static_cast<std::size_t>(row)];
  }
};

using LabeledDataset = BasicLabeledDataset<double>;

}  // namespace crae
