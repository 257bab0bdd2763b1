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

#include "crae/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

#include "crae/data.hpp"

namespace crae {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw FormatError(path.string() + ": cannot open for writing");
  return os;
}

void finish(std::ofstream& os, const std::filesystem::path& path) {
  os.flush();
  if (!os) throw FormatError(path.string() + ": write failed");
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

EvalReport evaluate(std::span<const int> predicted, std::span<const int> truth, int n_classes,
                    std::span<const std::string> ids) {
  if (predicted.size() != truth.size())
    throw ShapeError("evaluate: " + std::to_string(predicted.size()) + " predictions for " +
                     std::to_string(truth.size()) + " labels");
  if (!ids.empty() && ids.size() != truth.size())
    throw ShapeError("evaluate: id count does not match label count");
  if (n_classes < 1) throw ParameterError("evaluate: need at least one class");

  EvalReport r;
  r.n_classes = n_classes;
  const auto n = static_cast<std::size_t>(n_classes);
  r.class_totals.assign(n, 0);
  r.class_correct.assign(n, 0);
  r.confusion.assign(n, std::vector<Index>(n, 0));
  Index correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int t = truth[i];
    const int p = predicted[i];
    if (t < 0 || t >= n_classes || p < 0 || p >= n_classes)
      throw DataError("evaluate: row " + std::to_string(i) + " has a label outside [0, " +
                      std::to_string(n_classes) + ")");
    ++r.class_totals[static_cast<std::size_t>(t)];
    ++r.confusion[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)];
    if (t == p) {
      ++r.class_correct[static_cast<std::size_t>(t)];
      ++correct;
    } else {
      r.misclassified_ids.push_back(ids.empty() ? std::to_string(i) : ids[i]);
    }
  }
  for (std::size_t c = 0; c < n; ++c) {
    if (r.class_totals[c] == 0)
      throw DataError("evaluate: class " + std::to_string(c) + " has no ground-truth samples");
    r.per_class_accuracy.push_back(static_cast<double>(r.class_correct[c]) /
                                   static_cast<double>(r.class_totals[c]));
  }
  r.mean_classwise_accuracy =
      std::accumulate(r.per_class_accuracy.begin(), r.per_class_accuracy.end(), 0.0) /
      static_cast<double>(n);
  r.overall_accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
  return r;
}

EvalReport evaluate(std::span<const int> predicted, std::span<const int> truth,
                    std::span<const std::string> ids) {
  int top = -1;
  for (int t : truth) top = std::max(top, t);
  for (int p : predicted) top = std::max(top, p);
  return evaluate(predicted, truth, top + 1, ids);
}

std::string format_percent(double ratio) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", ratio * 100.0);
  return buf;
}

RocCurve roc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size())
    throw ShapeError("roc: " + std::to_string(scores.size()) + " scores for " +
                     std::to_string(labels.size()) + " labels");
  Index positives = 0, negatives = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw DataError("roc: labels must be 0 or 1");
    if (!std::isfinite(scores[i])) throw DataError("roc: non-finite score");
    (labels[i] == 1 ? positives : negatives) += 1;
  }
  if (positives == 0 || negatives == 0)
    throw DataError("roc: need at least one positive and one negative sample");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.points.emplace_back(0.0, 0.0);
  curve.thresholds.push_back(std::numeric_limits<double>::infinity());
  Index tp = 0, fp = 0;
  for (std::size_t k = 0; k < order.size();) {
    const double s = scores[order[k]];
    while (k < order.size() && scores[order[k]] == s) {
      (labels[order[k]] == 1 ? tp : fp) += 1;
      ++k;
    }
    const double fpr = static_cast<double>(fp) / static_cast<double>(negatives);
    const double tpr = static_cast<double>(tp) / static_cast<double>(positives);
    const auto& [px, py] = curve.points.back();
    curve.auc += (fpr - px) * (tpr + py) / 2.0;
    curve.points.emplace_back(fpr, tpr);
    curve.thresholds.push_back(s);
  }
  return curve;
}

void write_report(const std::filesystem::path& path, const EvalReport& report,
                  const std::vector<std::string>& class_names, std::optional<double> auc) {
  auto os = open_out(path);
  os << "# crae evaluation report\n";
  os << "# accuracies in percent with two decimals; exact counts alongside\n";
  os << "# roc positive class = 1\n";
  os << "n_classes = " << report.n_classes << "\n";
  os << "samples = " << std::accumulate(report.class_totals.begin(), report.class_totals.end(), Index{0})
     << "\n";
  for (int c = 0; c < report.n_classes; ++c) {
    const auto i = static_cast<std::size_t>(c);
    const std::string key = "class_" + std::to_string(c);
    if (i < class_names.size()) os << key << "_name = " << class_names[i] << "\n";
    os << key << "_correct = " << report.class_correct[i] << "\n";
    os << key << "_total = " << report.class_totals[i] << "\n";
    os << key << "_accuracy = " << format_percent(report.per_class_accuracy[i]) << "\n";
  }
  os << "mean_classwise_accuracy = " << format_percent(report.mean_classwise_accuracy) << "\n";
  os << "overall_accuracy = " << format_percent(report.overall_accuracy) << "\n";
  if (auc) os << "auc = " << format_real(*auc) << "\n";
  os << "misclassified_count = " << report.misclassified_ids.size() << "\n";
  os << "misclassified = ";
  for (std::size_t i = 0; i < report.misclassified_ids.size(); ++i)
    os << (i ? ";" : "") << report.misclassified_ids[i];
  os << "\n";
  finish(os, path);
}

void write_confusion_csv(const std::filesystem::path& path, const EvalReport& report) {
  auto os = open_out(path);
  os << "true\\predicted";
  for (int c = 0; c < report.n_classes; ++c) os << "," << c;
  os << "\n";
  for (int t = 0; t < report.n_classes; ++t) {
    os << t;
    for (Index v : report.confusion[static_cast<std::size_t>(t)]) os << "," << v;
    os << "\n";
  }
  finish(os, path);
}

void write_roc_csv(const std::filesystem::path& path, const RocCurve& curve) {
  auto os = open_out(path);
  os << "fpr,tpr\n";
  for (const auto& [fpr, tpr] : curve.points) os << format_real(fpr) << "," << format_real(tpr) << "\n";
  os << "# auc = " << format_real(curve.auc) << "\n";
  finish(os, path);
}

std::vector<std::filesystem::path> export_reconstructions(
    std::span<const AutoencoderLayer<double>> layers, const ClassMeans<double>& top_means,
    const Matrix& samples, int width, int height, const std::filesystem::path& out_dir,
    Index count) {
  if (layers.empty()) throw ParameterError("export_reconstructions: no layers");
  if (static_cast<Index>(width) * height != layers.front().input_dim())
    throw ShapeError("export_reconstructions: " + std::to_string(width) + "x" +
                     std::to_string(height) + " images do not match input dim " +
                     std::to_string(layers.front().input_dim()));
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw FormatError(out_dir.string() + ": cannot create directory: " + ec.message());

  std::vector<std::filesystem::path> written;
  auto save = [&](const std::string& name, const auto& row) {
    GrayImage img;
    img.width = width;
    img.height = height;
    img.pixels.assign(row.data(), row.data() + row.size());
    const auto path = out_dir / name;
    write_pgm(path, img);
    written.push_back(path);
  };

  const Index n = std::min(count, samples.rows());
  if (n > 0) {
    const Matrix input = samples.topRows(n);
    const Matrix recon = reconstruct_stack(layers, input);
    for (Index r = 0; r < n; ++r) {
      char idx[32];
      std::snprintf(idx, sizeof idx, "%04ld", static_cast<long>(r));
      save(std::string("input_") + idx + ".pgm", RowVector(input.row(r)));
      save(std::string("recon_") + idx + ".pgm", RowVector(recon.row(r)));
    }
  }
  const Matrix mean_images = decode_stack(layers, top_means.means);
  for (Index c = 0; c < mean_images.rows(); ++c)
    save("mean_class_" + std::to_string(c) + ".pgm", RowVector(mean_images.row(c)));
  return written;
}

DistanceReport distance_report(const Matrix& hidden, std::span<const int> labels, int n_classes) {
  const ClassMeans<double> means = class_means_of(hidden, labels, n_classes);
  DistanceReport rep;
  rep.distances = Matrix::Zero(n_classes, n_classes);
  std::vector<Index> counts(static_cast<std::size_t>(n_classes), 0);
  double intra_sum = 0.0, inter_sum = 0.0;
  for (Index r = 0; r < hidden.rows(); ++r) {
    const int c = labels[static_cast<std::size_t>(r)];
    ++counts[static_cast<std::size_t>(c)];
    double others = 0.0;
    for (int k = 0; k < n_classes; ++k) {
      const double d = (hidden.row(r) - means.means.row(k)).norm();
      rep.distances(c, k) += d;
      if (k == c)
        intra_sum += d;
      else
        others += d;
    }
    if (n_classes > 1) inter_sum += others / (n_classes - 1);
  }
  for (int c = 0; c < n_classes; ++c) rep.distances.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
  const auto n = static_cast<double>(hidden.rows());
  rep.intra = intra_sum / n;
  rep.inter = inter_sum / n;
  rep.ratio = rep.inter > 0.0 ? rep.intra / rep.inter : std::numeric_limits<double>::infinity();
  return rep;
}

DistanceReport distance_report(std::span<const AutoencoderLayer<double>> layers,
                               const LabeledDataset& data) {
  data.validate();
  return distance_report(encode_stack(layers, data.samples), std::span<const int>(data.labels),
                         data.n_classes);
}

}  // namespace crae
