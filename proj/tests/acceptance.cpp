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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "crae/autoencoder.hpp"
#include "crae/classifier.hpp"
#include "crae/data.hpp"
#include "crae/eval.hpp"
#include "crae/model_io.hpp"
#include "oracles.hpp"

namespace {

using namespace crae;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

LabeledDataset features_of(std::span<const AutoencoderLayer<double>> layers, LabeledDataset d) {
  d.samples = encode_stack(layers, d.samples);
  d.width = d.height = 0;
  return d;
}

double pipeline_accuracy(std::span<const AutoencoderLayer<double>> layers,
                         const MlpModel<double>& mlp, const LabeledDataset& test) {
  const auto pred = predict(mlp, encode_stack(layers, test.samples));
  return evaluate(pred.labels, test.labels, test.n_classes).mean_classwise_accuracy;
}

MlpModel<double> fit_classifier(std::span<const AutoencoderLayer<double>> layers,
                                const LabeledDataset& train, std::uint64_t seed) {
  const auto feats = features_of(layers, train);
  return train_mlp(build_default<double>(feats.dim(), feats.n_classes, seed), feats,
                   MlpTrainConfig{})
      .model;
}

std::vector<std::uint8_t> file_bytes(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

int run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (code != 0) std::fprintf(stderr, "%s", err.str().c_str());
  return code;
}

// ---------------------------------------------------------------------------

Outcome gradient_oracle() {
  const double lambdas[] = {0.0, 0.1, 0.5};
  const Activation acts[] = {Activation::sigmoid, Activation::linear};
  double worst = 0.0;
  int instances = 0;
  for (std::uint64_t seed = 1; seed <= 24; ++seed) {
    Rng rng(seed * 7919);
    const Index input = 6 + static_cast<Index>(rng.index(7));
    const Index hidden = 4 + static_cast<Index>(rng.index(5));
    const int n_classes = 2 + static_cast<int>(rng.index(2));
    const Index rows = 3 * n_classes + static_cast<Index>(rng.index(4));
    TrainConfig<double> cfg;
    cfg.lambda_same = lambdas[rng.index(3)];
    cfg.lambda_other = lambdas[rng.index(3)];
    if (seed % 4 == 0) {
      for (int c = 0; c < n_classes; ++c) {
        cfg.lambda_same_per_class.push_back(lambdas[rng.index(3)]);
        cfg.lambda_other_per_class.push_back(lambdas[rng.index(3)]);
      }
    }
    const Activation act = acts[seed % 2];
    const Matrix x = random_uniform<double>(rng, rows, input, 0.0, 1.0);
    std::vector<int> labels;
    for (Index r = 0; r < rows; ++r) labels.push_back(static_cast<int>(r % n_classes));
    const auto layer = init_layer<double>(input, hidden, act, 1.0, rng);

    const auto means = class_means_of(encode(layer, x), labels, n_classes);
    const auto g = gradients(layer, x, labels, means, cfg);
    const auto fd = oracle::finite_difference(layer, x, labels, cfg, n_classes);
    worst = std::max({worst, oracle::max_relative_error(g.encoder, fd.encoder),
                      oracle::max_relative_error(g.decoder, fd.decoder)});
    ++instances;
  }
  return {worst <= 1e-5, std::to_string(instances) + " instances, worst relative error " +
                             fmt("%.3g", worst) + " (limit 1e-05)"};
}

Outcome plain_reduction() {
  SynthSpec spec;
  spec.resolution = 8;
  spec.per_class = 40;
  const LabeledDataset data = generate_synthetic(spec);
  TrainConfig<double> cfg;
  cfg.lambda_same = cfg.lambda_other = 0.0;
  cfg.learning_rate = 0.05;
  cfg.iterations = 50;
  cfg.seed = 11;
  const Index hidden = 24;

  oracle::PlainAutoencoder ref;
  {
    Rng rng(cfg.seed);
    const double enc = 1.0 / std::sqrt(static_cast<double>(data.dim()));
    const double dec = 1.0 / std::sqrt(static_cast<double>(hidden));
    ref.we = random_uniform<double>(rng, hidden, data.dim(), -enc, enc);
    ref.wd = random_uniform<double>(rng, data.dim(), hidden, -dec, dec);
  }
  AutoencoderLayer<double> start{ref.we, ref.wd, Activation::sigmoid};

  const auto means = class_means(start, data);
  const double lib_loss = batch_loss(start, data, means, cfg).total;
  const double ref_loss = ref.loss(data.samples);
  const auto lib_grad = gradients(start, data, means, cfg);
  const auto [ref_enc, ref_dec] = ref.gradients(data.samples);
  const bool loss_same = std::memcmp(&lib_loss, &ref_loss, sizeof(double)) == 0;
  const bool grad_same = bit_identical(lib_grad.encoder, ref_enc) &&
                         bit_identical(lib_grad.decoder, ref_dec);

  const auto trained = train_layer(data, hidden, cfg);
  const auto ref_hist = ref.train(data.samples, cfg.learning_rate, cfg.iterations);
  bool hist_same = trained.history.size() == ref_hist.size();
  for (std::size_t i = 0; hist_same && i < ref_hist.size(); ++i)
    hist_same = std::memcmp(&trained.history[i].total, &ref_hist[i], sizeof(double)) == 0;
  const bool weights_same =
      bit_identical(trained.layer.encoder, ref.we) && bit_identical(trained.layer.decoder, ref.wd);

  std::string d = std::string("loss ") + (loss_same ? "identical" : "DIFFERS") + ", gradients " +
                  (grad_same ? "identical" : "DIFFER") + ", 50-iteration history " +
                  (hist_same ? "identical" : "DIFFERS") + ", final weights " +
                  (weights_same ? "identical" : "DIFFER");
  return {loss_same && grad_same && hist_same && weights_same, d};
}

Outcome two_class_consistency() {
  Rng rng(2024);
  const Index input = 10, hidden = 6;
  const auto layer = init_layer<double>(input, hidden, Activation::sigmoid, 1.0, rng);
  const Matrix batch = random_uniform<double>(rng, 20, input, 0.0, 1.0);
  std::vector<int> batch_labels;
  for (int i = 0; i < 20; ++i) batch_labels.push_back(i % 2);
  const auto means = class_means_of(encode(layer, batch), batch_labels, 2);

  int exact = 0;
  for (int k = 0; k < 100; ++k) {
    const double lm = rng.uniform(0.0, 1.0);
    const double lf = rng.uniform(0.0, 1.0);
    TrainConfig<double> cfg;
    cfg.lambda_same_per_class = {lm, lf};
    cfg.lambda_other_per_class = {lm, lf};
    const int label = static_cast<int>(rng.index(2));
    const RowVector x = random_uniform<double>(rng, 1, input, 0.0, 1.0);

    const Matrix xm = x;
    const Matrix r = encode(layer, xm);
    const Matrix xhat = decode(layer, r);
    const double rec = (xhat - xm).squaredNorm();
    const double dm = (r.row(0) - means.means.row(0)).squaredNorm();
    const double df = (r.row(0) - means.means.row(1)).squaredNorm();
    // Class 0 plays the role of m, class 1 of f.
    const double specialized = label == 0 ? rec + lm * dm - lf * df : rec + lf * df - lm * dm;
    const double general = loss(layer, x, label, means, cfg).total;
    if (std::memcmp(&specialized, &general, sizeof(double)) == 0) ++exact;
  }
  return {exact == 100, std::to_string(exact) + "/100 samples bit-identical"};
}

Outcome discriminability() {
  const LabeledDataset data = generate_synthetic(SynthSpec{});
  TrainConfig<double> cfg;
  cfg.iterations = 200;
  cfg.lambda_same = cfg.lambda_other = 0.1;
  const auto autogen = train_layer(data, data.dim(), cfg);
  cfg.lambda_same = cfg.lambda_other = 0.0;
  const auto plain = train_layer(data, data.dim(), cfg);
  const std::vector<AutoencoderLayer<double>> a{autogen.layer}, p{plain.layer};
  const double ra = distance_report(a, data).ratio;
  const double rp = distance_report(p, data).ratio;
  return {ra < rp, "intra/inter ratio " + fmt("%.6f", ra) + " with lambda 0.1 vs " +
                       fmt("%.6f", rp) + " with lambda 0 (eta " + fmt("%g", cfg.learning_rate) +
                       ")"};
}

Outcome end_to_end() {
  const LabeledDataset data = generate_synthetic(SynthSpec{});
  const auto [train, test] = split(data, 0.5, 11);
  TrainConfig<double> cfg;
  auto accuracy_for = [&](double lambda) {
    cfg.lambda_same = cfg.lambda_other = lambda;
    const std::vector<AutoencoderLayer<double>> layers{
        train_layer(train, train.dim(), cfg).layer};
    return pipeline_accuracy(layers, fit_classifier(layers, train, cfg.seed), test);
  };
  const double autogen = accuracy_for(0.1);
  const double plain = accuracy_for(0.0);
  return {autogen >= 0.95 && autogen >= plain,
          "held-out mean class-wise accuracy " + format_percent(autogen) + "% (lambda 0.1) vs " +
              format_percent(plain) + "% (lambda 0), threshold 95.00%"};
}

Outcome table_arithmetic() {
  auto mean_of = [](int correct0, int correct1) {
    std::vector<int> truth, pred;
    for (int i = 0; i < 10000; ++i) {
      truth.push_back(0);
      pred.push_back(i < correct0 ? 0 : 1);
    }
    for (int i = 0; i < 10000; ++i) {
      truth.push_back(1);
      pred.push_back(i < correct1 ? 1 : 0);
    }
    const auto r = evaluate(pred, truth, 2);
    return format_percent(r.per_class_accuracy[0]) + "/" + format_percent(r.per_class_accuracy[1]) +
           " -> " + format_percent(r.mean_classwise_accuracy);
  };
  const std::string a = mean_of(8747, 9273);
  const std::string b = mean_of(6647, 7617);
  return {a == "87.47/92.73 -> 90.10" && b == "66.47/76.17 -> 71.32", a + ", " + b};
}

Outcome stacking() {
  const LabeledDataset data = generate_synthetic(SynthSpec{});
  const auto [train, test] = split(data, 0.5, 11);
  TrainConfig<double> cfg;
  cfg.learning_rate = 0.01;
  const std::vector<Index> dims{train.dim(), train.dim()};
  const auto results = stack_train(train, std::span<const Index>(dims), cfg);

  bool monotone = true, finite = true;
  constexpr std::size_t kWindow = 5;
  for (const auto& r : results) {
    std::vector<double> smooth;
    for (std::size_t i = 0; i + kWindow <= r.history.size(); ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < kWindow; ++k) {
        s += r.history[i + k].total;
        finite = finite && std::isfinite(r.history[i + k].total);
      }
      smooth.push_back(s / kWindow);
    }
    for (std::size_t i = 1; i < smooth.size(); ++i) monotone = monotone && smooth[i] <= smooth[i - 1];
  }
  const auto layers = layers_of(results);
  const double acc = pipeline_accuracy(layers, fit_classifier(layers, train, cfg.seed), test);
  return {finite && monotone && acc >= 0.85,
          std::string("2 layers, loss ") + (finite ? "finite" : "NON-FINITE") + ", smoothed loss " +
              (monotone ? "non-increasing" : "INCREASES") + ", accuracy " + format_percent(acc) +
              "% (threshold 85.00%)"};
}

Outcome fine_tuning() {
  SynthSpec a;
  const LabeledDataset domain_a = generate_synthetic(a);
  SynthSpec b = a;
  b.template_shift = 1.0;
  b.per_class = 125;
  b.seed = 21;
  const auto [b_train, b_test] = split(generate_synthetic(b), 0.2, 5);

  TrainConfig<double> cfg;
  const std::vector<AutoencoderLayer<double>> base{
      train_layer(domain_a, domain_a.dim(), cfg).layer};
  const MlpModel<double> mlp = fit_classifier(base, domain_a, cfg.seed);
  const double untuned = pipeline_accuracy(base, mlp, b_test);

  const std::vector<AutoencoderLayer<double>> tuned{fine_tune(base[0], b_train, cfg).layer};
  const MlpModel<double> tuned_mlp =
      train_mlp(mlp, features_of(tuned, b_train), MlpTrainConfig{}).model;
  const double after = pipeline_accuracy(tuned, tuned_mlp, b_test);
  return {after - untuned >= 0.05 && b_train.rows() == 50,
          std::to_string(b_train.rows()) + " target samples: " + format_percent(untuned) +
              "% untuned -> " + format_percent(after) + "% fine-tuned (need +5.00 points)"};
}

Outcome roc_oracle() {
  double worst = 0.0;
  bool shape_ok = true;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    Rng rng(seed);
    const std::size_t n = 2 + rng.index(60);
    std::vector<double> scores;
    std::vector<int> labels;
    // Every third set is quantized so ties are common.
    for (std::size_t i = 0; i < n; ++i) {
      const double s = rng.uniform01();
      scores.push_back(seed % 3 == 0 ? std::floor(s * 5.0) / 5.0 : s);
      labels.push_back(static_cast<int>(rng.index(2)));
    }
    labels[0] = 0;
    labels[1] = 1;
    const RocCurve c = roc(scores, labels);
    worst = std::max(worst, std::abs(c.auc - oracle::pair_auc(scores, labels)));
    shape_ok = shape_ok && c.points.front() == std::make_pair(0.0, 0.0) &&
               c.points.back() == std::make_pair(1.0, 1.0);
    for (std::size_t i = 1; i < c.points.size(); ++i)
      shape_ok = shape_ok && c.points[i].first >= c.points[i - 1].first &&
                 c.points[i].second >= c.points[i - 1].second;
  }
  return {worst <= 1e-9 && shape_ok, "50 score sets, worst |auc - pair count| " +
                                         fmt("%.3g", worst) + ", endpoints and monotonicity " +
                                         (shape_ok ? "hold" : "VIOLATED")};
}

Outcome determinism() {
  char tmpl[] = "/tmp/crae_acceptance_XXXXXX";
  if (mkdtemp(tmpl) == nullptr) return {false, "cannot create a temp directory"};
  const fs::path dir(tmpl);
  const std::string data = (dir / "data.crds").string();
  const std::string config = (dir / "run.cfg").string();
  {
    std::ofstream os(config);
    os << "# small deterministic run\niterations = 20\nhidden = 32\nmlp_epochs = 50\n";
  }
  const std::string m1 = (dir / "a.crae").string(), m2 = (dir / "b.crae").string();
  const std::string m3 = (dir / "c.crae").string();
  bool ok = run_cli({"synth", "--resolution", "8", "--per_class", "30", "--out", data}) == 0 &&
            run_cli({"train", "--config", config, "--data", data, "--seed", "5", "--out", m1}) == 0 &&
            run_cli({"train", "--config", config, "--data", data, "--seed", "5", "--out", m2}) == 0;
  if (!ok) {
    fs::remove_all(dir);
    return {false, "CLI run failed"};
  }
  const auto b1 = file_bytes(m1), b2 = file_bytes(m2);
  save_model(m3, load_model(m1));
  const auto b3 = file_bytes(m3);
  fs::remove_all(dir);
  return {!b1.empty() && b1 == b2 && b1 == b3,
          std::to_string(b1.size()) + "-byte model: repeat run " +
              (b1 == b2 ? "identical" : "DIFFERS") + ", load/save round trip " +
              (b1 == b3 ? "identical" : "DIFFERS")};
}

struct Criterion {
  int id;
  const char* name;
  double time_limit;  // seconds; 0 means none stated
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {1, "gradient oracle", 10.0, gradient_oracle},
      {2, "plain autoencoder reduction", 5.0, plain_reduction},
      {3, "two-class consistency", 0.0, two_class_consistency},
      {4, "discriminability", 60.0, discriminability},
      {5, "end-to-end pipeline", 120.0, end_to_end},
      {6, "table arithmetic", 0.0, table_arithmetic},
      {7, "stacking", 0.0, stacking},
      {8, "fine-tuning", 0.0, fine_tuning},
      {9, "roc oracle", 0.0, roc_oracle},
      {10, "determinism and serialization", 0.0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.time_limit > 0.0 && secs >= c.time_limit) {
      o.pass = false;
      o.detail += "; over the " + fmt("%g", c.time_limit) + " s limit";
    }
    if (!o.pass) ++failures;
    std::printf("[%s] %2d %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures,
              std::size(criteria));
  return failures == 0 ? 0 : 1;
}
