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

#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include "crae/autoencoder.hpp"
#include "crae/classifier.hpp"
#include "crae/data.hpp"
#include "crae/eval.hpp"
#include "crae/model_io.hpp"

namespace crae::cli {

namespace {

namespace fs = std::filesystem;

constexpr const char* kConfigHelp =
    "Every option above may also be set as a `key = value` line in the --config "
    "file ('#' starts a comment). Flags override file values; unknown keys are "
    "rejected.";

struct Common {
  CLI::App* app = nullptr;
  std::string config;
  std::uint64_t seed = 7;
  std::string out;
};

struct AeOptions {
  double lambda_same = 0.1;
  double lambda_other = 0.1;
  std::vector<double> lambda_same_per_class;
  std::vector<double> lambda_other_per_class;
  bool plain = false;
  double learning_rate = 0.01;
  long iterations = 200;
  long batch_size = 0;
  std::string activation = "sigmoid";
  double init_scale = 1.0;
};

struct MlpOptions {
  bool classifier = true;
  long epochs = 2000;
  double learning_rate = 0.5;
};

struct DataOptions {
  std::string data;
  int resize = 0;
};

std::string real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Option registration
// ---------------------------------------------------------------------------

void add_common(CLI::App* sub, Common& c, const std::string& default_out,
                const std::string& out_help) {
  c.app = sub;
  sub->add_option("--config", c.config, "flat key = value configuration file");
  sub->add_option("--seed", c.seed, "random seed")->capture_default_str();
  c.out = default_out;
  sub->add_option("--out", c.out, out_help)->capture_default_str();
  sub->footer(kConfigHelp);
}

void add_data(CLI::App* sub, DataOptions& d) {
  sub->add_option("--data", d.data,
                  "CRDS dataset file, or an image manifest (path,label[,subject] lines; "
                  "image paths relative to the manifest)");
  sub->add_option("--resize", d.resize,
                  "resize images to this side length with bilinear sampling (0 keeps the size)")
      ->capture_default_str();
}

void add_model(CLI::App* sub, std::string& model) {
  sub->add_option("--model", model, "CRAE model file");
}

void add_ae(CLI::App* sub, AeOptions& o, bool fresh_layers) {
  sub->add_option("--lambda_same", o.lambda_same, "weight of the pull toward the own class mean")
      ->capture_default_str();
  sub->add_option("--lambda_other", o.lambda_other,
                  "weight of the push away from other class means")
      ->capture_default_str();
  sub->add_option("--lambda_same_per_class", o.lambda_same_per_class,
                  "comma-separated per-class pull weights; overrides lambda_same")
      ->delimiter(',');
  sub->add_option("--lambda_other_per_class", o.lambda_other_per_class,
                  "comma-separated per-class push weights, entry i weights the distance to "
                  "mean i; overrides lambda_other")
      ->delimiter(',');
  sub->add_flag("--plain", o.plain, "plain autoencoder: forces every lambda to 0");
  sub->add_option("--learning_rate", o.learning_rate, "gradient descent step size")
      ->capture_default_str();
  sub->add_option("--iterations", o.iterations, "iterations per layer (epochs in minibatch mode)")
      ->capture_default_str();
  sub->add_option("--batch_size", o.batch_size, "minibatch size; 0 means full batch")
      ->capture_default_str();
  if (!fresh_layers) return;
  sub->add_option("--activation", o.activation, "hidden activation: sigmoid, tanh or linear")
      ->capture_default_str();
  sub->add_option("--init_scale", o.init_scale,
                  "weights start uniform in +-init_scale/sqrt(fan_in)")
      ->capture_default_str();
}

void add_mlp(CLI::App* sub, MlpOptions& m) {
  sub->add_option("--classifier", m.classifier, "train the classifier stage (true/false)")
      ->capture_default_str();
  sub->add_option("--mlp_epochs", m.epochs, "classifier gradient descent epochs")
      ->capture_default_str();
  sub->add_option("--mlp_learning_rate", m.learning_rate, "classifier step size")
      ->capture_default_str();
}

// Keys already given as flags keep the flag value.
void apply_config(const Common& c) {
  if (c.config.empty()) return;
  std::ifstream is(c.config);
  if (!is) throw ParameterError("config: cannot open " + c.config);
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(is);
  } catch (const CLI::Error& e) {
    throw ParameterError(c.config + ": " + e.what());
  }
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    const std::string key = item.fullname();
    CLI::Option* opt =
        key == "config" ? nullptr : c.app->get_option_no_throw("--" + key);
    if (opt == nullptr)
      throw ParameterError(c.config + ": unknown key '" + key + "' for " + c.app->get_name());
    if (opt->count() > 0) continue;
    try {
      for (const auto& v : item.inputs) opt->add_result(v);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw ParameterError(c.config + ": " + key + ": " + e.what());
    }
  }
}

void require_path(const std::string& value, const char* key) {
  if (value.empty()) throw ParameterError(std::string(key) + " is required");
}

// ---------------------------------------------------------------------------
// Validation and conversion
// ---------------------------------------------------------------------------

TrainConfig<double> ae_config(const AeOptions& o, std::uint64_t seed) {
  TrainConfig<double> cfg;
  cfg.lambda_same = o.lambda_same;
  cfg.lambda_other = o.lambda_other;
  cfg.lambda_same_per_class = o.lambda_same_per_class;
  cfg.lambda_other_per_class = o.lambda_other_per_class;
  if (o.plain) {
    cfg.lambda_same = cfg.lambda_other = 0.0;
    cfg.lambda_same_per_class.clear();
    cfg.lambda_other_per_class.clear();
  }
  cfg.learning_rate = o.learning_rate;
  cfg.iterations = o.iterations;
  if (o.batch_size < 0) throw ParameterError("batch_size must be >= 0");
  if (o.batch_size > 0) {
    cfg.batch_mode = BatchMode::minibatch;
    cfg.batch_size = o.batch_size;
  }
  cfg.activation = parse_activation(o.activation);
  cfg.init_scale = o.init_scale;
  cfg.seed = seed;

  // Class count is unknown until the data is read; check against the
  // per-class lists themselves and again after loading.
  const auto& a = cfg.lambda_same_per_class;
  const auto& b = cfg.lambda_other_per_class;
  if (!a.empty() && !b.empty() && a.size() != b.size())
    throw ParameterError("lambda_same_per_class has " + std::to_string(a.size()) +
                         " entries but lambda_other_per_class has " + std::to_string(b.size()));
  cfg.validate(static_cast<int>(std::max(a.size(), b.size())));
  return cfg;
}

MlpTrainConfig mlp_config(const MlpOptions& m) {
  if (m.epochs < 1) throw ParameterError("mlp_epochs must be >= 1");
  if (!(m.learning_rate > 0.0)) throw ParameterError("mlp_learning_rate must be > 0");
  return {m.epochs, m.learning_rate};
}

void check_resize(int resize) {
  if (resize < 0) throw ParameterError("resize must be >= 0");
}

LabeledDataset load_data(const DataOptions& d) {
  std::ifstream is(d.data, std::ios::binary);
  if (!is) throw DataError(d.data + ": cannot open dataset");
  char magic[4] = {};
  is.read(magic, 4);
  const bool crds = is.gcount() == 4 && std::string(magic, 4) == "CRDS";
  is.close();
  if (crds) {
    LabeledDataset data = load_dataset(d.data);
    return d.resize > 0 ? resize_bilinear(data, d.resize) : data;
  }
  const fs::path manifest(d.data);
  return load_image_dir(manifest.parent_path(), manifest,
                        d.resize > 0 ? std::optional<int>(d.resize) : std::nullopt);
}

LabeledDataset with_samples(LabeledDataset data, Matrix samples) {
  data.samples = std::move(samples);
  data.width = data.height = 0;
  return data;
}

std::string history_path(const std::string& model_path) { return model_path + ".loss.csv"; }

void open_history(std::ofstream& os, const std::string& path, bool append) {
  const bool fresh = !append || !fs::exists(path);
  os.open(path, fresh ? std::ios::out : std::ios::app);
  if (!os) throw FormatError(path + ": cannot open loss history");
  if (fresh) os << "phase,layer,iteration,reconstruction,intra,inter,total\n";
}

void write_ae_history(std::ofstream& os, const std::string& phase,
                      const std::vector<TrainResult<double>>& results) {
  for (std::size_t j = 0; j < results.size(); ++j) {
    const auto& h = results[j].history;
    for (std::size_t i = 0; i < h.size(); ++i)
      os << phase << "," << j << "," << i << "," << real(h[i].reconstruction) << ","
         << real(h[i].intra) << "," << real(h[i].inter) << "," << real(h[i].total) << "\n";
  }
}

void write_mlp_history(std::ofstream& os, const std::string& phase,
                       const std::vector<double>& history) {
  for (std::size_t i = 0; i < history.size(); ++i)
    os << phase << ",," << i << ",,,," << real(history[i]) << "\n";
}

MlpTrainResult<double> fit_classifier(std::optional<MlpModel<double>> start,
                                      const LabeledDataset& features, const MlpTrainConfig& cfg,
                                      std::uint64_t seed) {
  MlpModel<double> mlp =
      start ? *start : build_default<double>(features.dim(), features.n_classes, seed);
  return train_mlp(std::move(mlp), features, cfg);
}

const MlpModel<double>& require_classifier(const ModelContainer& model, const std::string& path) {
  if (!model.classifier) throw DataError(path + ": model has no classifier stage");
  return *model.classifier;
}

void check_compatible(const ModelContainer& model, const LabeledDataset& data,
                      const std::string& model_path) {
  if (model.input_dim() != data.dim())
    throw ShapeError("model " + model_path + " expects input dim " +
                     std::to_string(model.input_dim()) + " but the data has dim " +
                     std::to_string(data.dim()));
  const int model_classes = model.means.front().n_classes();
  if (data.n_classes > model_classes)
    throw DataError("data has " + std::to_string(data.n_classes) + " classes but the model knows " +
                    std::to_string(model_classes));
}

std::vector<std::string> class_names_for(const ModelContainer& model, const LabeledDataset& data) {
  return data.class_names.empty() ? model.class_names : data.class_names;
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

struct SynthCmd {
  Common common;
  SynthSpec spec;

  void attach(CLI::App& app, std::function<void()>& action, std::ostream& out) {
    auto* sub = app.add_subcommand("synth", "generate a two-class synthetic image dataset");
    add_common(sub, common, "synthetic.crds", "output CRDS dataset");
    sub->add_option("--resolution", spec.resolution, "image side length")->capture_default_str();
    sub->add_option("--per_class", spec.per_class, "samples per class")->capture_default_str();
    sub->add_option("--class_separation", spec.class_separation,
                    "largest per-pixel difference between the class templates")
        ->capture_default_str();
    sub->add_option("--noise_sigma", spec.noise_sigma, "per-pixel Gaussian noise sigma")
        ->capture_default_str();
    sub->add_option("--template_shift", spec.template_shift,
                    "0 = first template domain, 1 = second domain")
        ->capture_default_str();
    sub->callback([this, &action, &out] { action = [this, &out] { run(out); }; });
  }

  void run(std::ostream& out) {
    apply_config(common);
    spec.seed = common.seed;
    spec.validate();
    const LabeledDataset data = generate_synthetic(spec);
    save_dataset(common.out, data);
    out << "wrote " << data.rows() << " samples of dim " << data.dim() << " to " << common.out
        << "\n";
  }
};

struct TrainCmd {
  Common common;
  DataOptions data_opts;
  AeOptions ae;
  MlpOptions mlp;
  long depth = 1;
  std::vector<long> hidden;

  void attach(CLI::App& app, std::function<void()>& action, std::ostream& out) {
    auto* sub = app.add_subcommand("train", "train feature layers and the classifier");
    add_common(sub, common, "model.crae", "output CRAE model; loss history goes to <out>.loss.csv");
    add_data(sub, data_opts);
    sub->add_option("--depth", depth, "number of stacked feature layers")->capture_default_str();
    sub->add_option("--hidden", hidden,
                    "comma-separated hidden sizes, one per layer or one for all; default is the "
                    "input dim")
        ->delimiter(',');
    add_ae(sub, ae, true);
    add_mlp(sub, mlp);
    sub->callback([this, &action, &out] { action = [this, &out] { run(out); }; });
  }

  std::vector<Index> dims(Index input_dim) const {
    if (depth < 1) throw ParameterError("depth must be >= 1");
    if (hidden.size() > 1 && static_cast<long>(hidden.size()) != depth)
      throw ParameterError("hidden lists " + std::to_string(hidden.size()) +
                           " sizes but depth is " + std::to_string(depth));
    std::vector<Index> d(static_cast<std::size_t>(depth), input_dim);
    for (std::size_t j = 0; j < d.size(); ++j) {
      if (!hidden.empty()) d[j] = hidden.size() == 1 ? hidden[0] : hidden[j];
      if (d[j] < 1) throw ParameterError("hidden sizes must be >= 1");
    }
    return d;
  }

  void run(std::ostream& out) {
    apply_config(common);
    auto cfg = ae_config(ae, common.seed);
    const auto mlp_cfg = mlp_config(mlp);
    require_path(data_opts.data, "data");
    check_resize(data_opts.resize);
    if (depth < 1) throw ParameterError("depth must be >= 1");

    const LabeledDataset data = load_data(data_opts);
    if (data.n_classes < 2) throw DataError("training needs at least two classes");
    cfg.validate(data.n_classes);
    const auto layer_dims = dims(data.dim());
    if (mlp.classifier && layer_dims.back() < 16)
      throw ParameterError("hidden: the classifier stage needs a top layer of at least 16 units, "
                           "got " + std::to_string(layer_dims.back()) +
                           " (set classifier = false to skip it)");

    const auto results = stack_train(data, std::span<const Index>(layer_dims), cfg);
    ModelContainer model;
    model.layers = layers_of(results);
    model.means = stack_class_means<double>(model.layers, data);
    model.class_names = data.class_names;

    std::ofstream hist;
    open_history(hist, history_path(common.out), false);
    write_ae_history(hist, "pretrain", results);
    for (std::size_t j = 0; j < results.size(); ++j)
      out << "layer " << j << ": " << model.layers[j].input_dim() << " -> "
          << model.layers[j].hidden_dim() << ", loss " << real(results[j].history.front().total)
          << " -> " << real(results[j].history.back().total) << "\n";

    if (mlp.classifier) {
      const auto features = with_samples(data, encode_stack<double>(model.layers, data.samples));
      auto fit = fit_classifier(std::nullopt, features, mlp_cfg, common.seed);
      write_mlp_history(hist, "classifier", fit.history);
      out << "classifier: loss " << real(fit.history.front()) << " -> " << real(fit.history.back())
          << "\n";
      model.classifier = std::move(fit.model);
    }
    hist.flush();
    if (!hist) throw FormatError(history_path(common.out) + ": write failed");
    save_model(common.out, model);
    out << "model written to " << common.out << "\n";
  }
};

struct FinetuneCmd {
  Common common;
  DataOptions data_opts;
  AeOptions ae;
  MlpOptions mlp;
  std::string model_path;

  void attach(CLI::App& app, std::function<void()>& action, std::ostream& out) {
    auto* sub = app.add_subcommand("finetune", "continue training a model on new data");
    add_common(sub, common, "finetuned.crae",
               "output CRAE model; <model>.loss.csv is copied to <out>.loss.csv and extended");
    add_model(sub, model_path);
    add_data(sub, data_opts);
    add_ae(sub, ae, false);
    add_mlp(sub, mlp);
    sub->callback([this, &action, &out] { action = [this, &out] { run(out); }; });
  }

  void run(std::ostream& out) {
    apply_config(common);
    auto cfg = ae_config(ae, common.seed);
    const auto mlp_cfg = mlp_config(mlp);
    require_path(data_opts.data, "data");
    check_resize(data_opts.resize);

    require_path(model_path, "model");
    ModelContainer model = load_model(model_path);
    const LabeledDataset data = load_data(data_opts);
    check_compatible(model, data, model_path);
    cfg.validate(data.n_classes);

    std::vector<TrainResult<double>> results;
    Matrix x = data.samples;
    for (std::size_t j = 0; j < model.layers.size(); ++j) {
      TrainConfig<double> layer_cfg = cfg;
      layer_cfg.seed = cfg.seed + j;
      results.push_back(fine_tune(model.layers[j], with_samples(data, x), layer_cfg));
      model.layers[j] = results.back().layer;
      x = encode(model.layers[j], x);
    }
    model.means = stack_class_means<double>(model.layers, data);
    if (model.class_names.empty()) model.class_names = data.class_names;

    const std::string in_hist = history_path(model_path);
    const std::string out_hist = history_path(common.out);
    std::error_code same_ec;
    if (fs::exists(in_hist) && !fs::equivalent(in_hist, out_hist, same_ec))
      fs::copy_file(in_hist, out_hist, fs::copy_options::overwrite_existing);
    std::ofstream hist;
    open_history(hist, out_hist, true);
    write_ae_history(hist, "finetune", results);
    for (std::size_t j = 0; j < results.size(); ++j)
      out << "layer " << j << ": loss " << real(results[j].history.front().total) << " -> "
          << real(results[j].history.back().total) << "\n";

    if (mlp.classifier) {
      const auto features = with_samples(data, x);
      auto fit = fit_classifier(model.classifier, features, mlp_cfg, common.seed);
      write_mlp_history(hist, "classifier_finetune", fit.history);
      out << "classifier: loss " << real(fit.history.front()) << " -> " << real(fit.history.back())
          << "\n";
      model.classifier = std::move(fit.model);
    }
    hist.flush();
    if (!hist) throw FormatError(out_hist + ": write failed");
    save_model(common.out, model);
    out << "model written to " << common.out << "\n";
  }
};

struct ExtractCmd {
  Common common;
  DataOptions data_opts;
  std::string model_path;
  long layers = 0;

  void attach(CLI::App& app, std::function<void()>& action, std::ostream& out) {
    auto* sub = app.add_subcommand("extract", "write hidden features of a dataset as CRDS");
    add_common(sub, common, "features.crds", "output CRDS feature dataset");
    add_model(sub, model_path);
    add_data(sub, data_opts);
    sub->add_option("--layers", layers, "number of feature layers to apply; 0 means all")
        ->capture_default_str();
    sub->callback([this, &action, &out] { action = [this, &out] { run(out); }; });
  }

  void run(std::ostream& out) {
    apply_config(common);
    require_path(data_opts.data, "data");
    check_resize(data_opts.resize);
    if (layers < 0) throw ParameterError("layers must be >= 0");
    require_path(model_path, "model");
    const ModelContainer model = load_model(model_path);
    if (layers > static_cast<long>(model.layers.size()))
      throw ParameterError("layers is " + std::to_string(layers) + " but the model has " +
                           std::to_string(model.layers.size()));
    const LabeledDataset data = load_data(data_opts);
    check_compatible(model, data, model_path);
    const std::size_t use = layers == 0 ? model.layers.size() : static_cast<std::size_t>(layers);
    const auto stack = std::span<const AutoencoderLayer<double>>(model.layers).first(use);
    LabeledDataset features = with_samples(data, encode_stack(stack, data.samples));
    if (features.class_names.empty()) features.class_names = model.class_names;
    save_dataset(common.out, features);
    out << "wrote " << features.rows() << " feature rows of dim " << features.dim() << " to "
        << common.out << "\n";
  }
};

struct EvaluateCmd {
  Common common;
  DataOptions data_opts;
  std::string model_path;
  std::string confusion;
  std::string roc_out;

  void attach(CLI::App& app, std::function<void()>& action, std::ostream& out) {
    auto* sub = app.add_subcommand("evaluate", "classify a dataset and write the metrics");
    add_common(sub, common, "report.txt", "key = value evaluation report");
    add_model(sub, model_path);
    add_data(sub, data_opts);
    sub->add_option("--confusion", confusion,
                    "confusion matrix CSV; default <out>.confusion.csv");
    sub->add_option("--roc", roc_out, "ROC CSV for two-class data; empty skips it");
    sub->callback([this, &action, &out] { action = [this, &out] { run(out); }; });
  }

  void run(std::ostream& out) {
    apply_config(common);
    require_path(data_opts.data, "data");
    check_resize(data_opts.resize);
    require_path(model_path, "model");
    const ModelContainer model = load_model(model_path);
    const auto& mlp = require_classifier(model, model_path);
    const LabeledDataset data = load_data(data_opts);
    check_compatible(model, data, model_path);

    const auto pred = predict(mlp, encode_stack<double>(model.layers, data.samples));
    const int n = std::max(data.n_classes, mlp.n_classes);
    const EvalReport report =
        evaluate(pred.labels, data.labels, n, std::span<const std::string>(data.sample_ids));
    std::optional<double> auc;
    if (n == 2) {
      const RowVector s = pred.positive_scores();
      const RocCurve curve = roc(std::span<const double>(s.data(), static_cast<std::size_t>(s.size())),
                                 data.labels);
      auc = curve.auc;
      if (!roc_out.empty()) write_roc_csv(roc_out, curve);
    }
    write_report(common.out, report, class_names_for(model, data), auc);
    write_confusion_csv(confusion.empty() ? common.out + ".confusion.csv" : confusion, report);

    const auto names = class_names_for(model, data);
    for (int c = 0; c < n; ++c)
      out << "class " << (static_cast<std::size_t>(c) < names.size() ? names[static_cast<std::size_t>(c)] : std::to_string(c))
          << ": " << format_percent(report.per_class_accuracy[static_cast<std::size_t>(c)]) << "%\n";
    out << "mean class-wise accuracy: " << format_percent(report.mean_classwise_accuracy) << "%\n";
    if (auc) out << "auc: " << real(*auc) << "\n";
    out << "report written to " << common.out << "\n";
  }
};

struct ReconstructCmd {
  Common common;
  DataOptions data_opts;
  std::string model_path;
  long count = 8;

  void attach(CLI::App& app, std::function<void()>& action, std::ostream& out) {
    auto* sub = app.add_subcommand("reconstruct", "export input, reconstruction and mean images");
    add_common(sub, common, "reconstructions", "output directory for PGM images");
    add_model(sub, model_path);
    add_data(sub, data_opts);
    sub->add_option("--count", count, "number of samples to reconstruct")->capture_default_str();
    sub->callback([this, &action, &out] { action = [this, &out] { run(out); }; });
  }

  void run(std::ostream& out) {
    apply_config(common);
    require_path(data_opts.data, "data");
    check_resize(data_opts.resize);
    if (count < 0) throw ParameterError("count must be >= 0");
    require_path(model_path, "model");
    const ModelContainer model = load_model(model_path);
    const LabeledDataset data = load_data(data_opts);
    check_compatible(model, data, model_path);
    int w = data.width, h = data.height;
    if (static_cast<Index>(w) * h != data.dim())
      throw ShapeError("reconstruct: data rows of dim " + std::to_string(data.dim()) +
                       " are not images with known width and height");
    const auto written = export_reconstructions(model.layers, model.means.back(), data.samples, w,
                                                h, common.out, count);
    out << "wrote " << written.size() << " images to " << common.out << "\n";
  }
};

struct RocCmd {
  Common common;
  DataOptions data_opts;
  std::string model_path;

  void attach(CLI::App& app, std::function<void()>& action, std::ostream& out) {
    auto* sub = app.add_subcommand("roc", "ROC curve of a two-class model on a dataset");
    add_common(sub, common, "roc.csv", "fpr,tpr CSV with an auc footer");
    add_model(sub, model_path);
    add_data(sub, data_opts);
    sub->callback([this, &action, &out] { action = [this, &out] { run(out); }; });
  }

  void run(std::ostream& out) {
    apply_config(common);
    require_path(data_opts.data, "data");
    check_resize(data_opts.resize);
    require_path(model_path, "model");
    const ModelContainer model = load_model(model_path);
    const auto& mlp = require_classifier(model, model_path);
    if (mlp.n_classes != 2) throw DataError("roc needs a two-class model");
    const LabeledDataset data = load_data(data_opts);
    check_compatible(model, data, model_path);
    const auto pred = predict(mlp, encode_stack<double>(model.layers, data.samples));
    const RowVector s = pred.positive_scores();
    const RocCurve curve =
        roc(std::span<const double>(s.data(), static_cast<std::size_t>(s.size())), data.labels);
    write_roc_csv(common.out, curve);
    out << "auc: " << real(curve.auc) << "\n";
    out << "roc written to " << common.out << "\n";
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Class representative autoencoder toolkit", "crae");
  app.require_subcommand(1, 1);
  app.failure_message([](const CLI::App*, const CLI::Error& e) {
    return std::string("error: ") + e.what() + "\n";
  });

  std::function<void()> action;
  SynthCmd synth;
  TrainCmd train;
  FinetuneCmd finetune;
  ExtractCmd extract;
  EvaluateCmd evaluate_cmd;
  ReconstructCmd reconstruct;
  RocCmd roc_cmd;
  synth.attach(app, action, out);
  train.attach(app, action, out);
  finetune.attach(app, action, out);
  extract.attach(app, action, out);
  evaluate_cmd.attach(app, action, out);
  reconstruct.attach(app, action, out);
  roc_cmd.attach(app, action, out);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (action) action();
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace crae::cli
