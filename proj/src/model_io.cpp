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

#include "crae/model_io.hpp"

#include <fstream>
#include <iterator>
#include <sstream>

#include "binary_io.hpp"

namespace crae {

namespace {

constexpr std::uint64_t kMaxDim = 1ull << 24;

void put_matrix(std::ostream& os, const Matrix& m) {
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) io::put_f64(os, m(r, c));
}

Matrix get_matrix(io::Reader& in, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) m(r, c) = in.f64();
  return m;
}

Index get_dim(io::Reader& in, const char* what) {
  const auto v = in.u64();
  if (v == 0 || v > kMaxDim) in.fail(std::string("implausible ") + what + " " + std::to_string(v));
  return static_cast<Index>(v);
}

Activation get_activation(io::Reader& in) {
  const auto tag = in.u8();
  if (tag > static_cast<std::uint8_t>(Activation::linear))
    in.fail("unknown activation tag " + std::to_string(tag));
  return static_cast<Activation>(tag);
}

std::string mlp_payload(const MlpModel<double>& mlp) {
  std::ostringstream os(std::ios::binary);
  io::put_u8(os, static_cast<std::uint8_t>(mlp.output));
  io::put_u32(os, static_cast<std::uint32_t>(mlp.n_classes));
  io::put_u32(os, static_cast<std::uint32_t>(mlp.layers.size()));
  for (const auto& l : mlp.layers) {
    io::put_u8(os, static_cast<std::uint8_t>(l.activation));
    io::put_u64(os, static_cast<std::uint64_t>(l.input_dim()));
    io::put_u64(os, static_cast<std::uint64_t>(l.output_dim()));
    put_matrix(os, l.weights);
    for (Index i = 0; i < l.bias.size(); ++i) io::put_f64(os, l.bias(i));
  }
  io::put_u8(os, mlp.standardized() ? 1 : 0);
  for (Index i = 0; i < mlp.input_shift.size(); ++i) io::put_f64(os, mlp.input_shift(i));
  for (Index i = 0; i < mlp.input_scale.size(); ++i) io::put_f64(os, mlp.input_scale(i));
  return os.str();
}

MlpModel<double> read_mlp(io::Reader& in) {
  MlpModel<double> mlp;
  const auto kind = in.u8();
  if (kind > static_cast<std::uint8_t>(OutputKind::softmax))
    in.fail("unknown classifier output kind " + std::to_string(kind));
  mlp.output = static_cast<OutputKind>(kind);
  mlp.n_classes = static_cast<int>(in.u32());
  const auto n_layers = in.u32();
  if (n_layers == 0 || n_layers > 64) in.fail("implausible classifier layer count");
  for (std::uint32_t k = 0; k < n_layers; ++k) {
    DenseLayer<double> l;
    l.activation = get_activation(in);
    const Index input = get_dim(in, "classifier input dim");
    const Index output = get_dim(in, "classifier output dim");
    l.weights = get_matrix(in, output, input);
    l.bias.resize(output);
    for (Index i = 0; i < output; ++i) l.bias(i) = in.f64();
    mlp.layers.push_back(std::move(l));
  }
  const auto standardized = in.u8();
  if (standardized > 1) in.fail("bad classifier standardization flag");
  if (standardized == 1) {
    const Index n = mlp.input_dim();
    mlp.input_shift.resize(n);
    mlp.input_scale.resize(n);
    for (Index i = 0; i < n; ++i) mlp.input_shift(i) = in.f64();
    for (Index i = 0; i < n; ++i) mlp.input_scale(i) = in.f64();
  }
  return mlp;
}

std::string names_payload(const std::vector<std::string>& names) {
  std::ostringstream os(std::ios::binary);
  io::put_u32(os, static_cast<std::uint32_t>(names.size()));
  for (const auto& n : names) {
    io::put_u32(os, static_cast<std::uint32_t>(n.size()));
    os.write(n.data(), static_cast<std::streamsize>(n.size()));
  }
  return os.str();
}

void put_section(std::ostream& os, const char (&tag)[5], const std::string& payload) {
  io::put_tag(os, tag);
  io::put_u64(os, payload.size());
  os.write(payload.data(), static_cast<std::streamsize>(payload.size()));
}

}  // namespace

void ModelContainer::validate() const {
  if (layers.empty()) throw ShapeError("model has no feature layers");
  if (means.size() != layers.size())
    throw ShapeError("model has " + std::to_string(layers.size()) + " layers but " +
                     std::to_string(means.size()) + " class-mean sets");
  for (std::size_t j = 0; j < layers.size(); ++j) {
    layers[j].validate();
    if (j > 0 && layers[j].input_dim() != layers[j - 1].hidden_dim())
      throw ShapeError("layer " + std::to_string(j) + " expects input dim " +
                       std::to_string(layers[j].input_dim()) + " but layer " +
                       std::to_string(j - 1) + " produces " +
                       std::to_string(layers[j - 1].hidden_dim()));
    if (means[j].hidden_dim() != layers[j].hidden_dim())
      throw ShapeError("class means of layer " + std::to_string(j) + " have the wrong dim");
  }
  if (classifier) {
    classifier->validate();
    if (classifier->input_dim() != feature_dim())
      throw ShapeError("classifier expects " + std::to_string(classifier->input_dim()) +
                       " features but the top layer produces " + std::to_string(feature_dim()));
  }
}

std::vector<std::uint8_t> serialize_model(const ModelContainer& model) {
  model.validate();
  std::ostringstream os(std::ios::binary);
  io::put_tag(os, "CRAE");
  io::put_u32(os, kModelFormatVersion);
  io::put_u32(os, static_cast<std::uint32_t>(model.layers.size()));
  for (std::size_t j = 0; j < model.layers.size(); ++j) {
    const auto& layer = model.layers[j];
    io::put_u8(os, static_cast<std::uint8_t>(layer.activation));
    io::put_u64(os, static_cast<std::uint64_t>(layer.input_dim()));
    io::put_u64(os, static_cast<std::uint64_t>(layer.hidden_dim()));
    put_matrix(os, layer.encoder);
    put_matrix(os, layer.decoder);
    io::put_u32(os, static_cast<std::uint32_t>(model.means[j].n_classes()));
    put_matrix(os, model.means[j].means);
  }
  if (model.classifier) put_section(os, "MLP ", mlp_payload(*model.classifier));
  if (!model.class_names.empty()) put_section(os, "NAME", names_payload(model.class_names));
  io::put_tag(os, "END ");
  const std::string s = os.str();
  return {s.begin(), s.end()};
}

ModelContainer deserialize_model(std::span<const std::uint8_t> bytes, const std::string& source) {
  std::istringstream is(std::string(bytes.begin(), bytes.end()), std::ios::binary);
  io::Reader in(is, source);
  in.expect_tag("CRAE");
  const auto version = in.u32();
  if (version != kModelFormatVersion) in.fail("unsupported CRAE version " + std::to_string(version));
  const auto n_layers = in.u32();
  if (n_layers == 0 || n_layers > 64) in.fail("implausible layer count " + std::to_string(n_layers));

  ModelContainer model;
  for (std::uint32_t j = 0; j < n_layers; ++j) {
    AutoencoderLayer<double> layer;
    layer.activation = get_activation(in);
    const Index input = get_dim(in, "input dim");
    const Index hidden = get_dim(in, "hidden dim");
    layer.encoder = get_matrix(in, hidden, input);
    layer.decoder = get_matrix(in, input, hidden);
    const auto n_classes = in.u32();
    if (n_classes > 65535) in.fail("implausible class count");
    model.means.push_back({get_matrix(in, static_cast<Index>(n_classes), hidden)});
    model.layers.push_back(std::move(layer));
  }
  while (true) {
    const std::string tag = in.tag();
    if (tag == "END ") break;
    const auto length = in.u64();
    if (tag == "MLP ") {
      model.classifier = read_mlp(in);
    } else if (tag == "NAME") {
      const auto count = in.u32();
      for (std::uint32_t i = 0; i < count; ++i) {
        const auto len = in.u32();
        std::string name(len, '\0');
        for (auto& ch : name) ch = static_cast<char>(in.u8());
        model.class_names.push_back(std::move(name));
      }
    } else {
      // Unknown sections are skipped so newer writers stay readable.
      for (std::uint64_t i = 0; i < length; ++i) in.u8();
    }
  }
  if (!in.at_eof()) in.fail("trailing bytes after END tag");
  try {
    model.validate();
  } catch (const std::exception& e) {
    in.fail(std::string("inconsistent model: ") + e.what());
  }
  return model;
}

void save_model(const std::filesystem::path& path, const ModelContainer& model) {
  const auto bytes = serialize_model(model);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError(path.string() + ": cannot open for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw FormatError(path.string() + ": write failed");
}

ModelContainer load_model(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError(path.string() + ": cannot open model");
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)),
                                        std::istreambuf_iterator<char>());
  return deserialize_model(bytes, path.string());
}

}  // namespace crae
