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

#include "crae/data.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "binary_io.hpp"

namespace crae {

namespace {

constexpr std::uint32_t kDatasetVersion = 1;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

// PNM header tokens, skipping '#' comments.
std::string next_token(std::istream& is, const std::string& path) {
  std::string tok;
  while (true) {
    const int c = is.get();
    if (c == std::char_traits<char>::eof()) break;
    if (c == '#') {
      std::string rest;
      std::getline(is, rest);
      if (!tok.empty()) break;
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  if (tok.empty()) throw FormatError(path + ": truncated PNM header");
  return tok;
}

int parse_header_int(std::istream& is, const std::string& path, const char* what) {
  const std::string tok = next_token(is, path);
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size() || v < 1) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw FormatError(path + ": invalid PNM " + what + " '" + tok + "'");
  }
}

int square_side(Index cols) {
  const auto side = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(cols))));
  return side * side == cols ? static_cast<int>(side) : 0;
}

// Smooth patterns with unit peak amplitude over pixel centres in [0, 1].
double base_pattern(double u, double v, int domain) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (domain == 0) return 0.5 + 0.15 * std::cos(two_pi * (u - 0.5)) * std::cos(two_pi * (v - 0.5));
  return 0.5 + 0.15 * std::cos(2.0 * two_pi * u + 0.3) * std::cos(two_pi * v + 1.1);
}

// The two class patterns use different horizontal frequencies and are
// orthogonal over the pixel grid.
double class_pattern(double u, double v, int domain) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (domain == 0) return std::sin(two_pi * u + 0.4) * std::sin(2.0 * two_pi * v + 0.9);
  return std::sin(2.0 * two_pi * u + 1.7) * std::sin(two_pi * v + 0.2);
}

}  // namespace

// ---------------------------------------------------------------------------
// Images
// ---------------------------------------------------------------------------

GrayImage read_pnm(const std::filesystem::path& path) {
  const std::string p = path.string();
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError(p + ": cannot open image");
  const std::string magic = next_token(is, p);
  const bool ascii = magic == "P2" || magic == "P3";
  const bool color = magic == "P3" || magic == "P6";
  if (magic != "P2" && magic != "P5" && magic != "P3" && magic != "P6")
    throw FormatError(p + ": unsupported image format '" + magic + "' (expected PGM or PPM)");

  GrayImage img;
  img.width = parse_header_int(is, p, "width");
  img.height = parse_header_int(is, p, "height");
  const int maxval = parse_header_int(is, p, "maxval");
  if (maxval > 65535) throw FormatError(p + ": maxval " + std::to_string(maxval) + " too large");

  const std::size_t n = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
  const int channels = color ? 3 : 1;
  std::vector<int> raw(n * static_cast<std::size_t>(channels));
  if (ascii) {
    for (auto& v : raw) {
      if (!(is >> v)) throw FormatError(p + ": truncated pixel data");
    }
  } else {
    const int bytes = maxval < 256 ? 1 : 2;
    std::vector<unsigned char> buf(raw.size() * static_cast<std::size_t>(bytes));
    if (!is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size())))
      throw FormatError(p + ": truncated pixel data");
    for (std::size_t i = 0; i < raw.size(); ++i)
      raw[i] = bytes == 1 ? buf[i] : (buf[2 * i] << 8) | buf[2 * i + 1];
  }
  for (int v : raw)
    if (v < 0 || v > maxval) throw FormatError(p + ": pixel value exceeds maxval");
  img.pixels.resize(n);
  const double scale = static_cast<double>(maxval);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = color ? 0.299 * raw[3 * i] + 0.587 * raw[3 * i + 1] + 0.114 * raw[3 * i + 2]
                           : static_cast<double>(raw[i]);
    img.pixels[i] = std::clamp(v / scale, 0.0, 1.0);
  }
  return img;
}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

void write_pgm(const std::filesystem::path& path, const GrayImage& image) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError(path.string() + ": cannot open for writing");
  os << "P5\n" << image.width << ' ' << image.height << "\n255\n";
  for (double v : image.pixels) os.put(static_cast<char>(to_byte(v)));
  if (!os) throw FormatError(path.string() + ": write failed");
}

GrayImage resize_bilinear(const GrayImage& image, int target_width, int target_height) {
  if (target_width < 1 || target_height < 1)
    throw ParameterError("resize target must be >= 1, got " + std::to_string(target_width) + "x" +
                         std::to_string(target_height));
  if (image.width < 1 || image.height < 1) throw ParameterError("cannot resize an empty image");
  GrayImage out;
  out.width = target_width;
  out.height = target_height;
  out.pixels.resize(static_cast<std::size_t>(target_width) * static_cast<std::size_t>(target_height));

  auto source_coord = [](int dst, int in, int outn) {
    const double s = (dst + 0.5) * static_cast<double>(in) / static_cast<double>(outn) - 0.5;
    return std::clamp(s, 0.0, static_cast<double>(in - 1));
  };
  for (int y = 0; y < target_height; ++y) {
    const double sy = source_coord(y, image.height, target_height);
    const int y0 = static_cast<int>(std::floor(sy));
    const int y1 = std::min(y0 + 1, image.height - 1);
    const double fy = sy - y0;
    for (int x = 0; x < target_width; ++x) {
      const double sx = source_coord(x, image.width, target_width);
      const int x0 = static_cast<int>(std::floor(sx));
      const int x1 = std::min(x0 + 1, image.width - 1);
      const double fx = sx - x0;
      // a + f * (b - a) leaves constant regions exact.
      const double top = image.at(y0, x0) + fx * (image.at(y0, x1) - image.at(y0, x0));
      const double bottom = image.at(y1, x0) + fx * (image.at(y1, x1) - image.at(y1, x0));
      out.pixels[static_cast<std::size_t>(y) * static_cast<std::size_t>(target_width) +
                 static_cast<std::size_t>(x)] = top + fy * (bottom - top);
    }
  }
  return out;
}

GrayImage resize_bilinear(const GrayImage& image, int target_side) {
  return resize_bilinear(image, target_side, target_side);
}

GrayImage row_as_image(const LabeledDataset& data, Index row) {
  int w = data.width, h = data.height;
  if (w == 0 || h == 0) w = h = square_side(data.dim());
  if (w == 0 || static_cast<Index>(w) * h != data.dim())
    throw ShapeError("cannot view a row of dim " + std::to_string(data.dim()) + " as an image");
  GrayImage img;
  img.width = w;
  img.height = h;
  img.pixels.assign(data.samples.row(row).data(), data.samples.row(row).data() + data.dim());
  return img;
}

LabeledDataset resize_bilinear(const LabeledDataset& data, int target_side) {
  if (target_side < 1) throw ParameterError("resize target must be >= 1");
  LabeledDataset out = data;
  out.width = out.height = target_side;
  out.samples.resize(data.rows(), static_cast<Index>(target_side) * target_side);
  for (Index r = 0; r < data.rows(); ++r) {
    const GrayImage img = resize_bilinear(row_as_image(data, r), target_side);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) out.samples(r, static_cast<Index>(i)) = img.pixels[i];
  }
  return out;
}

LabeledDataset load_image_dir(const std::filesystem::path& root,
                              const std::filesystem::path& manifest,
                              std::optional<int> resize_side) {
  std::ifstream is(manifest);
  if (!is) throw DataError(manifest.string() + ": cannot open manifest");

  struct Entry {
    std::string path;
    int label;
    std::string subject;
    int line;
  };
  std::vector<Entry> entries;
  std::vector<std::string> names;
  std::unordered_map<std::string, int> name_index;
  bool any_subject = false;

  std::string line;
  int line_no = 0;
  bool first = true;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto fields = split_commas(t);
    if (first) {
      first = false;
      if (!fields.empty() && lower(fields[0]) == "path") continue;
    }
    if (fields.size() < 2 || fields.size() > 3 || fields[0].empty() || fields[1].empty()) {
      throw DataError(manifest.string() + ":" + std::to_string(line_no) +
                      ": expected 'relative_path,label[,subject]'");
    }
    auto [it, inserted] = name_index.emplace(fields[1], static_cast<int>(names.size()));
    if (inserted) names.push_back(fields[1]);
    Entry e{fields[0], it->second, fields.size() == 3 ? fields[2] : std::string(), line_no};
    any_subject = any_subject || !e.subject.empty();
    entries.push_back(std::move(e));
  }
  if (entries.empty()) throw DataError(manifest.string() + ": manifest lists no images");

  LabeledDataset data;
  data.n_classes = static_cast<int>(names.size());
  data.class_names = names;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const Entry& e = entries[k];
    const auto file = root / e.path;
    if (!std::filesystem::exists(file)) {
      throw DataError(manifest.string() + ":" + std::to_string(e.line) + ": missing image " +
                      file.string());
    }
    GrayImage img;
    try {
      img = read_pnm(file);
    } catch (const FormatError& err) {
      throw DataError(manifest.string() + ":" + std::to_string(e.line) + ": " + err.what());
    }
    if (resize_side) img = resize_bilinear(img, *resize_side);
    if (k == 0) {
      data.width = img.width;
      data.height = img.height;
      data.samples.resize(static_cast<Index>(entries.size()),
                          static_cast<Index>(img.width) * img.height);
    } else if (img.width != data.width || img.height != data.height) {
      throw DataError(manifest.string() + ":" + std::to_string(e.line) + ": image " +
                      file.string() + " is " + std::to_string(img.width) + "x" +
                      std::to_string(img.height) + " but earlier images are " +
                      std::to_string(data.width) + "x" + std::to_string(data.height) +
                      " (pass a resize side)");
    }
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
      data.samples(static_cast<Index>(k), static_cast<Index>(i)) = img.pixels[i];
    data.labels.push_back(e.label);
    data.sample_ids.push_back(e.path);
    if (any_subject) data.subject_ids.push_back(e.subject);
  }
  return data;
}

// ---------------------------------------------------------------------------
// Synthetic data
// ---------------------------------------------------------------------------

void SynthSpec::validate() const {
  if (resolution < 4) throw ParameterError("resolution must be >= 4");
  if (per_class < 1) throw ParameterError("per_class must be >= 1");
  if (!(class_separation >= 0.0) || class_separation > 1.0)
    throw ParameterError("class_separation must lie in [0, 1]");
  if (!(noise_sigma >= 0.0)) throw ParameterError("noise_sigma must be >= 0");
  if (!(template_shift >= 0.0) || template_shift > 1.0)
    throw ParameterError("template_shift must lie in [0, 1]");
}

GrayImage synthetic_template(const SynthSpec& spec, int label) {
  spec.validate();
  if (label != 0 && label != 1) throw ParameterError("synthetic data has classes 0 and 1 only");
  const int n = spec.resolution;
  const double t = spec.template_shift;
  const double sign = label == 1 ? 1.0 : -1.0;
  GrayImage img;
  img.width = img.height = n;
  img.pixels.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int r = 0; r < n; ++r) {
    const double v = (r + 0.5) / n;
    for (int c = 0; c < n; ++c) {
      const double u = (c + 0.5) / n;
      const double base = (1.0 - t) * base_pattern(u, v, 0) + t * base_pattern(u, v, 1);
      const double pattern = (1.0 - t) * class_pattern(u, v, 0) + t * class_pattern(u, v, 1);
      img.pixels[static_cast<std::size_t>(r) * static_cast<std::size_t>(n) +
                 static_cast<std::size_t>(c)] =
          std::clamp(base + sign * 0.5 * spec.class_separation * pattern, 0.0, 1.0);
    }
  }
  return img;
}

LabeledDataset generate_synthetic(const SynthSpec& spec) {
  spec.validate();
  const GrayImage templates[2] = {synthetic_template(spec, 0), synthetic_template(spec, 1)};
  const Index dim = static_cast<Index>(spec.resolution) * spec.resolution;
  const Index rows = 2 * static_cast<Index>(spec.per_class);

  LabeledDataset data;
  data.n_classes = 2;
  data.class_names = {"class_0", "class_1"};
  data.width = data.height = spec.resolution;
  data.samples.resize(rows, dim);
  Rng rng(spec.seed);
  for (Index r = 0; r < rows; ++r) {
    const int label = r < spec.per_class ? 0 : 1;
    for (Index i = 0; i < dim; ++i) {
      double v = templates[label].pixels[static_cast<std::size_t>(i)];
      if (spec.noise_sigma > 0.0) v += spec.noise_sigma * rng.normal();
      data.samples(r, i) = std::clamp(v, 0.0, 1.0);
    }
    data.labels.push_back(label);
    char id[32];
    std::snprintf(id, sizeof id, "synth_%06ld", static_cast<long>(r));
    data.sample_ids.emplace_back(id);
  }
  return data;
}

// ---------------------------------------------------------------------------
// Combination and partitioning
// ---------------------------------------------------------------------------

LabeledDataset concat(const LabeledDataset& a, const LabeledDataset& b) {
  a.validate();
  b.validate();
  if (b.rows() == 0) return a;
  if (a.rows() == 0) return b;
  if (a.dim() != b.dim())
    throw DataError("concat: sample dims differ (" + std::to_string(a.dim()) + " vs " +
                    std::to_string(b.dim()) + ")");
  if (a.class_names.empty() != b.class_names.empty())
    throw DataError("concat: class-name conflict, only one dataset has class names");

  LabeledDataset out;
  out.class_names = a.class_names;
  std::vector<int> remap(static_cast<std::size_t>(b.n_classes));
  if (a.class_names.empty()) {
    out.n_classes = std::max(a.n_classes, b.n_classes);
    for (int c = 0; c < b.n_classes; ++c) remap[static_cast<std::size_t>(c)] = c;
  } else {
    for (int c = 0; c < b.n_classes; ++c) {
      const auto& name = b.class_names[static_cast<std::size_t>(c)];
      auto it = std::find(out.class_names.begin(), out.class_names.end(), name);
      if (it == out.class_names.end()) {
        out.class_names.push_back(name);
        it = out.class_names.end() - 1;
      }
      remap[static_cast<std::size_t>(c)] = static_cast<int>(it - out.class_names.begin());
    }
    out.n_classes = static_cast<int>(out.class_names.size());
  }

  out.samples.resize(a.rows() + b.rows(), a.dim());
  out.samples.topRows(a.rows()) = a.samples;
  out.samples.bottomRows(b.rows()) = b.samples;
  out.labels = a.labels;
  for (int l : b.labels) out.labels.push_back(remap[static_cast<std::size_t>(l)]);
  if (!a.sample_ids.empty() || !b.sample_ids.empty()) {
    for (Index r = 0; r < a.rows(); ++r) out.sample_ids.push_back(a.sample_id(r));
    for (Index r = 0; r < b.rows(); ++r) out.sample_ids.push_back(b.sample_id(r));
  }
  if (!a.subject_ids.empty() && !b.subject_ids.empty()) {
    out.subject_ids = a.subject_ids;
    out.subject_ids.insert(out.subject_ids.end(), b.subject_ids.begin(), b.subject_ids.end());
  }
  if (a.width == b.width && a.height == b.height) {
    out.width = a.width;
    out.height = a.height;
  }
  return out;
}

std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& data, double train_fraction,
                                                std::uint64_t seed,
                                                std::span<const std::string> subject_ids) {
  data.validate();
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ParameterError("train_fraction must lie in (0, 1), got " + std::to_string(train_fraction));
  if (!subject_ids.empty() && static_cast<Index>(subject_ids.size()) != data.rows())
    throw DataError("split: " + std::to_string(subject_ids.size()) + " subject ids for " +
                    std::to_string(data.rows()) + " rows");

  Rng rng(seed);
  const Index n = data.rows();
  std::vector<Index> train_rows, test_rows;
  if (subject_ids.empty()) {
    std::vector<Index> order(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    shuffle_in_place(order, rng);
    const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
    train_rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    test_rows.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  } else {
    std::vector<std::string> subjects;
    std::map<std::string, std::vector<Index>> rows_of;
    for (Index i = 0; i < n; ++i) {
      const auto& s = subject_ids[static_cast<std::size_t>(i)];
      auto& bucket = rows_of[s];
      if (bucket.empty()) subjects.push_back(s);
      bucket.push_back(i);
    }
    shuffle_in_place(subjects, rng);
    const double target = train_fraction * static_cast<double>(n);
    for (const auto& s : subjects) {
      auto& dest = static_cast<double>(train_rows.size()) < target ? train_rows : test_rows;
      const auto& rows = rows_of[s];
      dest.insert(dest.end(), rows.begin(), rows.end());
    }
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());

  auto train = data.subset(train_rows);
  auto test = data.subset(test_rows);
  const auto train_counts = train.class_counts();
  const auto test_counts = test.class_counts();
  for (int c = 0; c < data.n_classes; ++c) {
    if (train_counts[static_cast<std::size_t>(c)] == 0)
      throw DataError("split: class " + std::to_string(c) + " is absent from the training partition");
    if (test_counts[static_cast<std::size_t>(c)] == 0)
      throw DataError("split: class " + std::to_string(c) + " is absent from the test partition");
  }
  return {std::move(train), std::move(test)};
}

LabeledDataset balance_classes(const LabeledDataset& data, std::uint64_t seed,
                               Index per_class_limit) {
  data.validate();
  std::vector<std::vector<Index>> by_class(static_cast<std::size_t>(data.n_classes));
  for (Index r = 0; r < data.rows(); ++r)
    by_class[static_cast<std::size_t>(data.labels[static_cast<std::size_t>(r)])].push_back(r);
  Index keep = per_class_limit;
  if (keep <= 0) {
    keep = data.rows();
    for (const auto& rows : by_class) keep = std::min(keep, static_cast<Index>(rows.size()));
  }
  Rng rng(seed);
  std::vector<Index> chosen;
  for (auto& rows : by_class) {
    shuffle_in_place(rows, rng);
    const auto take = std::min(static_cast<std::size_t>(keep), rows.size());
    chosen.insert(chosen.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(take));
  }
  std::sort(chosen.begin(), chosen.end());
  return data.subset(chosen);
}

// ---------------------------------------------------------------------------
// CRDS cache
// ---------------------------------------------------------------------------

void save_dataset(const std::filesystem::path& path, const LabeledDataset& data) {
  data.validate();
  if (data.n_classes > 65535) throw DataError("CRDS stores labels as u16; too many classes");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError(path.string() + ": cannot open for writing");
  io::put_tag(os, "CRDS");
  io::put_u32(os, kDatasetVersion);
  io::put_u64(os, static_cast<std::uint64_t>(data.rows()));
  io::put_u64(os, static_cast<std::uint64_t>(data.dim()));
  io::put_u32(os, static_cast<std::uint32_t>(data.n_classes));
  for (int l : data.labels) io::put_u16(os, static_cast<std::uint16_t>(l));
  for (Index r = 0; r < data.rows(); ++r)
    for (Index c = 0; c < data.dim(); ++c) io::put_f64(os, data.samples(r, c));
  if (!os) throw FormatError(path.string() + ": write failed");
}

LabeledDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError(path.string() + ": cannot open dataset");
  io::Reader in(is, path.string());
  in.expect_tag("CRDS");
  const auto version = in.u32();
  if (version != kDatasetVersion)
    in.fail("unsupported CRDS version " + std::to_string(version));
  const auto rows = in.u64();
  const auto cols = in.u64();
  const auto n_classes = in.u32();
  if (rows > (1ull << 32) || cols > (1ull << 32)) in.fail("implausible dataset shape");

  LabeledDataset data;
  data.n_classes = static_cast<int>(n_classes);
  data.labels.resize(rows);
  for (auto& l : data.labels) {
    l = in.u16();
    if (l >= data.n_classes) in.fail("label " + std::to_string(l) + " exceeds class count");
  }
  data.samples.resize(static_cast<Index>(rows), static_cast<Index>(cols));
  for (Index r = 0; r < data.rows(); ++r)
    for (Index c = 0; c < data.dim(); ++c) {
      const double v = in.f64();
      if (!std::isfinite(v)) in.fail("non-finite sample value");
      data.samples(r, c) = v;
    }
  if (!in.at_eof()) in.fail("trailing bytes after sample data");
  data.width = data.height = square_side(data.dim());
  return data;
}

}  // namespace crae
