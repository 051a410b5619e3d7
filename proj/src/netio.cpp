/*
 * Copyright 2026 The rotsense Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "rotsense/netio.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "rotsense/errors.hpp"

namespace rotsense::netio {

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace rotsense::lipnet;

namespace {

[[noreturn]] void fail(ErrorKind kind, const std::string& what) { throw ModelIoError(kind, what); }

[[noreturn]] void format_error(const std::string& what) { fail(ErrorKind::ManifestFormat, what); }

std::uint32_t to_little(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    v = ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
  }
  return v;
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) format_error(where + ": missing \"" + key + "\"");
  return *it;
}

std::size_t positive_int(const json& obj, const char* key, const std::string& where,
                         bool allow_zero = false) {
  const json& v = require(obj, key, where);
  if (!v.is_number_integer()) format_error(where + ": \"" + key + "\" must be an integer");
  const auto n = v.get<std::int64_t>();
  if (n < 0 || (n == 0 && !allow_zero)) {
    format_error(where + ": \"" + key + "\" must be " + (allow_zero ? "non-negative" : "positive"));
  }
  return static_cast<std::size_t>(n);
}

bool boolean(const json& obj, const char* key, const std::string& where, bool fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) format_error(where + ": \"" + key + "\" must be a boolean");
  return it->get<bool>();
}

std::optional<double> dropout_rate(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) format_error(where + ": \"" + key + "\" must be a number");
  const double r = it->get<double>();
  if (!(r >= 0.0 && r < 1.0)) format_error(where + ": dropout rate must lie in [0, 1)");
  return r;
}

void allow_only(const json& obj, std::initializer_list<const char*> keys,
                const std::string& where) {
  if (!obj.is_object()) format_error(where + " must be an object");
  for (const auto& [k, v] : obj.items()) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) format_error(where + ": unexpected key \"" + k + "\"");
  }
}

LayerSpec parse_spec(const std::string& kind, const json& hp, const std::string& where) {
  const std::string hw = where + " hyperparameters";
  if (kind == "conv") {
    allow_only(hp, {"out_channels", "kernel", "stride", "padding", "relu", "dropout"}, hw);
    Conv c;
    c.out_channels = positive_int(hp, "out_channels", hw);
    c.kernel = positive_int(hp, "kernel", hw);
    c.stride = positive_int(hp, "stride", hw);
    c.padding = positive_int(hp, "padding", hw, true);
    c.relu = boolean(hp, "relu", hw, false);
    c.dropout = dropout_rate(hp, "dropout", hw);
    return c;
  }
  if (kind == "maxpool") {
    allow_only(hp, {"kernel", "stride"}, hw);
    return MaxPool{positive_int(hp, "kernel", hw), positive_int(hp, "stride", hw)};
  }
  if (kind == "fc") {
    allow_only(hp, {"out_features", "relu", "dropout"}, hw);
    FullyConnected f;
    f.out_features = positive_int(hp, "out_features", hw);
    f.relu = boolean(hp, "relu", hw, false);
    f.dropout = dropout_rate(hp, "dropout", hw);
    return f;
  }
  if (kind == "flatten") {
    allow_only(hp, {}, hw);
    return Flatten{};
  }
  if (kind == "relu") {
    allow_only(hp, {}, hw);
    return ReLU{};
  }
  if (kind == "dropout") {
    allow_only(hp, {"rate"}, hw);
    auto r = dropout_rate(hp, "rate", hw);
    if (!r) format_error(hw + ": missing \"rate\"");
    return Dropout{*r};
  }
  fail(ErrorKind::UnknownLayerKind, where + ": unknown layer kind \"" + kind + "\"");
}

std::vector<std::size_t> parse_shape(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) format_error(where + " must be a non-empty array");
  std::vector<std::size_t> out;
  for (const auto& d : v) {
    if (!d.is_number_integer() || d.get<std::int64_t>() <= 0) {
      format_error(where + " entries must be positive integers");
    }
    out.push_back(static_cast<std::size_t>(d.get<std::int64_t>()));
  }
  return out;
}

Tensor load_tensor(const fs::path& base, const json& entry, const char* file_key,
                   const json& shapes, const char* shape_key,
                   const std::vector<std::size_t>& expected, const std::string& where) {
  const json& file = require(entry, file_key, where);
  if (!file.is_string() || file.get<std::string>().empty()) {
    format_error(where + ": \"" + file_key + "\" must be a file name");
  }
  const std::string sw = where + " shape." + shape_key;
  const auto declared = parse_shape(require(shapes, shape_key, where + " shape"), sw);
  if (declared != expected) {
    fail(ErrorKind::ShapeMismatch, where + ": declared " + shape_key + " shape " +
                                       shape_to_string(declared) + ", expected " +
                                       shape_to_string(expected));
  }
  const fs::path path = base / file.get<std::string>();
  if (!fs::is_regular_file(path)) {
    fail(ErrorKind::MissingFile, where + ": missing tensor file " + path.string());
  }
  const auto size = fs::file_size(path);
  const std::size_t n = shape_numel(declared);
  if (size != 4 * n) {
    fail(ErrorKind::ShapeMismatch, where + ": " + path.filename().string() + " holds " +
                                       std::to_string(size) + " bytes, expected " +
                                       std::to_string(4 * n) + " for shape " +
                                       shape_to_string(declared));
  }
  const auto raw = read_tensor_file(path);
  std::vector<double> values(raw.begin(), raw.end());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      fail(ErrorKind::NonFiniteValue, where + ": non-finite value at index " +
                                          std::to_string(i) + " of " +
                                          path.filename().string());
    }
  }
  return Tensor(declared, std::move(values));
}

json spec_hyperparameters(const LayerSpec& spec) {
  json hp = json::object();
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Conv>) {
          hp["out_channels"] = s.out_channels;
          hp["kernel"] = s.kernel;
          hp["stride"] = s.stride;
          hp["padding"] = s.padding;
          hp["relu"] = s.relu;
          if (s.dropout) hp["dropout"] = *s.dropout;
        } else if constexpr (std::is_same_v<T, MaxPool>) {
          hp["kernel"] = s.kernel;
          hp["stride"] = s.stride;
        } else if constexpr (std::is_same_v<T, FullyConnected>) {
          hp["out_features"] = s.out_features;
          hp["relu"] = s.relu;
          if (s.dropout) hp["dropout"] = *s.dropout;
        } else if constexpr (std::is_same_v<T, Dropout>) {
          hp["rate"] = s.rate;
        }
      },
      spec);
  return hp;
}

}  // namespace

std::vector<float> read_tensor_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::MissingFile, "cannot open " + path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() % 4 != 0) {
    fail(ErrorKind::ShapeMismatch,
         path.string() + ": size " + std::to_string(bytes.size()) + " is not a multiple of 4");
  }
  std::vector<float> out(bytes.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint32_t u;
    std::memcpy(&u, bytes.data() + 4 * i, 4);
    out[i] = std::bit_cast<float>(to_little(u));
  }
  return out;
}

void write_tensor_file(const fs::path& path, std::span<const double> values) {
  std::vector<char> bytes(values.size() * 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::uint32_t u = to_little(std::bit_cast<std::uint32_t>(static_cast<float>(values[i])));
    std::memcpy(bytes.data() + 4 * i, &u, 4);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

NetworkModel load_model(const fs::path& manifest_path) {
  if (!fs::is_regular_file(manifest_path)) {
    fail(ErrorKind::MissingFile, "manifest not found: " + manifest_path.string());
  }
  json doc;
  {
    std::ifstream in(manifest_path);
    if (!in) fail(ErrorKind::MissingFile, "cannot open " + manifest_path.string());
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      format_error(manifest_path.string() + ": " + e.what());
    }
  }
  if (!doc.is_object()) format_error("manifest must be a JSON object");
  allow_only(doc, {"format_version", "input_shape", "layers"}, "manifest");

  const json& version = require(doc, "format_version", "manifest");
  if (!version.is_number_integer()) format_error("format_version must be an integer");
  if (version.get<std::int64_t>() != kFormatVersion) {
    fail(ErrorKind::UnsupportedVersion,
         "unsupported format_version " + version.dump() + " (expected 1)");
  }

  const auto in_dims = parse_shape(require(doc, "input_shape", "manifest"), "input_shape");
  if (in_dims.size() != 3) format_error("input_shape must have three entries (c, h, w)");
  const Shape3 input{in_dims[0], in_dims[1], in_dims[2]};

  const json& entries = require(doc, "layers", "manifest");
  if (!entries.is_array() || entries.empty()) format_error("layers must be a non-empty array");

  const fs::path base = manifest_path.parent_path();
  std::vector<Layer> layers;
  Shape3 shape = input;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const json& e = entries[i];
    std::string where = "layer " + std::to_string(i);
    if (!e.is_object()) format_error(where + " must be an object");
    allow_only(e, {"kind", "hyperparameters", "weight_file", "bias_file", "shape"}, where);
    const json& kind = require(e, "kind", where);
    if (!kind.is_string()) format_error(where + ": \"kind\" must be a string");
    const json empty = json::object();
    const json& hp = e.contains("hyperparameters") ? e["hyperparameters"] : empty;
    Layer layer{parse_spec(kind.get<std::string>(), hp, where), {}, {}};
    where += " (" + layer_name(layer.spec) + ")";

    Shape3 next;
    try {
      next = output_shape(layer.spec, shape);
    } catch (const Error& err) {
      fail(ErrorKind::ShapeMismatch, where + ": " + err.what());
    }

    const json& shapes = e.contains("shape") ? e["shape"] : empty;
    allow_only(shapes, {"weight", "bias"}, where + " shape");
    if (has_parameters(layer.spec)) {
      const auto wshape = expected_weight_shape(layer.spec, shape);
      layer.weight = load_tensor(base, e, "weight_file", shapes, "weight", wshape, where);
      if (e.contains("bias_file")) {
        layer.bias = load_tensor(base, e, "bias_file", shapes, "bias", {wshape[0]}, where);
      } else if (shapes.contains("bias")) {
        format_error(where + ": bias shape declared without bias_file");
      }
    } else if (e.contains("weight_file") || e.contains("bias_file") || !shapes.empty()) {
      format_error(where + ": layer kind \"" + layer_kind(layer.spec) + "\" takes no tensors");
    }
    layers.push_back(std::move(layer));
    shape = next;
  }
  try {
    return NetworkModel(input, std::move(layers));
  } catch (const ModelIoError&) {
    throw;
  } catch (const Error& err) {
    ErrorKind kind = err.kind();
    if (kind == ErrorKind::InvalidArgument) kind = ErrorKind::ManifestFormat;
    fail(kind, err.what());
  }
}

fs::path save_model(const NetworkModel& model, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());

  json doc;
  doc["format_version"] = kFormatVersion;
  const Shape3& in = model.input_shape();
  doc["input_shape"] = {in.c, in.h, in.w};
  json entries = json::array();
  const auto layers = model.layers();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const Layer& layer = layers[i];
    json e;
    e["kind"] = layer_kind(layer.spec);
    e["hyperparameters"] = spec_hyperparameters(layer.spec);
    json shapes = json::object();
    const std::string prefix = "layer_" + std::to_string(i) + "_";
    if (!layer.weight.empty()) {
      e["weight_file"] = prefix + "weight.bin";
      shapes["weight"] = layer.weight.shape();
      write_tensor_file(dir / (prefix + "weight.bin"), layer.weight.data());
    }
    if (!layer.bias.empty()) {
      e["bias_file"] = prefix + "bias.bin";
      shapes["bias"] = layer.bias.shape();
      write_tensor_file(dir / (prefix + "bias.bin"), layer.bias.data());
    }
    e["shape"] = shapes;
    entries.push_back(std::move(e));
  }
  doc["layers"] = std::move(entries);

  const fs::path manifest = dir / "manifest.json";
  std::ofstream out(manifest, std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write " + manifest.string());
  out << doc.dump(2) << '\n';
  if (!out) fail(ErrorKind::Io, "write failed for " + manifest.string());
  return manifest;
}

std::vector<LayerSpec> reference_layer_specs() {
  const FullyConnected hidden{4096, true, 0.5};
  return {
      Conv{96, 7, 2, 2, true, {}},
      MaxPool{3, 2},
      Conv{128, 5, 1, 2, true, {}},
      MaxPool{3, 2},
      Conv{192, 3, 1, 1, true, {}},
      Conv{192, 3, 1, 1, true, {}},
      Conv{128, 3, 1, 1, true, {}},
      MaxPool{3, 2},
      Flatten{},
      hidden,
      hidden,
      FullyConnected{6, false, {}},
  };
}

std::vector<Shape3> reference_shapes(const Shape3& input) {
  if (input.c != 3) {
    throw InvalidArgument("reference architecture needs 3 input channels, got " +
                          std::to_string(input.c));
  }
  std::vector<Shape3> shapes{input};
  for (const auto& spec : reference_layer_specs()) {
    try {
      shapes.push_back(output_shape(spec, shapes.back()));
    } catch (const Error& e) {
      throw InvalidArgument("input " + to_string(input) + " is too small for " +
                            layer_name(spec) + ": " + e.what());
    }
  }
  return shapes;
}

NetworkModel build_reference_architecture(const Shape3& input, std::uint64_t seed) {
  reference_shapes(input);
  return random_model(input, reference_layer_specs(), seed);
}

}  // namespace rotsense::netio
