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

#include "rotsense/network.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Core>

#include "rotsense/errors.hpp"
#include "rotsense/rng.hpp"

namespace rotsense::lipnet {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

Error shape_error(const std::string& what) { return Error(ErrorKind::ShapeMismatch, what); }

std::size_t pooled(std::size_t n, std::size_t pad, std::size_t k, std::size_t s) {
  return (n + 2 * pad - k) / s + 1;
}

void check_window(const std::string& name, const Shape3& in, std::size_t pad,
                  std::size_t k) {
  if (in.h + 2 * pad < k || in.w + 2 * pad < k) {
    throw shape_error(name + ": input " + to_string(in) + " is smaller than the kernel");
  }
}

void check_dropout(const std::optional<double>& rate) {
  if (rate && !(*rate >= 0.0 && *rate < 1.0)) {
    throw InvalidArgument("dropout rate must lie in [0, 1)");
  }
}

}  // namespace

std::string layer_kind(const LayerSpec& spec) {
  return std::visit(overloaded{
                        [](const Conv&) { return std::string("conv"); },
                        [](const MaxPool&) { return std::string("maxpool"); },
                        [](const Flatten&) { return std::string("flatten"); },
                        [](const FullyConnected&) { return std::string("fc"); },
                        [](const ReLU&) { return std::string("relu"); },
                        [](const Dropout&) { return std::string("dropout"); },
                    },
                    spec);
}

std::string layer_name(const LayerSpec& spec) {
  auto s = [](std::size_t v) { return std::to_string(v); };
  return std::visit(
      overloaded{
          [&](const Conv& c) {
            return "conv-" + s(c.out_channels) + "-" + s(c.kernel) + "-" + s(c.stride) +
                   "-" + s(c.padding);
          },
          [&](const MaxPool& m) { return "maxpool-" + s(m.kernel) + "-" + s(m.stride); },
          [](const Flatten&) { return std::string("flatten"); },
          [&](const FullyConnected& f) {
            return std::string(f.dropout ? "fcD-" : "fc-") + s(f.out_features);
          },
          [](const ReLU&) { return std::string("relu"); },
          [](const Dropout&) { return std::string("dropout"); },
      },
      spec);
}

bool has_parameters(const LayerSpec& spec) {
  return std::holds_alternative<Conv>(spec) || std::holds_alternative<FullyConnected>(spec);
}

Shape3 output_shape(const LayerSpec& spec, const Shape3& in) {
  return std::visit(
      overloaded{
          [&](const Conv& c) {
            if (c.out_channels < 1 || c.kernel < 1 || c.stride < 1) {
              throw InvalidArgument("conv needs out_channels, kernel, stride >= 1");
            }
            check_dropout(c.dropout);
            check_window(layer_name(spec), in, c.padding, c.kernel);
            return Shape3{c.out_channels, pooled(in.h, c.padding, c.kernel, c.stride),
                          pooled(in.w, c.padding, c.kernel, c.stride)};
          },
          [&](const MaxPool& m) {
            if (m.kernel < 1 || m.stride < 1) {
              throw InvalidArgument("maxpool needs kernel, stride >= 1");
            }
            check_window(layer_name(spec), in, 0, m.kernel);
            return Shape3{in.c, pooled(in.h, 0, m.kernel, m.stride),
                          pooled(in.w, 0, m.kernel, m.stride)};
          },
          [&](const Flatten&) { return Shape3{in.numel(), 1, 1}; },
          [&](const FullyConnected& f) {
            if (f.out_features < 1) throw InvalidArgument("fc needs out_features >= 1");
            check_dropout(f.dropout);
            return Shape3{f.out_features, 1, 1};
          },
          [&](const ReLU&) { return in; },
          [&](const Dropout& d) {
            check_dropout(d.rate);
            return in;
          },
      },
      spec);
}

std::vector<std::size_t> expected_weight_shape(const LayerSpec& spec, const Shape3& in) {
  if (const auto* c = std::get_if<Conv>(&spec)) {
    return {c->out_channels, in.c, c->kernel, c->kernel};
  }
  if (const auto* f = std::get_if<FullyConnected>(&spec)) {
    return {f->out_features, in.numel()};
  }
  return {};
}

NetworkModel::NetworkModel(Shape3 input_shape, std::vector<Layer> layers)
    : input_shape_(input_shape), layers_(std::move(layers)) {
  if (input_shape_.numel() == 0) throw shape_error("input shape has a zero dimension");
  shapes_.reserve(layers_.size() + 1);
  shapes_.push_back(input_shape_);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const Layer& layer = layers_[i];
    const std::string where = "layer " + std::to_string(i) + " (" + layer_name(layer.spec) + ")";
    const Shape3& in = shapes_.back();
    Shape3 out;
    try {
      out = output_shape(layer.spec, in);
    } catch (const Error& e) {
      throw Error(e.kind(), where + ": " + e.what());
    }
    if (has_parameters(layer.spec)) {
      const auto want = expected_weight_shape(layer.spec, in);
      if (layer.weight.shape() != want) {
        throw shape_error(where + ": weight shape " + shape_to_string(layer.weight.shape()) +
                          " does not match expected " + shape_to_string(want));
      }
      if (!layer.bias.empty() &&
          layer.bias.shape() != std::vector<std::size_t>{want.front()}) {
        throw shape_error(where + ": bias shape " + shape_to_string(layer.bias.shape()) +
                          " does not match [" + std::to_string(want.front()) + "]");
      }
    } else if (!layer.weight.empty() || !layer.bias.empty()) {
      throw shape_error(where + ": layer kind takes no parameters");
    }
    for (const Tensor* t : {&layer.weight, &layer.bias}) {
      const auto d = t->data();
      if (!std::all_of(d.begin(), d.end(), [](double v) { return std::isfinite(v); })) {
        throw Error(ErrorKind::NonFiniteValue, where + ": non-finite parameter values");
      }
    }
    shapes_.push_back(out);
  }
}

void conv2d(const Conv& spec, std::span<const double> weight, const Shape3& in,
            std::span<const double> x, std::span<double> y) {
  const std::size_t k = spec.kernel, s = spec.stride;
  const long p = static_cast<long>(spec.padding);
  const std::size_t oh = pooled(in.h, spec.padding, k, s);
  const std::size_t ow = pooled(in.w, spec.padding, k, s);
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t o = 0; o < spec.out_channels; ++o) {
    double* out = y.data() + o * oh * ow;
    for (std::size_t c = 0; c < in.c; ++c) {
      const double* img = x.data() + c * in.h * in.w;
      const double* ker = weight.data() + (o * in.c + c) * k * k;
      for (std::size_t ki = 0; ki < k; ++ki) {
        for (std::size_t kj = 0; kj < k; ++kj) {
          const double wv = ker[ki * k + kj];
          if (wv == 0.0) continue;
          for (std::size_t oi = 0; oi < oh; ++oi) {
            const long r = static_cast<long>(oi * s + ki) - p;
            if (r < 0 || r >= static_cast<long>(in.h)) continue;
            const double* row = img + r * static_cast<long>(in.w);
            double* orow = out + oi * ow;
            for (std::size_t oj = 0; oj < ow; ++oj) {
              const long col = static_cast<long>(oj * s + kj) - p;
              if (col < 0 || col >= static_cast<long>(in.w)) continue;
              orow[oj] += wv * row[col];
            }
          }
        }
      }
    }
  }
}

void conv2d_adjoint(const Conv& spec, std::span<const double> weight, const Shape3& in,
                    std::span<const double> y, std::span<double> x) {
  const std::size_t k = spec.kernel, s = spec.stride;
  const long p = static_cast<long>(spec.padding);
  const std::size_t oh = pooled(in.h, spec.padding, k, s);
  const std::size_t ow = pooled(in.w, spec.padding, k, s);
  std::fill(x.begin(), x.end(), 0.0);
  for (std::size_t o = 0; o < spec.out_channels; ++o) {
    const double* out = y.data() + o * oh * ow;
    for (std::size_t c = 0; c < in.c; ++c) {
      double* img = x.data() + c * in.h * in.w;
      const double* ker = weight.data() + (o * in.c + c) * k * k;
      for (std::size_t ki = 0; ki < k; ++ki) {
        for (std::size_t kj = 0; kj < k; ++kj) {
          const double wv = ker[ki * k + kj];
          if (wv == 0.0) continue;
          for (std::size_t oi = 0; oi < oh; ++oi) {
            const long r = static_cast<long>(oi * s + ki) - p;
            if (r < 0 || r >= static_cast<long>(in.h)) continue;
            double* row = img + r * static_cast<long>(in.w);
            const double* orow = out + oi * ow;
            for (std::size_t oj = 0; oj < ow; ++oj) {
              const long col = static_cast<long>(oj * s + kj) - p;
              if (col < 0 || col >= static_cast<long>(in.w)) continue;
              row[col] += wv * orow[oj];
            }
          }
        }
      }
    }
  }
}

void max_pool(const MaxPool& spec, const Shape3& in, std::span<const double> x,
              std::span<double> y) {
  const std::size_t oh = pooled(in.h, 0, spec.kernel, spec.stride);
  const std::size_t ow = pooled(in.w, 0, spec.kernel, spec.stride);
  for (std::size_t c = 0; c < in.c; ++c) {
    const double* img = x.data() + c * in.h * in.w;
    for (std::size_t oi = 0; oi < oh; ++oi) {
      for (std::size_t oj = 0; oj < ow; ++oj) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t ki = 0; ki < spec.kernel; ++ki) {
          for (std::size_t kj = 0; kj < spec.kernel; ++kj) {
            best = std::max(best, img[(oi * spec.stride + ki) * in.w + oj * spec.stride + kj]);
          }
        }
        y[(c * oh + oi) * ow + oj] = best;
      }
    }
  }
}

std::vector<double> apply_layer(const Layer& layer, const Shape3& in,
                                std::span<const double> x) {
  const Shape3 out_shape = output_shape(layer.spec, in);
  std::vector<double> y(out_shape.numel());
  auto relu_inplace = [&y] {
    for (double& v : y) v = std::max(v, 0.0);
  };
  std::visit(
      overloaded{
          [&](const Conv& c) {
            conv2d(c, layer.weight.data(), in, x, y);
            if (!layer.bias.empty()) {
              const std::size_t plane = out_shape.h * out_shape.w;
              for (std::size_t o = 0; o < c.out_channels; ++o) {
                for (std::size_t i = 0; i < plane; ++i) y[o * plane + i] += layer.bias[o];
              }
            }
            if (c.relu) relu_inplace();
          },
          [&](const MaxPool& m) { max_pool(m, in, x, y); },
          [&](const Flatten&) { std::copy(x.begin(), x.end(), y.begin()); },
          [&](const FullyConnected& f) {
            using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
            Eigen::Map<const RowMajor> w(layer.weight.data().data(),
                                         static_cast<Eigen::Index>(f.out_features),
                                         static_cast<Eigen::Index>(in.numel()));
            Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
            Eigen::Map<Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
            yv.noalias() = w * xv;
            if (!layer.bias.empty()) {
              for (std::size_t o = 0; o < f.out_features; ++o) y[o] += layer.bias[o];
            }
            if (f.relu) relu_inplace();
          },
          [&](const ReLU&) {
            std::copy(x.begin(), x.end(), y.begin());
            relu_inplace();
          },
          [&](const Dropout&) { std::copy(x.begin(), x.end(), y.begin()); },
      },
      layer.spec);
  return y;
}

std::vector<double> forward(const NetworkModel& model, std::span<const double> x) {
  if (x.size() != model.input_shape().numel()) {
    throw InvalidArgument("input has " + std::to_string(x.size()) + " values, model expects " +
                          std::to_string(model.input_shape().numel()));
  }
  if (!std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); })) {
    throw InvalidArgument("input must be finite");
  }
  std::vector<double> act(x.begin(), x.end());
  for (std::size_t i = 0; i < model.layers().size(); ++i) {
    act = apply_layer(model.layers()[i], model.shapes()[i], act);
  }
  return act;
}

NetworkModel random_model(const Shape3& input_shape, const std::vector<LayerSpec>& specs,
                          std::uint64_t seed) {
  std::vector<Layer> layers;
  layers.reserve(specs.size());
  Shape3 shape = input_shape;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    Layer layer{specs[i], {}, {}};
    if (has_parameters(specs[i])) {
      auto wshape = expected_weight_shape(specs[i], shape);
      const std::size_t out = wshape.front();
      const std::size_t fan_in = shape_numel(wshape) / out;
      CounterRng rng(seed, 2 * i);
      std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / static_cast<double>(fan_in)));
      std::vector<double> w(shape_numel(wshape));
      for (double& v : w) v = static_cast<double>(static_cast<float>(normal(rng)));
      CounterRng brng(seed, 2 * i + 1);
      std::normal_distribution<double> bnormal(0.0, 0.01);
      std::vector<double> b(out);
      for (double& v : b) v = static_cast<double>(static_cast<float>(bnormal(brng)));
      layer.weight = Tensor(std::move(wshape), std::move(w));
      layer.bias = Tensor({out}, std::move(b));
    }
    shape = output_shape(specs[i], shape);
    layers.push_back(std::move(layer));
  }
  return NetworkModel(input_shape, std::move(layers));
}

}  // namespace rotsense::lipnet
