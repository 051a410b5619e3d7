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

#pragma once

// Feedforward network description and inference.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rotsense/tensor.hpp"

namespace rotsense::lipnet {

/// Square-kernel convolution with zero padding. Weight [out, in, k, k],
/// optional bias [out]. `relu` and `dropout` fold the activation and the
/// inference-time identity that follow the layer into the same entry.
struct Conv {
  std::size_t out_channels = 0;
  std::size_t kernel = 1;
  std::size_t stride = 1;
  std::size_t padding = 0;
  bool relu = false;
  std::optional<double> dropout;
};

/// Square max pooling without padding; output size floor((n - k)/s) + 1.
struct MaxPool {
  std::size_t kernel = 1;
  std::size_t stride = 1;
};

struct Flatten {};

/// Dense layer on the flattened input. Weight [out, in], optional bias [out].
struct FullyConnected {
  std::size_t out_features = 0;
  bool relu = false;
  std::optional<double> dropout;
};

struct ReLU {};

/// Identity at inference.
struct Dropout {
  double rate = 0.5;
};

using LayerSpec = std::variant<Conv, MaxPool, Flatten, FullyConnected, ReLU, Dropout>;

/// Short name such as "conv-96-7-2-2", "maxpool-3-2" or "fc-6".
std::string layer_name(const LayerSpec& spec);
std::string layer_kind(const LayerSpec& spec);
bool has_parameters(const LayerSpec& spec);

/// Output shape of the layer, or an error if the input does not fit.
Shape3 output_shape(const LayerSpec& spec, const Shape3& input);

/// Expected weight shape for a parameterized layer given its input shape.
std::vector<std::size_t> expected_weight_shape(const LayerSpec& spec, const Shape3& input);

struct Layer {
  LayerSpec spec;
  Tensor weight;  // empty for parameter-free layers
  Tensor bias;    // optional
};

class NetworkModel {
 public:
  /// Validates kinds, hyperparameters, shape flow, weight shapes and
  /// finiteness.
  NetworkModel(Shape3 input_shape, std::vector<Layer> layers);

  const Shape3& input_shape() const noexcept { return input_shape_; }
  std::span<const Layer> layers() const noexcept { return layers_; }
  /// shapes()[i] is the input shape of layer i; shapes().back() the output.
  const std::vector<Shape3>& shapes() const noexcept { return shapes_; }
  std::size_t output_size() const noexcept { return shapes_.back().numel(); }

 private:
  Shape3 input_shape_;
  std::vector<Layer> layers_;
  std::vector<Shape3> shapes_;
};

/// Inference pass; dropout acts as the identity.
std::vector<double> forward(const NetworkModel& model, std::span<const double> x);

/// Applies a single layer (bias included).
std::vector<double> apply_layer(const Layer& layer, const Shape3& input,
                                std::span<const double> x);

/// Convolution without bias and its adjoint (transposed convolution).
void conv2d(const Conv& spec, std::span<const double> weight, const Shape3& input,
            std::span<const double> x, std::span<double> y);
void conv2d_adjoint(const Conv& spec, std::span<const double> weight,
                    const Shape3& input, std::span<const double> y, std::span<double> x);

void max_pool(const MaxPool& spec, const Shape3& input, std::span<const double> x,
              std::span<double> y);

/// Builds a model with seeded Gaussian weights, N(0, 2/fan_in), rounded to
/// single precision so that the model survives a float32 round trip exactly.
/// Biases are N(0, 0.01^2).
NetworkModel random_model(const Shape3& input_shape, const std::vector<LayerSpec>& specs,
                          std::uint64_t seed);

}  // namespace rotsense::lipnet
