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

// Model files: a JSON manifest next to one raw little-endian float32 file
// per tensor (row-major, no header).
//
//   {
//     "format_version": 1,
//     "input_shape": [c, h, w],
//     "layers": [
//       {"kind": "conv",
//        "hyperparameters": {"out_channels": 96, "kernel": 7, "stride": 2,
//                            "padding": 2, "relu": true},
//        "weight_file": "layer_0_weight.bin", "bias_file": "layer_0_bias.bin",
//        "shape": {"weight": [96, 3, 7, 7], "bias": [96]}},
//       {"kind": "maxpool", "hyperparameters": {"kernel": 3, "stride": 2}, "shape": {}},
//       ...
//     ]
//   }
//
// Kinds: conv, maxpool, flatten, fc, relu, dropout. conv and fc accept an
// optional "dropout" rate alongside "relu". Tensor paths are relative to
// the manifest directory.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "rotsense/network.hpp"

namespace rotsense::netio {

inline constexpr int kFormatVersion = 1;

/// Throws ModelIoError with a kind of MissingFile, ShapeMismatch,
/// NonFiniteValue, UnknownLayerKind, UnsupportedVersion or ManifestFormat.
lipnet::NetworkModel load_model(const std::filesystem::path& manifest_path);

/// Writes manifest.json and layer_<i>_<weight|bias>.bin into dir (created if
/// needed) and returns the manifest path. Values are stored as float32.
std::filesystem::path save_model(const lipnet::NetworkModel& model,
                                 const std::filesystem::path& dir);

std::vector<float> read_tensor_file(const std::filesystem::path& path);
void write_tensor_file(const std::filesystem::path& path, std::span<const double> values);

/// conv-96-7-2-2, maxpool-3-2, conv-128-5-1-2, maxpool-3-2, conv-192-3-1-1,
/// conv-192-3-1-1, conv-128-3-1-1, maxpool-3-2, flatten, FC^D-4096,
/// FC^D-4096, FC-6. Convolutions and the hidden FC layers carry a ReLU, the
/// hidden FC layers dropout 0.5.
std::vector<lipnet::LayerSpec> reference_layer_specs();

/// Activation shapes through the reference stack (input first). Throws
/// InvalidArgument if the input is not 3 channels or is too small.
std::vector<lipnet::Shape3> reference_shapes(const lipnet::Shape3& input);

lipnet::NetworkModel build_reference_architecture(const lipnet::Shape3& input,
                                                  std::uint64_t seed);

}  // namespace rotsense::netio
