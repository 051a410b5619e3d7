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

// Euclidean Lipschitz bounds of feedforward networks as products of
// per-layer bounds, pose-head splitting, and the rotational bounds that
// follow from multiplying by a distance ratio constant.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rotsense/drc.hpp"
#include "rotsense/network.hpp"
#include "rotsense/spectral.hpp"

namespace rotsense::lipnet {

struct LayerBound {
  std::size_t index = 0;
  std::string layer;   // e.g. "conv-96-7-2-2"
  double bound = 0.0;  // certified per-layer Lipschitz bound
  std::string method;
  std::size_t iterations = 0;  // power iterations, 0 for closed forms
};

enum class Subnet { Full, Position, Rotation };
std::string_view to_string(Subnet s);

struct LipschitzReport {
  Subnet subnet = Subnet::Full;
  std::vector<LayerBound> per_layer;
  double product_bound = 1.0;
  double tol = kDefaultTol;
};

/// Conv/FC: spectral norm inflated by (1 + tol); biases do not contribute
/// and a fused ReLU or dropout multiplies by 1. ReLU, Flatten, Dropout: 1.
/// MaxPool{k, s}: sqrt(m) with m = ceil(k/s)^2, the most windows any input
/// position can fall into.
/// A ConvergenceFailure is rethrown carrying the layer index.
LayerBound layer_lipschitz_bound(const Layer& layer, const Shape3& input,
                                 std::size_t index, double tol = kDefaultTol,
                                 std::size_t max_iterations = kMaxPowerIterations);

/// sqrt(ceil(k/s)^2)
double max_pool_bound(const MaxPool& spec);

/// Per-layer bounds in order and their product. Layers may be evaluated on
/// up to `jobs` threads; the report does not depend on it.
LipschitzReport network_euclidean_bound(const NetworkModel& model, double tol = kDefaultTol,
                                        unsigned jobs = 1, Subnet label = Subnet::Full);

/// Splits a final FC-6 layer into rows 0-2 (position) and 3-5 (rotation).
std::pair<NetworkModel, NetworkModel> split_pose_head(const NetworkModel& model);

struct PoseHeadReports {
  LipschitzReport full;
  LipschitzReport position;
  LipschitzReport rotation;
};

/// Reports for the full network and both heads, sharing the bounds of the
/// common layers.
PoseHeadReports pose_head_bounds(const NetworkModel& model, double tol = kDefaultTol,
                                 unsigned jobs = 1);

struct RotationalBound {
  drc::Parameterization parameterization{};
  double euclidean_bound = 0.0;   // L_e
  double mu = 0.0;
  double rotational_bound = 0.0;  // mu * L_e
  std::optional<double> epsilon;
  std::optional<double> output_radius;  // epsilon * mu * L_e
  std::optional<bool> useful;           // output_radius < pi
};

/// mu * L_e; throws UnboundedConstant when mu is infinite.
RotationalBound rotational_bound(double euclidean_bound, drc::Parameterization p);

struct PerturbationBound {
  double radians = 0.0;
  bool useful = true;  // false once the bound reaches pi
};

/// Largest rotational change of the output for inputs within epsilon.
PerturbationBound perturbation_bound(double epsilon, double euclidean_bound,
                                     drc::Parameterization p);

struct InversePerturbation {
  std::optional<double> epsilon;  // empty when any radius is admissible
  bool unbounded_radius = false;  // L_e = 0
};

/// Input radius that keeps the output within target radians.
InversePerturbation inverse_perturbation(double target_radians, double euclidean_bound,
                                         drc::Parameterization p);

}  // namespace rotsense::lipnet
