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

#include "rotsense/lipnet.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "rotsense/errors.hpp"

namespace rotsense::lipnet {

std::string_view to_string(Subnet s) {
  switch (s) {
    case Subnet::Full: return "full";
    case Subnet::Position: return "position";
    case Subnet::Rotation: return "rotation";
  }
  return "unknown";
}

double max_pool_bound(const MaxPool& spec) {
  const std::size_t per_axis = (spec.kernel + spec.stride - 1) / spec.stride;
  return std::sqrt(static_cast<double>(per_axis * per_axis));
}

LayerBound layer_lipschitz_bound(const Layer& layer, const Shape3& input, std::size_t index,
                                 double tol, std::size_t max_iterations) {
  LayerBound out;
  out.index = index;
  out.layer = layer_name(layer.spec);
  try {
    if (const auto* conv = std::get_if<Conv>(&layer.spec)) {
      const SpectralNorm sn = spectral_norm_conv(*conv, layer.weight.data(), input, tol,
                                                 NormMethod::Lanczos, max_iterations);
      out.bound = sn.bound;
      out.iterations = sn.iterations;
      out.method = "lanczos-conv";
    } else if (const auto* fc = std::get_if<FullyConnected>(&layer.spec)) {
      const SpectralNorm sn =
          spectral_norm_dense(layer.weight.data(), fc->out_features, input.numel(), tol,
                              NormMethod::Lanczos, max_iterations);
      out.bound = sn.bound;
      out.iterations = sn.iterations;
      out.method = "lanczos-dense";
    } else if (const auto* pool = std::get_if<MaxPool>(&layer.spec)) {
      out.bound = max_pool_bound(*pool);
      out.method = "maxpool-window-overlap";
    } else if (std::holds_alternative<ReLU>(layer.spec)) {
      out.bound = 1.0;
      out.method = "relu-nonexpansive";
    } else if (std::holds_alternative<Flatten>(layer.spec)) {
      out.bound = 1.0;
      out.method = "flatten-isometry";
    } else if (std::holds_alternative<Dropout>(layer.spec)) {
      out.bound = 1.0;
      out.method = "dropout-identity";
    } else {
      throw InvalidArgument("unknown layer kind");
    }
  } catch (const ConvergenceFailure& e) {
    throw ConvergenceFailure("layer " + std::to_string(index) + " (" + out.layer + "): " +
                                 e.what(),
                             e.best_estimate(), e.iterations(), static_cast<long>(index));
  }
  return out;
}

LipschitzReport network_euclidean_bound(const NetworkModel& model, double tol, unsigned jobs,
                                        Subnet label) {
  const auto layers = model.layers();
  LipschitzReport report;
  report.subnet = label;
  report.tol = tol;
  report.per_layer.resize(layers.size());

  const unsigned workers =
      std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(layers.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < layers.size(); ++i) {
      report.per_layer[i] = layer_lipschitz_bound(layers[i], model.shapes()[i], i, tol);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::size_t failed_index = layers.size();
    std::mutex mu;
    {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          for (std::size_t i = next++; i < layers.size(); i = next++) {
            try {
              report.per_layer[i] = layer_lipschitz_bound(layers[i], model.shapes()[i], i, tol);
            } catch (...) {
              std::lock_guard lock(mu);
              // Report the lowest failing layer, as the serial path would.
              if (i < failed_index) {
                failed_index = i;
                failure = std::current_exception();
              }
            }
          }
        });
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  report.product_bound = 1.0;
  for (const auto& lb : report.per_layer) report.product_bound *= lb.bound;
  return report;
}

std::pair<NetworkModel, NetworkModel> split_pose_head(const NetworkModel& model) {
  const auto layers = model.layers();
  if (layers.empty()) throw InvalidArgument("model has no layers");
  const Layer& last = layers.back();
  const auto* fc = std::get_if<FullyConnected>(&last.spec);
  if (fc == nullptr || fc->out_features != 6) {
    throw InvalidArgument("final layer must be a fully-connected layer with 6 outputs");
  }
  const std::size_t cols = model.shapes()[layers.size() - 1].numel();
  const auto w = last.weight.data();
  const auto b = last.bias.data();

  auto head = [&](std::size_t first_row) {
    std::vector<Layer> copy(layers.begin(), layers.end() - 1);
    FullyConnected spec = *fc;
    spec.out_features = 3;
    std::vector<double> rows(w.begin() + static_cast<long>(first_row * cols),
                             w.begin() + static_cast<long>((first_row + 3) * cols));
    Layer out{spec, Tensor({3, cols}, std::move(rows)), {}};
    if (!b.empty()) {
      out.bias = Tensor({3}, std::vector<double>(b.begin() + static_cast<long>(first_row),
                                                 b.begin() + static_cast<long>(first_row + 3)));
    }
    copy.push_back(std::move(out));
    return NetworkModel(model.input_shape(), std::move(copy));
  };
  return {head(0), head(3)};
}

PoseHeadReports pose_head_bounds(const NetworkModel& model, double tol, unsigned jobs) {
  auto [position, rotation] = split_pose_head(model);
  PoseHeadReports out;
  out.full = network_euclidean_bound(model, tol, jobs, Subnet::Full);

  const std::size_t last = model.layers().size() - 1;
  const Shape3& head_input = model.shapes()[last];
  auto derive = [&](const NetworkModel& sub, Subnet label) {
    LipschitzReport r = out.full;
    r.subnet = label;
    r.per_layer[last] = layer_lipschitz_bound(sub.layers()[last], head_input, last, tol);
    r.product_bound = 1.0;
    for (const auto& lb : r.per_layer) r.product_bound *= lb.bound;
    return r;
  };
  out.position = derive(position, Subnet::Position);
  out.rotation = derive(rotation, Subnet::Rotation);
  return out;
}

RotationalBound rotational_bound(double euclidean_bound, drc::Parameterization p) {
  if (!(euclidean_bound >= 0.0) || !std::isfinite(euclidean_bound)) {
    throw InvalidArgument("Euclidean Lipschitz bound must be finite and non-negative");
  }
  const double mu = drc::analytic_mu(p);
  if (!std::isfinite(mu)) {
    throw UnboundedConstant("the distance ratio constant of " + std::string(drc::to_string(p)) +
                            " is infinite; no rotational bound exists");
  }
  RotationalBound rb;
  rb.parameterization = p;
  rb.euclidean_bound = euclidean_bound;
  rb.mu = mu;
  rb.rotational_bound = mu * euclidean_bound;
  return rb;
}

PerturbationBound perturbation_bound(double epsilon, double euclidean_bound,
                                     drc::Parameterization p) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw InvalidArgument("epsilon must be finite and non-negative");
  }
  const RotationalBound rb = rotational_bound(euclidean_bound, p);
  PerturbationBound out;
  out.radians = epsilon * rb.mu * rb.euclidean_bound;
  out.useful = out.radians < rotkit::kPi;
  return out;
}

InversePerturbation inverse_perturbation(double target_radians, double euclidean_bound,
                                         drc::Parameterization p) {
  if (!(target_radians > 0.0 && target_radians <= rotkit::kPi)) {
    throw InvalidArgument("target must lie in (0, pi]");
  }
  const RotationalBound rb = rotational_bound(euclidean_bound, p);
  InversePerturbation out;
  if (rb.euclidean_bound == 0.0) {
    out.unbounded_radius = true;
    return out;
  }
  out.epsilon = target_radians / (rb.mu * rb.euclidean_bound);
  return out;
}

}  // namespace rotsense::lipnet
