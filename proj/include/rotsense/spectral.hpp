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

// Largest singular value of a linear operator, by power iteration or by
// Lanczos iteration on A^T A. Both start from the same fixed vector (all
// ones plus a seeded perturbation) and are deterministic.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "rotsense/network.hpp"

namespace rotsense::lipnet {

inline constexpr double kDefaultTol = 1e-9;
inline constexpr std::size_t kMaxPowerIterations = 10000;
/// Krylov basis size before Lanczos restarts from its best Ritz vector.
inline constexpr std::size_t kLanczosRestart = 256;

enum class NormMethod { Lanczos, PowerIteration };

struct SpectralNorm {
  double sigma = 0.0;        // estimate |A v| for the final unit iterate v
  double bound = 0.0;        // sigma * (1 + tol)
  double certificate = 0.0;  // |A v| / |v| recomputed for the returned witness
  std::size_t iterations = 0;  // applications of A^T A
  std::vector<double> witness;  // unit right singular vector estimate
};

using LinearMap = std::function<void(std::span<const double>, std::span<double>)>;

/// Power iteration until the relative change of the estimate drops below
/// tol. If the start lies in the null space of A^T A fixed fallback
/// directions are tried. Throws
/// ConvergenceFailure (carrying the best estimate) after max_iterations.
SpectralNorm power_iteration(const LinearMap& apply, const LinearMap& adjoint,
                             std::size_t in_dim, std::size_t out_dim, double tol,
                             std::size_t max_iterations = kMaxPowerIterations);

/// Lanczos with full reorthogonalization, restarted every kLanczosRestart
/// steps. Stops once the Ritz residual |A^T A x - theta x| <= tol * theta,
/// which puts an eigenvalue of A^T A within tol * theta of theta. sigma is
/// |A x| for the returned unit Ritz vector x.
SpectralNorm lanczos(const LinearMap& apply, const LinearMap& adjoint, std::size_t in_dim,
                     std::size_t out_dim, double tol,
                     std::size_t max_iterations = kMaxPowerIterations);

SpectralNorm operator_norm(const LinearMap& apply, const LinearMap& adjoint,
                           std::size_t in_dim, std::size_t out_dim, double tol,
                           NormMethod method, std::size_t max_iterations = kMaxPowerIterations);

SpectralNorm spectral_norm_dense(const Eigen::MatrixXd& w, double tol = kDefaultTol,
                                 NormMethod method = NormMethod::Lanczos,
                                 std::size_t max_iterations = kMaxPowerIterations);

/// Row-major [rows, cols] view of a fully-connected weight tensor.
SpectralNorm spectral_norm_dense(std::span<const double> w, std::size_t rows,
                                 std::size_t cols, double tol = kDefaultTol,
                                 NormMethod method = NormMethod::Lanczos,
                                 std::size_t max_iterations = kMaxPowerIterations);

/// Operator norm of x -> conv(x) (strided, zero padded, no bias) on the given
/// input shape.
SpectralNorm spectral_norm_conv(const Conv& spec, std::span<const double> weight,
                                const Shape3& input, double tol = kDefaultTol,
                                NormMethod method = NormMethod::Lanczos,
                                std::size_t max_iterations = kMaxPowerIterations);

}  // namespace rotsense::lipnet
