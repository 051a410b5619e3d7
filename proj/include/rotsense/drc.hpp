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

// Distance ratio constants: the supremum over parameter pairs of rotational
// distance divided by Euclidean parameter distance, computed analytically,
// through planar reductions, and by Monte Carlo sampling.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rotsense/rotkit.hpp"

namespace rotsense::drc {

enum class Parameterization {
  ExpCoords,               // s in the ball of radius pi
  ExpCoordsUnconstrained,  // s anywhere in R^3
  Quaternion,              // q on S^3
  QuaternionUnconstrained, // q anywhere in R^4 \ {0}, normalized
};

inline constexpr std::array<Parameterization, 4> kAllParameterizations = {
    Parameterization::ExpCoords, Parameterization::ExpCoordsUnconstrained,
    Parameterization::Quaternion, Parameterization::QuaternionUnconstrained};

std::string_view to_string(Parameterization p);
/// Accepts the canonical names from to_string plus a few aliases
/// ("exp", "exp-unconstrained", "quat", ...).
Parameterization parse_parameterization(std::string_view name);
std::size_t parameter_dim(Parameterization p);

/// Pairs closer than this in Euclidean distance are rejected.
inline constexpr double kDegenerateThreshold = 1e-12;

/// Closed-form constant; +infinity for unconstrained quaternions.
double analytic_mu(Parameterization p);

/// dist(p1, p2) / |p2 - p1| under the parameterization's distance.
double ratio(std::span<const double> p1, std::span<const double> p2,
             Parameterization p);

/// Two exponential coordinate vectors reduced to the plane they span:
/// magnitudes theta1, theta2 and t = (1 - e1.e2)/2.
class PlanarExpPair {
 public:
  static PlanarExpPair make(double theta1, double theta2, double t);

  double theta1() const noexcept { return theta1_; }
  double theta2() const noexcept { return theta2_; }
  double t() const noexcept { return t_; }

 private:
  PlanarExpPair(double a, double b, double t) : theta1_(a), theta2_(b), t_(t) {}
  double theta1_, theta2_, t_;
};

/// Euclidean distance between two unit quaternions, c in (0, 2].
class ChordParam {
 public:
  static ChordParam make(double c);
  double value() const noexcept { return c_; }

 private:
  explicit ChordParam(double c) : c_(c) {}
  double c_;
};

/// sqrt((theta1 - theta2)^2 + 4 theta1 theta2 t)
double planar_exp_euclidean(const PlanarExpPair& pp);
/// 2 acos|t cos(A + B) + (1 - t) cos(A - B)| with A, B the half angles.
double planar_exp_distance(const PlanarExpPair& pp);
double planar_ratio_exp(const PlanarExpPair& pp);
/// 4 asin(c/2)/c below sqrt(2), (2 pi - 4 asin(c/2))/c above.
double planar_ratio_quat(const ChordParam& c);

struct ParameterPair {
  std::vector<double> p1;
  std::vector<double> p2;
};

struct MonteCarloOptions {
  unsigned jobs = 1;
  /// Unconstrained exp coords: probability that each sampled vector has its
  /// angle shifted by 2*pi*n, n in {1, 2}.
  double shift_fraction = 0.5;
  /// Unconstrained quaternions only: raw samples are scaled into
  /// [scale_floor, 1]. Without it the sampled supremum is meaningless.
  std::optional<double> scale_floor;
  bool inject_achievers = true;
};

struct DrcEstimate {
  Parameterization parameterization{};
  std::uint64_t samples = 0;  // random pairs drawn
  std::uint64_t injected = 0; // analytic maximizers appended
  std::uint64_t rejected = 0; // degenerate pairs skipped
  std::uint64_t shifted = 0;  // vectors moved outside the pi-ball
  double sup_ratio = 0.0;
  ParameterPair argmax_pair;
  std::uint64_t argmax_index = 0;  // >= samples means an injected pair
  double sup_sampled = 0.0;        // best over random pairs only
  double sup_injected = 0.0;       // best over injected pairs only
  std::uint64_t rng_seed = 0;
  double analytic_mu = 0.0;
};

/// The index-th random pair of the sampling scheme (pure in seed, index).
ParameterPair sample_pair(Parameterization p, std::uint64_t seed,
                          std::uint64_t index, const MonteCarloOptions& opts = {});

/// Known maximizers of the ratio for the parameterization.
std::vector<ParameterPair> achiever_pairs(Parameterization p,
                                          const MonteCarloOptions& opts = {});

/// Running supremum of ratio() over n sampled pairs plus injected achievers.
/// The result does not depend on opts.jobs.
DrcEstimate monte_carlo_sup(Parameterization p, std::uint64_t n,
                            std::uint64_t seed, const MonteCarloOptions& opts = {});

struct PlanarSupResult {
  double value = 0.0;
  /// (theta1, theta2, t) for exp coords, (c) for quaternions.
  std::vector<double> arg;
  double grid_step = 0.0;
  std::uint64_t evaluations = 0;
};

/// Grid search plus one golden-section refinement pass around the best cell.
/// Exp coords search theta in [0, pi] (constrained) or [0, 2 pi]
/// (unconstrained) with grid_resolution points per axis including both ends;
/// quaternions search c = 2 i / grid_resolution, i = 1..grid_resolution.
PlanarSupResult planar_sup_search(Parameterization p, std::size_t grid_resolution);

struct DivergenceRow {
  double epsilon;
  double numerator;    // rotational or normalized-Euclidean distance
  double denominator;  // Euclidean distance of the scaled inputs
  double ratio;
};

/// ratio(eps q1, eps q2) for unconstrained quaternions at each eps.
std::vector<DivergenceRow> divergence_demo(const rotkit::RawQuaternion& q1,
                                           const rotkit::RawQuaternion& q2,
                                           std::span<const double> eps_list);

/// |f(eps u2) - f(eps u1)| / |eps u2 - eps u1| with f the unit normalization.
std::vector<DivergenceRow> unit_norm_divergence_demo(const rotkit::Vec4& u1,
                                                     const rotkit::Vec4& u2,
                                                     std::span<const double> eps_list);

}  // namespace rotsense::drc
