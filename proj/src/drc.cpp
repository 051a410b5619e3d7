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

#include "rotsense/drc.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <thread>

#include "rotsense/errors.hpp"
#include "rotsense/rng.hpp"

namespace rotsense::drc {

using rotkit::kPi;
using rotkit::Vec3;
using rotkit::Vec4;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec3 as_vec3(std::span<const double> p) { return Vec3(p[0], p[1], p[2]); }
Vec4 as_vec4(std::span<const double> p) { return Vec4(p[0], p[1], p[2], p[3]); }

std::vector<double> to_std(const Vec3& v) { return {v[0], v[1], v[2]}; }
std::vector<double> to_std(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }

Vec4 uniform_unit_quaternion(CounterRng& rng) {
  std::normal_distribution<double> normal;
  for (;;) {
    Vec4 g(normal(rng), normal(rng), normal(rng), normal(rng));
    const double n = g.norm();
    if (n > 1e-12) return g / n;
  }
}

struct Best {
  double value = -1.0;
  std::uint64_t index = 0;
  bool found = false;

  void offer(double v, std::uint64_t i) {
    if (!found || v > value || (v == value && i < index)) {
      value = v;
      index = i;
      found = true;
    }
  }
  void merge(const Best& other) {
    if (other.found) offer(other.value, other.index);
  }
};

// Maximizes f on [lo, hi]; returns (argmax, max).
std::pair<double, double> golden_section_max(const std::function<double(double)>& f,
                                             double lo, double hi) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && (b - a) > 1e-15 * std::max(1.0, std::abs(b)); ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  return f1 >= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

}  // namespace

std::string_view to_string(Parameterization p) {
  switch (p) {
    case Parameterization::ExpCoords: return "exp-coords";
    case Parameterization::ExpCoordsUnconstrained: return "exp-coords-unconstrained";
    case Parameterization::Quaternion: return "quaternion";
    case Parameterization::QuaternionUnconstrained: return "quaternion-unconstrained";
  }
  return "unknown";
}

Parameterization parse_parameterization(std::string_view name) {
  if (name == "exp-coords" || name == "exp") return Parameterization::ExpCoords;
  if (name == "exp-coords-unconstrained" || name == "exp-unconstrained" ||
      name == "exp-uncon") {
    return Parameterization::ExpCoordsUnconstrained;
  }
  if (name == "quaternion" || name == "quat") return Parameterization::Quaternion;
  if (name == "quaternion-unconstrained" || name == "quat-unconstrained" ||
      name == "quat-uncon") {
    return Parameterization::QuaternionUnconstrained;
  }
  throw InvalidArgument("unknown parameterization '" + std::string(name) + "'");
}

std::size_t parameter_dim(Parameterization p) {
  return (p == Parameterization::ExpCoords ||
          p == Parameterization::ExpCoordsUnconstrained)
             ? 3
             : 4;
}

double analytic_mu(Parameterization p) {
  switch (p) {
    case Parameterization::ExpCoords:
    case Parameterization::ExpCoordsUnconstrained:
      return 1.0;
    case Parameterization::Quaternion:
      return kPi / std::sqrt(2.0);
    case Parameterization::QuaternionUnconstrained:
      return kInf;
  }
  return kInf;
}

double ratio(std::span<const double> p1, std::span<const double> p2,
             Parameterization p) {
  const std::size_t dim = parameter_dim(p);
  if (p1.size() != dim || p2.size() != dim) {
    throw InvalidArgument("parameter vectors for " + std::string(to_string(p)) +
                          " must have " + std::to_string(dim) + " components");
  }
  double euclid = 0.0;
  double dist = 0.0;
  switch (p) {
    case Parameterization::ExpCoords: {
      const auto s1 = rotkit::ExpCoords::constrained(as_vec3(p1));
      const auto s2 = rotkit::ExpCoords::constrained(as_vec3(p2));
      euclid = (s2.vector() - s1.vector()).norm();
      if (euclid < kDegenerateThreshold) break;
      dist = rotkit::dist_exp(s1, s2);
      break;
    }
    case Parameterization::ExpCoordsUnconstrained: {
      const auto s1 = rotkit::ExpCoords::unconstrained(as_vec3(p1));
      const auto s2 = rotkit::ExpCoords::unconstrained(as_vec3(p2));
      euclid = (s2.vector() - s1.vector()).norm();
      if (euclid < kDegenerateThreshold) break;
      dist = rotkit::dist_exp(s1, s2);
      break;
    }
    case Parameterization::Quaternion: {
      const auto q1 = rotkit::UnitQuaternion::from_vector(as_vec4(p1));
      const auto q2 = rotkit::UnitQuaternion::from_vector(as_vec4(p2));
      euclid = (q2.vector() - q1.vector()).norm();
      if (euclid < kDegenerateThreshold) break;
      dist = rotkit::dist_quat(q1, q2);
      break;
    }
    case Parameterization::QuaternionUnconstrained: {
      const auto q1 = rotkit::RawQuaternion::make(as_vec4(p1));
      const auto q2 = rotkit::RawQuaternion::make(as_vec4(p2));
      euclid = (q2.vector() - q1.vector()).norm();
      if (euclid < kDegenerateThreshold) break;
      dist = rotkit::dist_quat(rotkit::normalize(q1), rotkit::normalize(q2));
      break;
    }
  }
  if (euclid < kDegenerateThreshold) {
    throw DegeneratePair("parameter vectors coincide (Euclidean distance < 1e-12)");
  }
  return dist / euclid;
}

PlanarExpPair PlanarExpPair::make(double theta1, double theta2, double t) {
  if (!(std::isfinite(theta1) && std::isfinite(theta2) && theta1 >= 0 && theta2 >= 0)) {
    throw InvalidArgument("planar angles must be finite and non-negative");
  }
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("t must lie in [0, 1]");
  return PlanarExpPair(theta1, theta2, t);
}

ChordParam ChordParam::make(double c) {
  if (!(c > 0.0 && c <= 2.0)) throw InvalidArgument("chord length must lie in (0, 2]");
  return ChordParam(c);
}

double planar_exp_euclidean(const PlanarExpPair& pp) {
  const double d = pp.theta1() - pp.theta2();
  return std::sqrt(d * d + 4.0 * pp.theta1() * pp.theta2() * pp.t());
}

double planar_exp_distance(const PlanarExpPair& pp) {
  // With a = t cos(A+B) + (1-t) cos(A-B), form 1 - a and 1 + a through
  // half-angle identities so that neither suffers cancellation.
  const double sum_q = 0.25 * (pp.theta1() + pp.theta2());
  const double diff_q = 0.25 * (pp.theta1() - pp.theta2());
  const double t = pp.t();
  const double ss = std::sin(sum_q), sd = std::sin(diff_q);
  const double cs = std::cos(sum_q), cd = std::cos(diff_q);
  const double one_minus = 2.0 * t * ss * ss + 2.0 * (1.0 - t) * sd * sd;
  const double one_plus = 2.0 * t * cs * cs + 2.0 * (1.0 - t) * cd * cd;
  return rotkit::double_cover_angle(one_minus, one_plus);
}

double planar_ratio_exp(const PlanarExpPair& pp) {
  const double euclid = planar_exp_euclidean(pp);
  if (euclid < kDegenerateThreshold) {
    throw DegeneratePair("planar pair describes identical vectors");
  }
  return planar_exp_distance(pp) / euclid;
}

double planar_ratio_quat(const ChordParam& chord) {
  const double c = chord.value();
  const double half_angle = 4.0 * std::asin(0.5 * c);
  if (c <= std::sqrt(2.0)) return half_angle / c;
  return (2.0 * kPi - half_angle) / c;
}

ParameterPair sample_pair(Parameterization p, std::uint64_t seed,
                          std::uint64_t index, const MonteCarloOptions& opts) {
  CounterRng rng(seed, index);
  const Vec4 qa = uniform_unit_quaternion(rng);
  const Vec4 qb = uniform_unit_quaternion(rng);
  switch (p) {
    case Parameterization::Quaternion:
      return {to_std(qa), to_std(qb)};
    case Parameterization::ExpCoords:
      return {to_std(rotkit::quat_to_exp(rotkit::UnitQuaternion::from_vector(qa)).vector()),
              to_std(rotkit::quat_to_exp(rotkit::UnitQuaternion::from_vector(qb)).vector())};
    case Parameterization::ExpCoordsUnconstrained: {
      auto shift = [&](const Vec4& q) {
        Vec3 s = rotkit::quat_to_exp(rotkit::UnitQuaternion::from_vector(q)).vector();
        const double theta = s.norm();
        const bool do_shift = rng.uniform() < opts.shift_fraction;
        const int n = 1 + static_cast<int>(rng() & 1u);
        if (do_shift && theta > 0.0) s *= (theta + 2.0 * kPi * n) / theta;
        return s;
      };
      const Vec3 s1 = shift(qa);
      const Vec3 s2 = shift(qb);
      return {to_std(s1), to_std(s2)};
    }
    case Parameterization::QuaternionUnconstrained: {
      if (!opts.scale_floor || !(*opts.scale_floor > 0.0 && *opts.scale_floor <= 1.0)) {
        throw UnboundedConstant(
            "unconstrained quaternions have an unbounded distance ratio constant; "
            "supply a scale floor in (0, 1] to sample them");
      }
      const double log_floor = std::log(*opts.scale_floor);
      const double sa = std::exp(log_floor * rng.uniform());
      const double sb = std::exp(log_floor * rng.uniform());
      return {to_std(Vec4(qa * sa)), to_std(Vec4(qb * sb))};
    }
  }
  throw InvalidArgument("unknown parameterization");
}

std::vector<ParameterPair> achiever_pairs(Parameterization p,
                                          const MonteCarloOptions& opts) {
  std::vector<ParameterPair> pairs;
  switch (p) {
    case Parameterization::ExpCoords:
    case Parameterization::ExpCoordsUnconstrained: {
      // theta2 = 0 with theta1 in (0, pi]: distance and Euclidean norm agree.
      const Vec3 axes[] = {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ(),
                           Vec3(1, 1, 1).normalized()};
      const double angles[] = {kPi / 3.0, kPi / 2.0, 2.0 * kPi / 3.0, kPi};
      for (const auto& e : axes) {
        for (double theta : angles) {
          pairs.push_back({to_std(Vec3(theta * e)), to_std(Vec3::Zero().eval())});
        }
      }
      break;
    }
    case Parameterization::Quaternion:
    case Parameterization::QuaternionUnconstrained: {
      // Orthogonal unit quaternions: chord sqrt(2), distance pi.
      double scale = 1.0;
      if (p == Parameterization::QuaternionUnconstrained) {
        if (!opts.scale_floor) {
          throw UnboundedConstant("unconstrained quaternions need a scale floor");
        }
        scale = *opts.scale_floor;
      }
      const Vec4 firsts[] = {Vec4(1, 0, 0, 0), Vec4(1, 0, 0, 0), Vec4(0.5, 0.5, 0.5, 0.5)};
      const Vec4 seconds[] = {Vec4(0, 1, 0, 0), Vec4(0, 0, 0, 1), Vec4(0.5, -0.5, 0.5, -0.5)};
      for (int i = 0; i < 3; ++i) {
        pairs.push_back({to_std(Vec4(firsts[i] * scale)), to_std(Vec4(seconds[i] * scale))});
      }
      break;
    }
  }
  return pairs;
}

DrcEstimate monte_carlo_sup(Parameterization p, std::uint64_t n, std::uint64_t seed,
                            const MonteCarloOptions& opts) {
  if (n < 1) throw InvalidArgument("sample count must be at least 1");
  if (p == Parameterization::QuaternionUnconstrained && !opts.scale_floor) {
    throw UnboundedConstant(
        "unconstrained quaternions have an unbounded distance ratio constant; "
        "a sampled supremum is meaningless without a scale floor");
  }

  struct Partial {
    Best best;
    std::uint64_t rejected = 0;
    std::uint64_t shifted = 0;
  };
  auto run_range = [&](std::uint64_t begin, std::uint64_t end) {
    Partial out;
    for (std::uint64_t i = begin; i < end; ++i) {
      const ParameterPair pair = sample_pair(p, seed, i, opts);
      if (p == Parameterization::ExpCoordsUnconstrained) {
        out.shifted += as_vec3(pair.p1).norm() > kPi + 1e-9;
        out.shifted += as_vec3(pair.p2).norm() > kPi + 1e-9;
      }
      try {
        out.best.offer(ratio(pair.p1, pair.p2, p), i);
      } catch (const DegeneratePair&) {
        ++out.rejected;
      }
    }
    return out;
  };

  const unsigned jobs =
      static_cast<unsigned>(std::clamp<std::uint64_t>(opts.jobs == 0 ? 1 : opts.jobs, 1, n));
  std::vector<Partial> partials(jobs);
  if (jobs == 1) {
    partials[0] = run_range(0, n);
  } else {
    std::vector<std::jthread> workers;
    const std::uint64_t chunk = (n + jobs - 1) / jobs;
    for (unsigned j = 0; j < jobs; ++j) {
      const std::uint64_t begin = std::min<std::uint64_t>(n, j * chunk);
      const std::uint64_t end = std::min<std::uint64_t>(n, begin + chunk);
      workers.emplace_back([&, j, begin, end] { partials[j] = run_range(begin, end); });
    }
  }

  DrcEstimate est;
  est.parameterization = p;
  est.samples = n;
  est.rng_seed = seed;
  est.analytic_mu = analytic_mu(p);
  Best sampled;
  for (const auto& part : partials) {
    sampled.merge(part.best);
    est.rejected += part.rejected;
    est.shifted += part.shifted;
  }
  est.sup_sampled = sampled.found ? sampled.value : 0.0;

  Best overall = sampled;
  std::vector<ParameterPair> injected;
  if (opts.inject_achievers) {
    injected = achiever_pairs(p, opts);
    Best inj;
    for (std::size_t k = 0; k < injected.size(); ++k) {
      inj.offer(ratio(injected[k].p1, injected[k].p2, p), n + k);
    }
    est.injected = injected.size();
    est.sup_injected = inj.found ? inj.value : 0.0;
    overall.merge(inj);
  }

  if (overall.found) {
    est.sup_ratio = overall.value;
    est.argmax_index = overall.index;
    est.argmax_pair = overall.index < n ? sample_pair(p, seed, overall.index, opts)
                                        : injected[overall.index - n];
  }
  return est;
}

PlanarSupResult planar_sup_search(Parameterization p, std::size_t grid_resolution) {
  if (grid_resolution < 2) throw InvalidArgument("grid resolution must be at least 2");
  PlanarSupResult result;

  if (p == Parameterization::Quaternion) {
    const double step = 2.0 / static_cast<double>(grid_resolution);
    auto f = [](double c) { return planar_ratio_quat(ChordParam::make(c)); };
    std::size_t best_i = 1;
    double best = -1.0;
    for (std::size_t i = 1; i <= grid_resolution; ++i) {
      const double v = f(step * static_cast<double>(i));
      if (v > best) {
        best = v;
        best_i = i;
      }
    }
    result.evaluations = grid_resolution;
    const double lo = std::max(step * static_cast<double>(best_i - 1), 1e-300);
    const double hi = std::min(2.0, step * static_cast<double>(best_i + 1));
    double arg = step * static_cast<double>(best_i);
    auto [x, fx] = golden_section_max(f, lo, hi);
    if (fx > best) {
      best = fx;
      arg = x;
    }
    result.value = best;
    result.arg = {arg};
    result.grid_step = step;
    return result;
  }

  if (p != Parameterization::ExpCoords && p != Parameterization::ExpCoordsUnconstrained) {
    throw InvalidArgument("planar search is defined only for exp coords and quaternions");
  }

  const double theta_max = p == Parameterization::ExpCoords ? kPi : 2.0 * kPi;
  const double g = static_cast<double>(grid_resolution - 1);
  const double theta_step = theta_max / g;
  const double t_step = 1.0 / g;
  auto f = [](double a, double b, double t) -> std::optional<double> {
    const auto pp = PlanarExpPair::make(a, b, t);
    if (planar_exp_euclidean(pp) < kDegenerateThreshold) return std::nullopt;
    return planar_ratio_exp(pp);
  };

  double best = -1.0;
  std::array<double, 3> arg{0, 0, 0};
  for (std::size_t i = 0; i < grid_resolution; ++i) {
    for (std::size_t j = 0; j < grid_resolution; ++j) {
      for (std::size_t k = 0; k < grid_resolution; ++k) {
        const double a = theta_step * static_cast<double>(i);
        const double b = theta_step * static_cast<double>(j);
        const double t = t_step * static_cast<double>(k);
        ++result.evaluations;
        if (auto v = f(a, b, t); v && *v > best) {
          best = *v;
          arg = {a, b, t};
        }
      }
    }
  }

  // One coordinate-wise golden-section pass within +-1 grid step.
  const std::array<double, 3> steps{theta_step, theta_step, t_step};
  const std::array<double, 3> upper{theta_max, theta_max, 1.0};
  for (int axis = 0; axis < 3; ++axis) {
    const double lo = std::max(0.0, arg[axis] - steps[axis]);
    const double hi = std::min(upper[axis], arg[axis] + steps[axis]);
    auto line = [&](double x) {
      auto probe = arg;
      probe[axis] = x;
      ++result.evaluations;
      return f(probe[0], probe[1], probe[2]).value_or(-1.0);
    };
    auto [x, fx] = golden_section_max(line, lo, hi);
    if (fx > best) {
      best = fx;
      arg[axis] = x;
    }
  }
  result.value = best;
  result.arg = {arg[0], arg[1], arg[2]};
  result.grid_step = theta_step;
  return result;
}

std::vector<DivergenceRow> divergence_demo(const rotkit::RawQuaternion& q1,
                                           const rotkit::RawQuaternion& q2,
                                           std::span<const double> eps_list) {
  const double alpha = rotkit::dist_quat(rotkit::normalize(q1), rotkit::normalize(q2));
  if (alpha <= 1e-6) {
    throw InvalidArgument("quaternions describe the same rotation; no divergence");
  }
  std::vector<DivergenceRow> rows;
  for (double eps : eps_list) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidArgument("epsilon must be positive");
    const Vec4 a = eps * q1.vector();
    const Vec4 b = eps * q2.vector();
    const double r = ratio(to_std(a), to_std(b), Parameterization::QuaternionUnconstrained);
    rows.push_back({eps, rotkit::dist_quat(rotkit::normalize(rotkit::RawQuaternion::make(a)),
                                           rotkit::normalize(rotkit::RawQuaternion::make(b))),
                    (b - a).norm(), r});
  }
  return rows;
}

std::vector<DivergenceRow> unit_norm_divergence_demo(const Vec4& u1, const Vec4& u2,
                                                     std::span<const double> eps_list) {
  const auto v1 = rotkit::UnitQuaternion::from_vector(u1);
  const auto v2 = rotkit::UnitQuaternion::from_vector(u2);
  if ((v2.vector() - v1.vector()).norm() < kDegenerateThreshold) {
    throw InvalidArgument("unit vectors must be distinct");
  }
  std::vector<DivergenceRow> rows;
  for (double eps : eps_list) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidArgument("epsilon must be positive");
    const Vec4 a = eps * u1;
    const Vec4 b = eps * u2;
    const double num = (b / b.norm() - a / a.norm()).norm();
    const double den = (b - a).norm();
    rows.push_back({eps, num, den, num / den});
  }
  return rows;
}

}  // namespace rotsense::drc
