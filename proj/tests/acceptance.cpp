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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails. Pass criterion numbers to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "rotsense/drc.hpp"
#include "rotsense/lipnet.hpp"
#include "rotsense/netio.hpp"
#include "rotsense/rotkit.hpp"

using namespace rotsense;
using drc::Parameterization;
using lipnet::Shape3;
using rotkit::kPi;
using rotkit::Vec3;
using rotkit::Vec4;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Vec4 random_unit4(std::mt19937_64& gen) {
  std::normal_distribution<double> n;
  for (;;) {
    Vec4 v(n(gen), n(gen), n(gen), n(gen));
    if (v.norm() > 1e-6) return v.normalized();
  }
}

std::vector<double> gaussian(std::mt19937_64& gen, std::size_t n, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = g(gen);
  return v;
}

double norm_diff(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Outcome distance_oracles() {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(20260101);
  double worst_q = 0.0, worst_e = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const auto q1 = rotkit::UnitQuaternion::from_vector(random_unit4(gen));
    const auto q2 = rotkit::UnitQuaternion::from_vector(random_unit4(gen));
    const double dm = rotkit::dist_matrices(rotkit::quat_to_matrix(q1), rotkit::quat_to_matrix(q2));
    worst_q = std::max(worst_q, std::abs(dm - rotkit::dist_quat(q1, q2)));
    worst_e = std::max(worst_e, std::abs(dm - rotkit::dist_exp(rotkit::quat_to_exp(q1),
                                                               rotkit::quat_to_exp(q2))));
  }
  const double t = seconds_since(t0);
  return {worst_q <= 1e-9 && worst_e <= 1e-9 && t < 10.0,
          "1e5 pairs, max |dM-dQ| " + fmt("%.3g", worst_q) + ", max |dM-dE| " +
              fmt("%.3g", worst_e) + ", " + fmt("%.2f", t) + " s"};
}

Outcome exp_constant(Parameterization p) {
  const auto t0 = Clock::now();
  const auto e = drc::monte_carlo_sup(p, 1000000, 20260102);
  double worst_injected = 0.0;
  for (const auto& pair : drc::achiever_pairs(p)) {
    worst_injected = std::max(worst_injected, std::abs(drc::ratio(pair.p1, pair.p2, p) - 1.0));
  }
  const double t = seconds_since(t0);
  bool ok = e.sup_ratio >= 0.999 && e.sup_ratio <= 1.0 + 1e-9 && worst_injected <= 1e-12 &&
            e.sup_sampled <= 1.0 + 1e-9 && t < 60.0;
  std::string detail = "sup " + fmt("%.17g", e.sup_ratio) + ", sampled max " +
                       fmt("%.17g", e.sup_sampled) + ", injected |r-1| " +
                       fmt("%.3g", worst_injected);
  if (p == Parameterization::ExpCoordsUnconstrained) {
    ok = ok && e.shifted > 0;
    detail += ", " + std::to_string(e.shifted) + " shifted vectors";
  }
  return {ok, detail + ", " + fmt("%.2f", t) + " s"};
}

Outcome quaternion_constant() {
  const double mu = kPi / std::sqrt(2.0);
  const auto e = drc::monte_carlo_sup(Parameterization::Quaternion, 1000000, 20260103);
  const auto planar = drc::planar_sup_search(Parameterization::Quaternion, 1000);
  const double arg_err = std::abs(planar.arg[0] - std::sqrt(2.0));
  const double val_err = std::abs(planar.value - mu);
  const bool ok = std::abs(e.sup_injected - mu) <= 1e-12 && e.sup_sampled <= mu + 1e-9 &&
                  arg_err <= planar.grid_step && val_err <= 1e-6;
  return {ok, "injected |r-pi/sqrt2| " + fmt("%.3g", std::abs(e.sup_injected - mu)) +
                  ", sampled max " + fmt("%.17g", e.sup_sampled) + ", planar argmax off by " +
                  fmt("%.3g", arg_err) + " (step " + fmt("%.3g", planar.grid_step) +
                  "), value off by " + fmt("%.3g", val_err)};
}

Outcome divergence() {
  const std::vector<double> eps{1, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7};
  const auto rows = drc::divergence_demo(rotkit::RawQuaternion::make(Vec4(1, 0, 0, 0)),
                                         rotkit::RawQuaternion::make(Vec4(0, 1, 0, 0)), eps);
  const auto unit = drc::unit_norm_divergence_demo(Vec4(1, 0, 0, 0), Vec4(0, 1, 0, 0), eps);
  double worst = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    worst = std::max(worst, std::abs(rows[i].ratio / rows[i - 1].ratio / 10.0 - 1.0));
    worst = std::max(worst, std::abs(unit[i].ratio / unit[i - 1].ratio / 10.0 - 1.0));
  }
  return {worst <= 1e-9, "eps 1 .. 1e-7, max relative deviation of ratio(eps/10)/ratio(eps) "
                         "from 10: " + fmt("%.3g", worst)};
}

Outcome planar_consistency() {
  std::mt19937_64 gen(20260104);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_e = 0.0, worst_q = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto p = i % 2 ? Parameterization::ExpCoords : Parameterization::ExpCoordsUnconstrained;
    const double top = p == Parameterization::ExpCoords ? kPi : 2.0 * kPi;
    const double a = top * u(gen), b = top * u(gen), t = u(gen);
    const Vec3 s1 = a * Vec3::UnitX();
    const Vec3 s2 = b * Vec3(1.0 - 2.0 * t, 2.0 * std::sqrt(t * (1.0 - t)), 0.0);
    const double full = drc::ratio(std::vector<double>{s1[0], s1[1], s1[2]},
                                   std::vector<double>{s2[0], s2[1], s2[2]}, p);
    worst_e = std::max(worst_e, std::abs(drc::planar_ratio_exp(drc::PlanarExpPair::make(a, b, t)) - full));

    const double c = 2.0 * (1.0 - u(gen));
    const Vec4 q1 = random_unit4(gen);
    Vec4 w = random_unit4(gen);
    w = (w - w.dot(q1) * q1).normalized();
    const double phi = 2.0 * std::asin(0.5 * c);
    const Vec4 q2 = std::cos(phi) * q1 + std::sin(phi) * w;
    const double full_q = drc::ratio(std::vector<double>{q1[0], q1[1], q1[2], q1[3]},
                                     std::vector<double>{q2[0], q2[1], q2[2], q2[3]},
                                     Parameterization::Quaternion);
    worst_q = std::max(worst_q, std::abs(drc::planar_ratio_quat(drc::ChordParam::make(c)) - full_q));
  }
  return {worst_e <= 1e-12 && worst_q <= 1e-12,
          "1e4 samples each, max |planar - full| exp " + fmt("%.3g", worst_e) + ", quaternion " +
              fmt("%.3g", worst_q)};
}

Outcome spectral_oracles() {
  using namespace lipnet;
  std::mt19937_64 gen(20260105);
  std::uniform_int_distribution<int> dim(1, 60);
  // The bounds use Lanczos; plain power iteration is reported alongside.
  double worst_dense = 0.0, power_dense = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int r = dim(gen), c = dim(gen);
    const auto vals = gaussian(gen, static_cast<std::size_t>(r * c));
    Eigen::MatrixXd m(r, c);
    for (int i = 0; i < r * c; ++i) m(i / c, i % c) = vals[static_cast<std::size_t>(i)];
    const double truth = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
    const double est = spectral_norm_dense(m).sigma;
    worst_dense = std::max(worst_dense, std::abs(est - truth) / truth);
    const double pw = spectral_norm_dense(m, kDefaultTol, NormMethod::PowerIteration, 1000000).sigma;
    power_dense = std::max(power_dense, std::abs(pw - truth) / truth);
  }
  std::uniform_int_distribution<std::size_t> side(3, 8), ks(1, 3), st(1, 2), pd(0, 1), oc(1, 4);
  double worst_conv = 0.0, power_conv = 0.0;
  int convs = 0;
  while (convs < 100) {
    const Shape3 in{1, side(gen), side(gen)};
    const Conv spec{oc(gen), ks(gen), st(gen), pd(gen), false, {}};
    if (spec.kernel > in.h + 2 * spec.padding || spec.kernel > in.w + 2 * spec.padding) continue;
    const auto w = gaussian(gen, spec.out_channels * spec.kernel * spec.kernel);
    const Shape3 out = output_shape(spec, in);
    Eigen::MatrixXd mat(out.numel(), in.numel());
    std::vector<double> e(in.numel(), 0.0), y(out.numel());
    for (std::size_t j = 0; j < in.numel(); ++j) {
      e[j] = 1.0;
      conv2d(spec, w, in, e, y);
      for (std::size_t i = 0; i < y.size(); ++i) mat(static_cast<long>(i), static_cast<long>(j)) = y[i];
      e[j] = 0.0;
    }
    const double truth = Eigen::JacobiSVD<Eigen::MatrixXd>(mat).singularValues()(0);
    const double est = spectral_norm_conv(spec, w, in).sigma;
    worst_conv = std::max(worst_conv, std::abs(est - truth) / truth);
    const double pw =
        spectral_norm_conv(spec, w, in, kDefaultTol, NormMethod::PowerIteration, 1000000).sigma;
    power_conv = std::max(power_conv, std::abs(pw - truth) / truth);
    ++convs;
  }
  return {worst_dense <= 1e-6 && worst_conv <= 1e-6,
          "100 dense, 100 conv, max relative error dense " + fmt("%.3g", worst_dense) +
              ", conv " + fmt("%.3g", worst_conv) + " (plain power iteration: dense " +
              fmt("%.3g", power_dense) + ", conv " + fmt("%.3g", power_conv) + ")"};
}

Outcome soundness() {
  using namespace lipnet;
  std::mt19937_64 gen(20260106);
  const std::vector<std::pair<Shape3, std::vector<LayerSpec>>> designs{
      {{8, 1, 1}, {FullyConnected{6, false, {}}}},
      {{8, 1, 1}, {FullyConnected{16, true, {}}, FullyConnected{6, false, {}}}},
      {{6, 1, 1},
       {FullyConnected{12, true, {}}, FullyConnected{12, true, 0.5}, FullyConnected{6, false, {}}}},
      {{2, 6, 6}, {Conv{3, 3, 1, 1, true, {}}, Flatten{}, FullyConnected{6, false, {}}}},
      {{1, 7, 7}, {Conv{2, 3, 2, 0, true, {}}, MaxPool{2, 1}, Flatten{}, FullyConnected{6, false, {}}}},
  };
  std::size_t violations = 0, pairs = 0;
  double tightest = 0.0, tightest_rot = 0.0;
  for (int k = 0; k < 20; ++k) {
    const auto& [shape, specs] = designs[static_cast<std::size_t>(k) % designs.size()];
    const auto model = random_model(shape, specs, 1000 + static_cast<std::uint64_t>(k));
    const auto reports = pose_head_bounds(model);
    const double le = reports.full.product_bound;
    const double le_rot = reports.rotation.product_bound;
    const double rot_bound =
        rotational_bound(le_rot, Parameterization::ExpCoordsUnconstrained).rotational_bound;
    const std::size_t n = shape.numel();
    for (int i = 0; i < 1000; ++i) {
      const auto a = gaussian(gen, n, 3.0);
      std::vector<double> b;
      if (i % 4 == 0) {
        b = gaussian(gen, n, 3.0);
      } else {
        const auto d = gaussian(gen, n, std::pow(10.0, -(i % 7)));
        b = a;
        for (std::size_t j = 0; j < n; ++j) b[j] += d[j];
      }
      const double dx = norm_diff(a, b);
      if (dx == 0.0) continue;
      const auto ya = forward(model, a), yb = forward(model, b);
      const double ratio = norm_diff(ya, yb) / dx;
      const auto ra = rotkit::ExpCoords::unconstrained(Vec3(ya[3], ya[4], ya[5]));
      const auto rb = rotkit::ExpCoords::unconstrained(Vec3(yb[3], yb[4], yb[5]));
      const double rot_ratio = rotkit::dist_exp(ra, rb) / dx;
      if (ratio > le || rot_ratio > rot_bound) ++violations;
      tightest = std::max(tightest, ratio / le);
      tightest_rot = std::max(tightest_rot, rot_ratio / rot_bound);
      ++pairs;
    }
  }
  return {violations == 0, "20 models, " + std::to_string(pairs) + " pairs, " +
                               std::to_string(violations) +
                               " violations; largest empirical/bound Euclidean " +
                               fmt("%.3f", tightest) + ", rotational " + fmt("%.3f", tightest_rot)};
}

Outcome corollary_arithmetic() {
  const auto p = Parameterization::ExpCoordsUnconstrained;
  const auto fwd = lipnet::perturbation_bound(1.1e-11, 84e9, p);
  const auto inv = lipnet::inverse_perturbation(1.0, 84e9, p);
  const bool ok = fwd.radians <= 1.0 && fwd.useful && inv.epsilon && *inv.epsilon >= 1.0e-11 &&
                  *inv.epsilon <= 1.3e-11;
  return {ok, "mu = 1, L_e = 84e9: eps 1.1e-11 -> " + fmt("%.6g", fwd.radians) +
                  " rad; 1 rad -> eps " + fmt("%.6g", inv.epsilon.value_or(NAN))};
}

Outcome reference_smoke() {
  const auto t0 = Clock::now();
  const auto model = netio::build_reference_architecture({3, 64, 64}, 20260107);
  const auto r = lipnet::pose_head_bounds(model, lipnet::kDefaultTol, 1);
  const double t = seconds_since(t0);
  const double full = r.full.product_bound, rot = r.rotation.product_bound,
               pos = r.position.product_bound;
  const bool ok = model.layers().size() == 12 && std::isfinite(full) && full > 0.0 &&
                  std::isfinite(rot) && rot > 0.0 && pos > 0.0 && rot <= full && t < 300.0;
  return {ok, "3x64x64, 12 layers, L_e full " + fmt("%.6g", full) + ", position " +
                  fmt("%.6g", pos) + ", rotation " + fmt("%.6g", rot) + ", " + fmt("%.1f", t) +
                  " s"};
}

Outcome maxpool_validity() {
  using namespace lipnet;
  std::mt19937_64 gen(20260108);
  const MaxPool pool{3, 2};
  const Shape3 in{1, 9, 9};
  const Shape3 out = output_shape(pool, in);
  const double bound = max_pool_bound(pool);
  std::vector<double> ya(out.numel()), yb(out.numel());
  auto ratio = [&](const std::vector<double>& a, const std::vector<double>& b) {
    max_pool(pool, in, a, ya);
    max_pool(pool, in, b, yb);
    return norm_diff(ya, yb) / norm_diff(a, b);
  };
  std::uniform_int_distribution<std::size_t> pix(0, in.numel() - 1);
  double best = 0.0;
  std::vector<double> best_a = gaussian(gen, in.numel()), best_b = gaussian(gen, in.numel());
  double current = ratio(best_a, best_b);
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<double> a, b;
    switch (trial % 3) {
      case 0:  // independent random pair
        a = gaussian(gen, in.numel());
        b = gaussian(gen, in.numel());
        break;
      case 1: {  // raise one pixel above a random background
        a = gaussian(gen, in.numel());
        b = a;
        b[pix(gen)] += 5.0 + std::abs(gaussian(gen, 1)[0]) * 10.0;
        break;
      }
      default: {  // hill climbing from the best pair so far
        a = best_a;
        b = best_b;
        auto& target = trial % 2 ? a : b;
        target[pix(gen)] += gaussian(gen, 1, 0.5)[0];
        break;
      }
    }
    if (norm_diff(a, b) == 0.0) continue;
    const double r = ratio(a, b);
    best = std::max(best, r);
    if (r >= current) {
      current = r;
      best_a = a;
      best_b = b;
    }
  }
  return {best <= bound, "kernel 3 stride 2 on 1x9x9, 1e4 trials, largest ratio " +
                             fmt("%.15g", best) + " vs bound " + fmt("%g", bound)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"distance oracle equivalence", distance_oracles},
      {"mu(exp-coords) = 1", [] { return exp_constant(Parameterization::ExpCoords); }},
      {"mu(exp-coords-unconstrained) = 1",
       [] { return exp_constant(Parameterization::ExpCoordsUnconstrained); }},
      {"mu(quaternion) = pi/sqrt(2)", quaternion_constant},
      {"unconstrained quaternion divergence", divergence},
      {"planar consistency", planar_consistency},
      {"spectral norm oracles", spectral_oracles},
      {"bound soundness", soundness},
      {"perturbation arithmetic", corollary_arithmetic},
      {"reference pipeline smoke test", reference_smoke},
      {"max pooling bound validity", maxpool_validity},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %2d  %s: %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
