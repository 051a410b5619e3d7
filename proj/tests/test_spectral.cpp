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

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/SVD>

#include "rotsense/errors.hpp"
#include "rotsense/network.hpp"
#include "rotsense/spectral.hpp"

using namespace rotsense;
using namespace rotsense::lipnet;

namespace {

double svd_norm(const Eigen::MatrixXd& m) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
}

// The convolution as an explicit matrix, built one basis vector at a time.
Eigen::MatrixXd materialize(const Conv& spec, const std::vector<double>& w, const Shape3& in) {
  const Shape3 out = output_shape(spec, in);
  Eigen::MatrixXd m(out.numel(), in.numel());
  std::vector<double> e(in.numel(), 0.0), y(out.numel());
  for (std::size_t j = 0; j < in.numel(); ++j) {
    e[j] = 1.0;
    conv2d(spec, w, in, e, y);
    for (std::size_t i = 0; i < out.numel(); ++i) m(static_cast<long>(i), static_cast<long>(j)) = y[i];
    e[j] = 0.0;
  }
  return m;
}

std::vector<double> gaussian(std::mt19937_64& gen, std::size_t n) {
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (auto& x : v) x = g(gen);
  return v;
}

}  // namespace

TEST_CASE("dense norms match the SVD") {
  std::mt19937_64 gen(31);
  std::uniform_int_distribution<int> dim(1, 40);
  for (int trial = 0; trial < 100; ++trial) {
    const int r = dim(gen), c = dim(gen);
    Eigen::MatrixXd m(r, c);
    const auto vals = gaussian(gen, static_cast<std::size_t>(r * c));
    for (int i = 0; i < r * c; ++i) m(i / c, i % c) = vals[static_cast<std::size_t>(i)];
    if (trial % 10 == 0 && r > 1) m.row(0) = m.row(1);  // rank deficient
    const double truth = svd_norm(m);
    for (auto method : {NormMethod::Lanczos, NormMethod::PowerIteration}) {
      const auto sn = spectral_norm_dense(m, 1e-10, method, 100000);
      CHECK(std::abs(sn.sigma - truth) <= 1e-6 * truth);
      CHECK(sn.bound >= sn.sigma);
      CHECK(sn.certificate >= sn.sigma * (1.0 - 1e-10));
    }
  }
}

TEST_CASE("row-major view agrees with the matrix overload") {
  const std::vector<double> w{1, 2, 3, 4, 5, 6};
  Eigen::MatrixXd m(2, 3);
  m << 1, 2, 3, 4, 5, 6;
  CHECK(spectral_norm_dense(w, 2, 3).sigma == doctest::Approx(svd_norm(m)).epsilon(1e-9));
  CHECK_THROWS(spectral_norm_dense(w, 3, 3));
}

TEST_CASE("conv adjoint is the transpose") {
  std::mt19937_64 gen(32);
  const Conv spec{3, 3, 2, 1, false, {}};
  const Shape3 in{2, 7, 6};
  const Shape3 out = output_shape(spec, in);
  const auto w = gaussian(gen, 3 * 2 * 9);
  const auto x = gaussian(gen, in.numel());
  const auto y = gaussian(gen, out.numel());
  std::vector<double> ax(out.numel()), aty(in.numel());
  conv2d(spec, w, in, x, ax);
  conv2d_adjoint(spec, w, in, y, aty);
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t i = 0; i < out.numel(); ++i) lhs += ax[i] * y[i];
  for (std::size_t i = 0; i < in.numel(); ++i) rhs += x[i] * aty[i];
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("conv norms match the materialized operator") {
  std::mt19937_64 gen(33);
  std::uniform_int_distribution<std::size_t> side(3, 8), k(1, 3), s(1, 2), pad(0, 1), ch(1, 3);
  int cases = 0;
  while (cases < 60) {
    const Shape3 in{1, side(gen), side(gen)};
    const Conv spec{ch(gen), k(gen), s(gen), pad(gen), false, {}};
    if (spec.kernel > in.h + 2 * spec.padding || spec.kernel > in.w + 2 * spec.padding) continue;
    const auto w = gaussian(gen, spec.out_channels * spec.kernel * spec.kernel);
    const double truth = svd_norm(materialize(spec, w, in));
    for (auto method : {NormMethod::Lanczos, NormMethod::PowerIteration}) {
      const auto sn = spectral_norm_conv(spec, w, in, 1e-10, method, 100000);
      CHECK(std::abs(sn.sigma - truth) <= 1e-6 * truth);
    }
    ++cases;
  }
}

TEST_CASE("start vectors in the null space are recovered from") {
  // The all-ones start is annihilated by [1, -1].
  Eigen::MatrixXd m(1, 2);
  m << 1, -1;
  for (auto method : {NormMethod::Lanczos, NormMethod::PowerIteration}) {
    CHECK(spectral_norm_dense(m, 1e-12, method).sigma ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(spectral_norm_dense(Eigen::MatrixXd::Zero(3, 4), 1e-9, method).sigma == 0.0);
  }
}

TEST_CASE("non-convergence reports the best estimate") {
  std::mt19937_64 gen(34);
  Eigen::MatrixXd m(50, 50);
  const auto vals = gaussian(gen, 2500);
  for (int i = 0; i < 2500; ++i) m(i / 50, i % 50) = vals[static_cast<std::size_t>(i)];
  try {
    spectral_norm_dense(m, 1e-14, NormMethod::PowerIteration, 3);
    FAIL("expected a convergence failure");
  } catch (const ConvergenceFailure& e) {
    CHECK(e.best_estimate() > 0.0);
    CHECK(e.best_estimate() <= svd_norm(m) * (1.0 + 1e-12));
    CHECK(e.iterations() == 3);
  }
  CHECK_THROWS_AS(spectral_norm_dense(m, 0.0), InvalidArgument);
}

TEST_CASE("results are deterministic") {
  std::mt19937_64 gen(35);
  const Conv spec{4, 3, 1, 1, false, {}};
  const Shape3 in{2, 8, 8};
  const auto w = gaussian(gen, 4 * 2 * 9);
  const auto a = spectral_norm_conv(spec, w, in);
  const auto b = spectral_norm_conv(spec, w, in);
  CHECK(a.sigma == b.sigma);
  CHECK(a.iterations == b.iterations);
  CHECK(a.witness == b.witness);
}
