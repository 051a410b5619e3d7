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

#include "rotsense/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "rotsense/errors.hpp"
#include "rotsense/rng.hpp"

namespace rotsense::lipnet {
namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const Eigen::VectorXd> view(std::span<const double> s) {
  return {s.data(), static_cast<Eigen::Index>(s.size())};
}
Eigen::Map<Eigen::VectorXd> view(std::span<double> s) {
  return {s.data(), static_cast<Eigen::Index>(s.size())};
}

// All-ones plus a fixed pseudo-random perturbation. The bare all-ones
// vector is invariant under spatial flips, and for stride-1 convolutions
// A^T A commutes with the 180 degree flip, so it can miss the top singular
// vector entirely.
Eigen::VectorXd start_vector(std::size_t n) {
  CounterRng rng(0x9d2c5680u, n);
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = 1.0 + (rng.uniform() - 0.5);
  return v.normalized();
}

}  // namespace

SpectralNorm power_iteration(const LinearMap& apply, const LinearMap& adjoint,
                             std::size_t in_dim, std::size_t out_dim, double tol,
                             std::size_t max_iterations) {
  if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
  if (in_dim == 0 || out_dim == 0) return {};

  Eigen::VectorXd v = start_vector(in_dim);
  Eigen::VectorXd u(static_cast<Eigen::Index>(out_dim));
  Eigen::VectorXd g(static_cast<Eigen::Index>(in_dim));
  auto step = [&] {
    apply({v.data(), in_dim}, {u.data(), out_dim});
    adjoint({u.data(), out_dim}, {g.data(), in_dim});
  };

  step();
  if (g.norm() == 0.0) {
    // The start lies in the null space of A^T A. Try a fixed alternating
    // vector, then coordinate directions; only A = 0 exhausts them.
    Eigen::VectorXd fallback(static_cast<Eigen::Index>(in_dim));
    for (Eigen::Index i = 0; i < fallback.size(); ++i) {
      fallback[i] = ((i % 2) ? -1.0 : 1.0) / static_cast<double>(i + 1);
    }
    v = (v + fallback.normalized()).normalized();
    step();
    for (std::size_t i = 0; g.norm() == 0.0 && i < in_dim; ++i) {
      v = Eigen::VectorXd::Unit(static_cast<Eigen::Index>(in_dim), static_cast<Eigen::Index>(i));
      step();
    }
    if (g.norm() == 0.0) {
      SpectralNorm zero;
      zero.witness.assign(v.data(), v.data() + in_dim);
      return zero;
    }
  }

  double sigma = u.norm();
  double best = sigma;
  for (std::size_t it = 1; it <= max_iterations; ++it) {
    const double gn = g.norm();
    if (gn == 0.0) break;
    v = g / gn;
    step();
    const double next = u.norm();
    const bool converged = std::abs(next - sigma) <= tol * next;
    sigma = next;
    best = std::max(best, sigma);
    if (converged) {
      SpectralNorm out;
      out.sigma = sigma;
      out.bound = sigma * (1.0 + tol);
      out.certificate = u.norm() / v.norm();
      out.iterations = it;
      out.witness.assign(v.data(), v.data() + in_dim);
      return out;
    }
  }
  throw ConvergenceFailure("power iteration did not converge within " +
                               std::to_string(max_iterations) + " iterations",
                           best, max_iterations);
}

SpectralNorm lanczos(const LinearMap& apply, const LinearMap& adjoint, std::size_t in_dim,
                     std::size_t out_dim, double tol, std::size_t max_iterations) {
  if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
  if (in_dim == 0 || out_dim == 0) return {};
  const auto n = static_cast<Eigen::Index>(in_dim);
  const Eigen::Index m = std::min<Eigen::Index>(n, static_cast<Eigen::Index>(kLanczosRestart));

  Eigen::VectorXd u(static_cast<Eigen::Index>(out_dim));
  Eigen::VectorXd w(n);
  std::size_t products = 0;
  auto gram = [&](const Eigen::VectorXd& x) {
    apply({x.data(), in_dim}, {u.data(), out_dim});
    adjoint({u.data(), out_dim}, {w.data(), in_dim});
    ++products;
  };
  auto finish = [&](const Eigen::VectorXd& x) {
    SpectralNorm out;
    apply({x.data(), in_dim}, {u.data(), out_dim});
    out.sigma = u.norm();
    out.bound = out.sigma * (1.0 + tol);
    out.certificate = out.sigma / x.norm();
    out.iterations = products;
    out.witness.assign(x.data(), x.data() + in_dim);
    return out;
  };

  Eigen::VectorXd start = start_vector(in_dim);
  gram(start);
  if (w.norm() == 0.0) {
    // Same fallbacks as power_iteration.
    Eigen::VectorXd fallback(n);
    for (Eigen::Index i = 0; i < n; ++i) fallback[i] = ((i % 2) ? -1.0 : 1.0) / static_cast<double>(i + 1);
    start = (start + fallback.normalized()).normalized();
    gram(start);
    for (Eigen::Index i = 0; w.norm() == 0.0 && i < n; ++i) {
      start = Eigen::VectorXd::Unit(n, i);
      gram(start);
    }
    if (w.norm() == 0.0) return finish(start);
  }

  Eigen::MatrixXd q(n, m);
  std::vector<double> alpha, beta;
  double best = 0.0;
  for (;;) {
    q.col(0) = start;
    alpha.clear();
    beta.clear();
    Eigen::VectorXd ritz = start;
    double theta = 0.0;
    // w already holds A^T A q_0 on entry.
    for (Eigen::Index j = 0; j < m; ++j) {
      if (j > 0) gram(q.col(j));
      alpha.push_back(q.col(j).dot(w));
      // Two passes of classical Gram-Schmidt against the whole basis.
      for (int pass = 0; pass < 2; ++pass) {
        w.noalias() -= q.leftCols(j + 1) * (q.leftCols(j + 1).transpose() * w);
      }
      const double b = w.norm();
      const auto k = static_cast<Eigen::Index>(alpha.size());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
      Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), k);
      Eigen::VectorXd sub = Eigen::Map<Eigen::VectorXd>(beta.data(), k - 1);
      tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
      theta = tri.eigenvalues()[k - 1];
      const Eigen::VectorXd y = tri.eigenvectors().col(k - 1);
      best = std::max(best, std::sqrt(std::max(theta, 0.0)));
      const double residual = b * std::abs(y[k - 1]);
      const bool exhausted = b <= 1e-14 * std::max(theta, 1e-300) || j + 1 == n;
      if (residual <= tol * theta || exhausted || j + 1 == m ||
          products >= max_iterations) {
        ritz = (q.leftCols(k) * y).normalized();
        if (residual <= tol * theta || exhausted) return finish(ritz);
        break;
      }
      beta.push_back(b);
      q.col(j + 1) = w / b;
    }
    if (products >= max_iterations) {
      throw ConvergenceFailure("Lanczos iteration did not converge within " +
                                   std::to_string(max_iterations) + " products",
                               best, products);
    }
    start = ritz;
    gram(start);
  }
}

SpectralNorm operator_norm(const LinearMap& apply, const LinearMap& adjoint,
                           std::size_t in_dim, std::size_t out_dim, double tol,
                           NormMethod method, std::size_t max_iterations) {
  return method == NormMethod::Lanczos
             ? lanczos(apply, adjoint, in_dim, out_dim, tol, max_iterations)
             : power_iteration(apply, adjoint, in_dim, out_dim, tol, max_iterations);
}

SpectralNorm spectral_norm_dense(const Eigen::MatrixXd& w, double tol, NormMethod method,
                                 std::size_t max_iterations) {
  if (!w.allFinite()) throw InvalidArgument("matrix has non-finite entries");
  const auto rows = static_cast<std::size_t>(w.rows());
  const auto cols = static_cast<std::size_t>(w.cols());
  return operator_norm(
      [&](std::span<const double> x, std::span<double> y) { view(y).noalias() = w * view(x); },
      [&](std::span<const double> y, std::span<double> x) {
        view(x).noalias() = w.transpose() * view(y);
      },
      cols, rows, tol, method, max_iterations);
}

SpectralNorm spectral_norm_dense(std::span<const double> data, std::size_t rows,
                                 std::size_t cols, double tol, NormMethod method,
                                 std::size_t max_iterations) {
  if (data.size() != rows * cols) {
    throw Error(ErrorKind::ShapeMismatch, "matrix data does not match its shape");
  }
  Eigen::Map<const RowMajor> w(data.data(), static_cast<Eigen::Index>(rows),
                               static_cast<Eigen::Index>(cols));
  return operator_norm(
      [&](std::span<const double> x, std::span<double> y) { view(y).noalias() = w * view(x); },
      [&](std::span<const double> y, std::span<double> x) {
        view(x).noalias() = w.transpose() * view(y);
      },
      cols, rows, tol, method, max_iterations);
}

SpectralNorm spectral_norm_conv(const Conv& spec, std::span<const double> weight,
                                const Shape3& input, double tol, NormMethod method,
                                std::size_t max_iterations) {
  const Shape3 out = output_shape(spec, input);
  if (weight.size() != spec.out_channels * input.c * spec.kernel * spec.kernel) {
    throw Error(ErrorKind::ShapeMismatch, "conv weight does not match its layer spec");
  }
  return operator_norm(
      [&](std::span<const double> x, std::span<double> y) { conv2d(spec, weight, input, x, y); },
      [&](std::span<const double> y, std::span<double> x) {
        conv2d_adjoint(spec, weight, input, y, x);
      },
      input.numel(), out.numel(), tol, method, max_iterations);
}

}  // namespace rotsense::lipnet
