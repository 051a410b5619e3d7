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

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace rotsense::lipnet {

/// Immutable row-major tensor (outermost dimension slowest). Copies share
/// the underlying storage.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::vector<std::size_t> shape, std::vector<double> values);

  const std::vector<std::size_t>& shape() const noexcept { return shape_; }
  std::span<const double> data() const noexcept {
    return storage_ ? std::span<const double>(*storage_) : std::span<const double>();
  }
  std::size_t numel() const noexcept { return storage_ ? storage_->size() : 0; }
  bool empty() const noexcept { return numel() == 0; }
  double operator[](std::size_t i) const { return (*storage_)[i]; }

 private:
  std::vector<std::size_t> shape_;
  std::shared_ptr<const std::vector<double>> storage_;
};

std::size_t shape_numel(std::span<const std::size_t> shape);
std::string shape_to_string(std::span<const std::size_t> shape);

/// Activation shape, channels x height x width. Flattened vectors are (n, 1, 1).
struct Shape3 {
  std::size_t c = 0;
  std::size_t h = 0;
  std::size_t w = 0;

  std::size_t numel() const noexcept { return c * h * w; }
  friend bool operator==(const Shape3&, const Shape3&) = default;
};

std::string to_string(const Shape3& s);

}  // namespace rotsense::lipnet
