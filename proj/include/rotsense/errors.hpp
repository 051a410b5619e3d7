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
#include <stdexcept>
#include <string>

namespace rotsense {

/// Error classes. Each maps to its own CLI exit code (see ExitCode).
enum class ErrorKind {
  InvalidArgument,
  DegeneratePair,
  UnboundedConstant,
  ConvergenceFailure,
  MissingFile,
  ShapeMismatch,
  NonFiniteValue,
  UnknownLayerKind,
  UnsupportedVersion,
  ManifestFormat,
  Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorKind::InvalidArgument, what) {}
};

/// Two parameter vectors closer than the degenerate-pair threshold.
class DegeneratePair : public Error {
 public:
  explicit DegeneratePair(const std::string& what)
      : Error(ErrorKind::DegeneratePair, what) {}
};

/// The requested computation needs a finite distance ratio constant.
class UnboundedConstant : public Error {
 public:
  explicit UnboundedConstant(const std::string& what)
      : Error(ErrorKind::UnboundedConstant, what) {}
};

class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(const std::string& what, double best_estimate,
                     std::size_t iterations, long layer_index = -1);

  double best_estimate() const noexcept { return best_estimate_; }
  std::size_t iterations() const noexcept { return iterations_; }
  /// -1 when not raised from a network layer.
  long layer_index() const noexcept { return layer_index_; }

 private:
  double best_estimate_;
  std::size_t iterations_;
  long layer_index_;
};

/// Errors raised while loading or saving a model.
class ModelIoError : public Error {
 public:
  ModelIoError(ErrorKind kind, const std::string& what) : Error(kind, what) {}
};

/// Process exit codes used by the command-line tool.
enum class ExitCode : int {
  Ok = 0,
  Usage = 2,
  InvalidArgument = 3,
  DegeneratePair = 4,
  UnboundedConstant = 5,
  ConvergenceFailure = 6,
  MissingFile = 7,
  ShapeMismatch = 8,
  NonFiniteValue = 9,
  UnknownLayerKind = 10,
  UnsupportedVersion = 11,
  ManifestFormat = 12,
  Io = 13,
  Internal = 70,
};

ExitCode exit_code_for(ErrorKind kind);

}  // namespace rotsense
