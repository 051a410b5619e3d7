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

#include "rotsense/errors.hpp"

namespace rotsense {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::DegeneratePair: return "degenerate-pair";
    case ErrorKind::UnboundedConstant: return "unbounded-constant";
    case ErrorKind::ConvergenceFailure: return "convergence-failure";
    case ErrorKind::MissingFile: return "missing-file";
    case ErrorKind::ShapeMismatch: return "shape-mismatch";
    case ErrorKind::NonFiniteValue: return "non-finite-value";
    case ErrorKind::UnknownLayerKind: return "unknown-layer-kind";
    case ErrorKind::UnsupportedVersion: return "unsupported-version";
    case ErrorKind::ManifestFormat: return "manifest-format";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(what), kind_(kind) {}

ConvergenceFailure::ConvergenceFailure(const std::string& what,
                                       double best_estimate,
                                       std::size_t iterations,
                                       long layer_index)
    : Error(ErrorKind::ConvergenceFailure, what),
      best_estimate_(best_estimate),
      iterations_(iterations),
      layer_index_(layer_index) {}

ExitCode exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return ExitCode::InvalidArgument;
    case ErrorKind::DegeneratePair: return ExitCode::DegeneratePair;
    case ErrorKind::UnboundedConstant: return ExitCode::UnboundedConstant;
    case ErrorKind::ConvergenceFailure: return ExitCode::ConvergenceFailure;
    case ErrorKind::MissingFile: return ExitCode::MissingFile;
    case ErrorKind::ShapeMismatch: return ExitCode::ShapeMismatch;
    case ErrorKind::NonFiniteValue: return ExitCode::NonFiniteValue;
    case ErrorKind::UnknownLayerKind: return ExitCode::UnknownLayerKind;
    case ErrorKind::UnsupportedVersion: return ExitCode::UnsupportedVersion;
    case ErrorKind::ManifestFormat: return ExitCode::ManifestFormat;
    case ErrorKind::Io: return ExitCode::Io;
  }
  return ExitCode::Internal;
}

}  // namespace rotsense
