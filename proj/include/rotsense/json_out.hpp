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

// JSON views of results. Doubles are written with 17 significant digits so
// that they parse back to the same value; non-finite values become the
// strings "inf", "-inf" and "nan".

#include <span>
#include <string>

#include <json.hpp>

#include "rotsense/drc.hpp"
#include "rotsense/lipnet.hpp"

namespace rotsense::jsonout {

using json = nlohmann::json;

/// Finite values as numbers, the rest as strings.
json number(double v);

/// Serializes with 17-digit doubles. indent < 0 gives a single line.
std::string dump(const json& value, int indent = -1);

json to_json(const drc::DrcEstimate& e);
json to_json(const drc::PlanarSupResult& r, drc::Parameterization p);
json to_json(std::span<const drc::DivergenceRow> rows);
json to_json(const lipnet::LayerBound& b);
json to_json(const lipnet::LipschitzReport& r);
json to_json(const lipnet::RotationalBound& r);

}  // namespace rotsense::jsonout
