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

#include "rotsense/json_out.hpp"

#include <cmath>
#include <cstdio>

namespace rotsense::jsonout {

namespace {

void newline(std::string& out, int indent, int depth) {
  if (indent < 0) return;
  out += '\n';
  out.append(static_cast<std::size_t>(indent * depth), ' ');
}

void write(std::string& out, const json& v, int indent, int depth) {
  switch (v.type()) {
    case json::value_t::number_float: {
      const double d = v.get<double>();
      if (!std::isfinite(d)) {
        out += json(std::isnan(d) ? "nan" : (d > 0 ? "inf" : "-inf")).dump();
        break;
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", d);
      std::string s(buf);
      // Keep it a float on re-parse.
      if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
      out += s;
      break;
    }
    case json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        break;
      }
      out += '{';
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(out, indent, depth + 1);
        out += json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        write(out, it.value(), indent, depth + 1);
      }
      newline(out, indent, depth);
      out += '}';
      break;
    }
    case json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        break;
      }
      out += '[';
      bool first = true;
      for (const auto& item : v) {
        if (!first) out += ',';
        first = false;
        newline(out, indent, depth + 1);
        write(out, item, indent, depth + 1);
      }
      newline(out, indent, depth);
      out += ']';
      break;
    }
    default:
      out += v.dump();
  }
}

json vector_json(std::span<const double> v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

}  // namespace

json number(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

std::string dump(const json& value, int indent) {
  std::string out;
  write(out, value, indent, 0);
  return out;
}

json to_json(const drc::DrcEstimate& e) {
  json j;
  j["parameterization"] = std::string(drc::to_string(e.parameterization));
  j["samples"] = e.samples;
  j["injected"] = e.injected;
  j["rejected"] = e.rejected;
  j["shifted"] = e.shifted;
  j["sup_ratio"] = number(e.sup_ratio);
  j["sup_sampled"] = number(e.sup_sampled);
  j["sup_injected"] = number(e.sup_injected);
  j["argmax_index"] = e.argmax_index;
  j["argmax_injected"] = e.argmax_index >= e.samples;
  j["argmax_pair"] = {{"p1", vector_json(e.argmax_pair.p1)},
                      {"p2", vector_json(e.argmax_pair.p2)}};
  j["rng_seed"] = e.rng_seed;
  j["analytic_mu"] = number(e.analytic_mu);
  return j;
}

json to_json(const drc::PlanarSupResult& r, drc::Parameterization p) {
  json j;
  j["parameterization"] = std::string(drc::to_string(p));
  j["value"] = number(r.value);
  j["arg"] = vector_json(r.arg);
  j["arg_names"] = p == drc::Parameterization::Quaternion
                       ? json{"c"}
                       : json{"theta1", "theta2", "t"};
  j["grid_step"] = number(r.grid_step);
  j["evaluations"] = r.evaluations;
  j["analytic_mu"] = number(drc::analytic_mu(p));
  return j;
}

json to_json(std::span<const drc::DivergenceRow> rows) {
  json a = json::array();
  for (const auto& r : rows) {
    a.push_back({{"epsilon", number(r.epsilon)},
                 {"numerator", number(r.numerator)},
                 {"denominator", number(r.denominator)},
                 {"ratio", number(r.ratio)}});
  }
  return a;
}

json to_json(const lipnet::LayerBound& b) {
  return {{"index", b.index},
          {"layer", b.layer},
          {"bound", number(b.bound)},
          {"method", b.method},
          {"iterations", b.iterations}};
}

json to_json(const lipnet::LipschitzReport& r) {
  json layers = json::array();
  for (const auto& b : r.per_layer) layers.push_back(to_json(b));
  return {{"subnet", std::string(lipnet::to_string(r.subnet))},
          {"tol", number(r.tol)},
          {"per_layer", std::move(layers)},
          {"product_bound", number(r.product_bound)}};
}

json to_json(const lipnet::RotationalBound& r) {
  json j;
  j["parameterization"] = std::string(drc::to_string(r.parameterization));
  j["euclidean_bound"] = number(r.euclidean_bound);
  j["mu"] = number(r.mu);
  j["rotational_bound"] = number(r.rotational_bound);
  if (r.epsilon) j["epsilon"] = number(*r.epsilon);
  if (r.output_radius) j["output_radius"] = number(*r.output_radius);
  if (r.useful) j["useful"] = *r.useful;
  return j;
}

}  // namespace rotsense::jsonout
