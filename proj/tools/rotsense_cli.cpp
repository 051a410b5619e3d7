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

// rotsense command-line tool. Every command prints one JSON document on
// stdout and a short summary on stderr.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rotsense/drc.hpp"
#include "rotsense/errors.hpp"
#include "rotsense/json_out.hpp"
#include "rotsense/lipnet.hpp"
#include "rotsense/netio.hpp"
#include "rotsense/rotkit.hpp"

using namespace rotsense;
using jsonout::json;
using jsonout::number;

namespace {

// Splits "a,b,c" (or the contents of @file, where whitespace also
// separates) into numbers, reporting the character offset of a bad entry.
std::vector<double> parse_vector(const std::string& arg, const std::string& what) {
  std::string text = arg;
  std::string origin = what;
  if (!arg.empty() && arg[0] == '@') {
    std::ifstream in(arg.substr(1));
    if (!in) throw ModelIoError(ErrorKind::MissingFile, what + ": cannot read " + arg.substr(1));
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
    origin = what + " (" + arg.substr(1) + ")";
  }
  std::vector<double> out;
  std::size_t pos = 0;
  auto is_sep = [](char c) { return c == ',' || std::isspace(static_cast<unsigned char>(c)); };
  while (pos < text.size()) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos >= text.size()) break;
    std::size_t end = pos;
    while (end < text.size() && !is_sep(text[end])) ++end;
    const std::string token = text.substr(pos, end - pos);
    std::size_t used = 0;
    double v = 0.0;
    bool ok = !token.empty();
    if (ok) {
      try {
        v = std::stod(token, &used);
      } catch (const std::exception&) {
        ok = false;
      }
    }
    if (!ok || used != token.size() || !std::isfinite(v)) {
      throw InvalidArgument(origin + ": entry " + std::to_string(out.size() + 1) +
                            " at position " + std::to_string(pos) + " (\"" + token +
                            "\") is not a finite number");
    }
    out.push_back(v);
    pos = end;
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos < text.size() && text[pos] == ',') ++pos;
  }
  return out;
}

void require_size(const std::vector<double>& v, std::size_t n, const std::string& what) {
  if (v.size() != n) {
    throw InvalidArgument(what + ": expected " + std::to_string(n) + " values, got " +
                          std::to_string(v.size()));
  }
}

std::uint64_t parse_count(const std::string& s, const std::string& what) {
  double v = 0.0;
  std::size_t used = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || !(v >= 1.0) || v > 9.0e15 || std::floor(v) != v) {
    throw InvalidArgument(what + ": \"" + s + "\" is not a positive integer");
  }
  return static_cast<std::uint64_t>(v);
}

rotkit::UnitQuaternion unit_quaternion(const std::vector<double>& v, const std::string& what) {
  require_size(v, 4, what);
  const rotkit::Vec4 q(v[0], v[1], v[2], v[3]);
  if (std::abs(q.norm() - 1.0) > rotkit::kLooseUnitNormTol) {
    throw InvalidArgument(what + ": quaternion norm " + std::to_string(q.norm()) +
                          " is not 1");
  }
  return rotkit::UnitQuaternion::from_vector(q.normalized());
}

rotkit::ExpCoords exp_coords(const std::vector<double>& v, const std::string& what) {
  require_size(v, 3, what);
  const rotkit::Vec3 s(v[0], v[1], v[2]);
  return s.norm() <= rotkit::kPi ? rotkit::ExpCoords::constrained(s)
                                 : rotkit::ExpCoords::unconstrained(s);
}

rotkit::RotationMatrix rotation_matrix(const std::vector<double>& v, const std::string& what) {
  require_size(v, 9, what);
  rotkit::Mat3 m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = v[static_cast<std::size_t>(3 * r + c)];
  return rotkit::RotationMatrix::from(m);
}

json vec_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

struct Outcome {
  json parameters = json::object();
  json result;
  std::string summary;
  int exit_code = 0;
};

lipnet::Shape3 parse_shape3(const std::string& s) {
  const auto v = parse_vector(s, "--input-shape");
  require_size(v, 3, "--input-shape");
  for (double d : v) {
    if (d < 1 || std::floor(d) != d) throw InvalidArgument("--input-shape: bad dimension");
  }
  return {static_cast<std::size_t>(v[0]), static_cast<std::size_t>(v[1]),
          static_cast<std::size_t>(v[2])};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rotational distance ratio constants and Lipschitz bounds for pose networks"};
  app.require_subcommand(1);

  // dist
  std::string dist_repr, dist_p1, dist_p2;
  auto* dist = app.add_subcommand("dist", "Rotational distance between two rotations");
  dist->add_option("repr", dist_repr, "exp | quat | matrix")
      ->required()
      ->check(CLI::IsMember({"exp", "quat", "matrix"}));
  dist->add_option("p1", dist_p1, "comma-separated values or @file")->required();
  dist->add_option("p2", dist_p2, "comma-separated values or @file")->required();

  // drc
  std::string param = "exp-coords";
  std::string n_text = "1000000";
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  double shift_fraction = 0.5;
  std::optional<double> scale_floor;
  bool no_inject = false;
  auto* drc_cmd = app.add_subcommand("drc", "Monte Carlo supremum of the distance ratio");
  drc_cmd->add_option("--param", param, "parameterization")->capture_default_str();
  drc_cmd->add_option("--n", n_text, "number of sampled pairs (1e6 style accepted)")
      ->capture_default_str();
  drc_cmd->add_option("--seed", seed, "RNG seed")->capture_default_str();
  drc_cmd->add_option("--jobs", jobs, "worker threads")->envname("ROTSENSE_JOBS")
      ->check(CLI::PositiveNumber)->capture_default_str();
  drc_cmd->add_option("--shift-fraction", shift_fraction,
                      "exp-coords-unconstrained: probability of a 2*pi*n angle shift")
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();
  drc_cmd->add_option("--scale-floor", scale_floor,
                      "quaternion-unconstrained: sample raw scales in [floor, 1]");
  drc_cmd->add_flag("--no-inject", no_inject, "skip the known maximizers");

  // drc-planar
  std::size_t grid = 200;
  auto* planar = app.add_subcommand("drc-planar", "Grid search of the planar ratio");
  planar->add_option("--param", param, "exp-coords | exp-coords-unconstrained | quaternion")
      ->capture_default_str();
  planar->add_option("--grid", grid, "points per axis")->check(CLI::PositiveNumber)
      ->capture_default_str();

  // lipschitz
  std::string manifest;
  bool split = false;
  double tol = lipnet::kDefaultTol;
  auto* lip = app.add_subcommand("lipschitz", "Euclidean Lipschitz bound of a model");
  lip->add_option("manifest", manifest, "manifest.json")->required();
  lip->add_flag("--split-pose-head", split, "also bound rows 0-2 and 3-5 of the FC-6 head");
  lip->add_option("--tol", tol, "spectral norm tolerance")->check(CLI::PositiveNumber)
      ->capture_default_str();
  lip->add_option("--jobs", jobs, "worker threads")->envname("ROTSENSE_JOBS")
      ->check(CLI::PositiveNumber)->capture_default_str();

  // perturb
  std::optional<double> epsilon, target, l_e;
  std::string perturb_manifest;
  std::string perturb_param = "exp-coords";
  auto* perturb = app.add_subcommand("perturb", "Rotational perturbation bound");
  auto* eps_opt = perturb->add_option("--epsilon", epsilon, "input perturbation radius");
  auto* target_opt =
      perturb->add_option("--target-radians", target, "output radius to solve for");
  eps_opt->excludes(target_opt);
  auto* le_opt = perturb->add_option("--L-e", l_e, "Euclidean Lipschitz bound");
  auto* man_opt =
      perturb->add_option("--manifest", perturb_manifest, "compute L_e from a model");
  le_opt->excludes(man_opt);
  perturb->add_option("--param", perturb_param, "parameterization")->capture_default_str();
  perturb->add_option("--tol", tol, "spectral norm tolerance")->check(CLI::PositiveNumber);
  perturb->add_option("--jobs", jobs, "worker threads")->envname("ROTSENSE_JOBS")
      ->check(CLI::PositiveNumber);

  // demo-divergence
  std::string demo_kind;
  std::string eps_list = "1,1e-1,1e-2,1e-3,1e-4,1e-5,1e-6";
  std::string demo_q1 = "1,0,0,0", demo_q2 = "0,1,0,0";
  auto* demo = app.add_subcommand("demo-divergence",
                                  "Ratio blow-up of normalized parameterizations near 0");
  demo->add_option("kind", demo_kind, "unconstrained-quat | unit-norm")
      ->required()
      ->check(CLI::IsMember({"unconstrained-quat", "unit-norm"}));
  demo->add_option("--eps", eps_list, "scales")->capture_default_str();
  demo->add_option("--q1", demo_q1, "first 4-vector")->capture_default_str();
  demo->add_option("--q2", demo_q2, "second 4-vector")->capture_default_str();

  // make-reference
  std::string shape_text = "3,64,64";
  std::string out_dir;
  auto* make_ref = app.add_subcommand("make-reference",
                                      "Write the reference pose network with seeded weights");
  make_ref->add_option("--input-shape", shape_text, "c,h,w")->capture_default_str();
  make_ref->add_option("--seed", seed, "RNG seed")->capture_default_str();
  make_ref->add_option("--out", out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::Usage);
  }

  const CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  const auto start = std::chrono::steady_clock::now();
  Outcome out;

  try {
    if (sub == dist) {
      out.parameters = {{"repr", dist_repr}};
      const auto a = parse_vector(dist_p1, "p1");
      const auto b = parse_vector(dist_p2, "p2");
      out.parameters["p1"] = vec_json(a);
      out.parameters["p2"] = vec_json(b);
      double d = 0.0;
      if (dist_repr == "exp") {
        d = rotkit::dist_exp(exp_coords(a, "p1"), exp_coords(b, "p2"));
      } else if (dist_repr == "quat") {
        d = rotkit::dist_quat(unit_quaternion(a, "p1"), unit_quaternion(b, "p2"));
      } else {
        d = rotkit::dist_matrices(rotation_matrix(a, "p1"), rotation_matrix(b, "p2"));
      }
      out.result = {{"distance", number(d)}, {"degrees", number(d * 180.0 / rotkit::kPi)}};
      std::ostringstream s;
      s.precision(17);
      s << "distance " << d << " rad";
      out.summary = s.str();

    } else if (sub == drc_cmd) {
      const auto p = drc::parse_parameterization(param);
      const auto n = parse_count(n_text, "--n");
      drc::MonteCarloOptions opts;
      opts.jobs = jobs;
      opts.shift_fraction = shift_fraction;
      opts.scale_floor = scale_floor;
      opts.inject_achievers = !no_inject;
      out.parameters = {{"param", std::string(drc::to_string(p))},
                        {"n", n},
                        {"seed", seed},
                        {"jobs", jobs},
                        {"inject_achievers", !no_inject}};
      if (p == drc::Parameterization::ExpCoordsUnconstrained) {
        out.parameters["shift_fraction"] = shift_fraction;
      }
      if (scale_floor) out.parameters["scale_floor"] = *scale_floor;
      if (p == drc::Parameterization::QuaternionUnconstrained && !scale_floor) {
        out.result = {{"refused", true},
                      {"analytic_mu", number(drc::analytic_mu(p))},
                      {"reason",
                       "the distance ratio of unconstrained quaternions is unbounded: "
                       "scaling a fixed pair by eps multiplies the ratio by 1/eps"}};
        out.summary = "refused: mu = inf for quaternion-unconstrained "
                      "(see demo-divergence unconstrained-quat)";
        out.exit_code = static_cast<int>(ExitCode::UnboundedConstant);
      } else {
        const auto est = drc::monte_carlo_sup(p, n, seed, opts);
        out.result = jsonout::to_json(est);
        std::ostringstream s;
        s.precision(17);
        s << drc::to_string(p) << ": sup ratio " << est.sup_ratio << " (sampled "
          << est.sup_sampled << ", analytic " << est.analytic_mu << ")";
        out.summary = s.str();
      }

    } else if (sub == planar) {
      const auto p = drc::parse_parameterization(param);
      out.parameters = {{"param", std::string(drc::to_string(p))}, {"grid", grid}};
      const auto r = drc::planar_sup_search(p, grid);
      out.result = jsonout::to_json(r, p);
      std::ostringstream s;
      s.precision(17);
      s << drc::to_string(p) << ": planar sup " << r.value;
      out.summary = s.str();

    } else if (sub == lip) {
      out.parameters = {{"manifest", manifest},
                        {"split_pose_head", split},
                        {"tol", number(tol)},
                        {"jobs", jobs}};
      const auto model = netio::load_model(manifest);
      std::ostringstream s;
      s.precision(17);
      if (split) {
        const auto r = lipnet::pose_head_bounds(model, tol, jobs);
        out.result = {{"full", jsonout::to_json(r.full)},
                      {"position", jsonout::to_json(r.position)},
                      {"rotation", jsonout::to_json(r.rotation)}};
        s << "L_e full " << r.full.product_bound << ", position " << r.position.product_bound
          << ", rotation " << r.rotation.product_bound;
      } else {
        const auto r = lipnet::network_euclidean_bound(model, tol, jobs);
        out.result = jsonout::to_json(r);
        s << "L_e " << r.product_bound << " over " << r.per_layer.size() << " layers";
      }
      out.summary = s.str();

    } else if (sub == perturb) {
      if (!epsilon && !target) throw InvalidArgument("give --epsilon or --target-radians");
      if (!l_e && perturb_manifest.empty()) throw InvalidArgument("give --L-e or --manifest");
      const auto p = drc::parse_parameterization(perturb_param);
      out.parameters = {{"param", std::string(drc::to_string(p))}};
      if (epsilon) out.parameters["epsilon"] = number(*epsilon);
      if (target) out.parameters["target_radians"] = number(*target);
      double le = 0.0;
      if (l_e) {
        le = *l_e;
        out.parameters["L_e"] = number(le);
      } else {
        out.parameters["manifest"] = perturb_manifest;
        out.parameters["tol"] = number(tol);
        const auto model = netio::load_model(perturb_manifest);
        const auto last = model.layers().back().spec;
        const auto* fc = std::get_if<lipnet::FullyConnected>(&last);
        if (fc != nullptr && fc->out_features == 6) {
          le = lipnet::pose_head_bounds(model, tol, jobs).rotation.product_bound;
          out.parameters["L_e_source"] = "rotation head";
        } else {
          le = lipnet::network_euclidean_bound(model, tol, jobs).product_bound;
          out.parameters["L_e_source"] = "full network";
        }
      }
      auto rb = lipnet::rotational_bound(le, p);
      std::ostringstream s;
      s.precision(17);
      if (epsilon) {
        const auto pb = lipnet::perturbation_bound(*epsilon, le, p);
        rb.epsilon = *epsilon;
        rb.output_radius = pb.radians;
        rb.useful = pb.useful;
        s << "inputs within " << *epsilon << " move the rotation by at most " << pb.radians
          << " rad" << (pb.useful ? "" : " (not useful: >= pi)");
      } else {
        const auto inv = lipnet::inverse_perturbation(*target, le, p);
        if (inv.epsilon) {
          rb.epsilon = *inv.epsilon;
          s << "epsilon " << *inv.epsilon << " keeps the rotation within " << *target
            << " rad";
        } else {
          s << "L_e = 0: any input radius keeps the rotation within " << *target << " rad";
        }
        rb.output_radius = *target;
        rb.useful = true;
      }
      out.result = jsonout::to_json(rb);
      if (target && !rb.epsilon) out.result["epsilon"] = "inf";
      out.summary = s.str();

    } else if (sub == demo) {
      const auto eps = parse_vector(eps_list, "--eps");
      const auto a = parse_vector(demo_q1, "--q1");
      const auto b = parse_vector(demo_q2, "--q2");
      require_size(a, 4, "--q1");
      require_size(b, 4, "--q2");
      const rotkit::Vec4 u1(a[0], a[1], a[2], a[3]), u2(b[0], b[1], b[2], b[3]);
      out.parameters = {{"kind", demo_kind},
                        {"eps", vec_json(eps)},
                        {"q1", vec_json(a)},
                        {"q2", vec_json(b)}};
      const auto rows =
          demo_kind == "unconstrained-quat"
              ? drc::divergence_demo(rotkit::RawQuaternion::make(u1),
                                     rotkit::RawQuaternion::make(u2), eps)
              : drc::unit_norm_divergence_demo(u1, u2, eps);
      out.result = {{"rows", jsonout::to_json(rows)}};
      std::ostringstream s;
      s.precision(6);
      s << demo_kind << ":";
      for (const auto& r : rows) s << " eps=" << r.epsilon << " ratio=" << r.ratio << ";";
      out.summary = s.str();

    } else if (sub == make_ref) {
      const auto shape = parse_shape3(shape_text);
      out.parameters = {{"input_shape", {shape.c, shape.h, shape.w}},
                        {"seed", seed},
                        {"out", out_dir}};
      const auto model = netio::build_reference_architecture(shape, seed);
      const auto path = netio::save_model(model, out_dir);
      json shapes = json::array();
      for (const auto& sh : model.shapes()) shapes.push_back({sh.c, sh.h, sh.w});
      out.result = {{"manifest", path.string()},
                    {"layers", model.layers().size()},
                    {"activation_shapes", shapes}};
      out.summary = "wrote " + path.string();
    }
  } catch (const Error& e) {
    out.result = {{"error", {{"kind", to_string(e.kind())}, {"message", e.what()}}}};
    if (const auto* cf = dynamic_cast<const ConvergenceFailure*>(&e)) {
      out.result["error"]["best_estimate"] = number(cf->best_estimate());
      out.result["error"]["iterations"] = cf->iterations();
      if (cf->layer_index() >= 0) out.result["error"]["layer_index"] = cf->layer_index();
    }
    out.summary = std::string("error (") + to_string(e.kind()) + "): " + e.what();
    out.exit_code = static_cast<int>(exit_code_for(e.kind()));
  } catch (const std::exception& e) {
    out.result = {{"error", {{"kind", "internal"}, {"message", e.what()}}}};
    out.summary = std::string("internal error: ") + e.what();
    out.exit_code = static_cast<int>(ExitCode::Internal);
  }

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const json doc = {{"command", command},
                    {"parameters", out.parameters},
                    {"result", out.result},
                    {"wall_time_s", wall}};
  std::cout << jsonout::dump(doc, 2) << '\n';
  std::cerr << out.summary << '\n';
  return out.exit_code;
}
