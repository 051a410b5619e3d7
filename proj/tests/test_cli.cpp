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

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "rotsense/errors.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using rotsense::ExitCode;

namespace {

const std::string kCli = ROTSENSE_CLI;
const fs::path kFixtures = ROTSENSE_FIXTURES;
constexpr double kPi = 3.14159265358979323846;

struct Run {
  int code = -1;
  json doc;
};

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + kCli + " " + args + " 2>/dev/null";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = ::pclose(pipe);
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  if (!out.empty() && out[0] == '{') r.doc = json::parse(out);
  return r;
}

int code(ExitCode c) { return static_cast<int>(c); }

double num(const json& v) { return v.get<double>(); }

}  // namespace

TEST_CASE("dist") {
  auto r = run("dist exp 0,0,0 0,0,1.5707963");
  REQUIRE(r.code == 0);
  CHECK(r.doc["command"] == "dist");
  CHECK(num(r.doc["result"]["distance"]) == doctest::Approx(1.5707963).epsilon(1e-12));

  r = run("dist quat 1,0,0,0 0,1,0,0");
  REQUIRE(r.code == 0);
  CHECK(num(r.doc["result"]["distance"]) == doctest::Approx(kPi).epsilon(1e-15));

  // Rotation matrices read from files match the exp answer for the same pair.
  const fs::path dir = fs::temp_directory_path() / ("rotsense_cli_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  {
    std::ofstream(dir / "a.txt") << "1 0 0\n0 1 0\n0 0 1\n";
    const double c = std::cos(0.7), s = std::sin(0.7);
    std::ofstream out(dir / "b.txt");
    out.precision(17);
    out << c << ", " << -s << ", 0\n" << s << ", " << c << ", 0\n0, 0, 1\n";
  }
  r = run("dist matrix @" + (dir / "a.txt").string() + " @" + (dir / "b.txt").string());
  REQUIRE(r.code == 0);
  const double via_matrix = num(r.doc["result"]["distance"]);
  r = run("dist exp 0,0,0 0,0,0.7");
  CHECK(via_matrix == doctest::Approx(num(r.doc["result"]["distance"])).epsilon(1e-12));
  fs::remove_all(dir);

  r = run("dist exp 0,x,0 0,0,1");
  CHECK(r.code == code(ExitCode::InvalidArgument));
  CHECK(r.doc["result"]["error"]["message"].get<std::string>().find("position 2") !=
        std::string::npos);
  CHECK(run("dist exp 0,0 0,0,1").code == code(ExitCode::InvalidArgument));
  CHECK(run("dist euler 0,0,0 0,0,1").code == code(ExitCode::Usage));
  CHECK(run("dist exp @/no/such/file 0,0,1").code == code(ExitCode::MissingFile));
}

TEST_CASE("drc") {
  auto r = run("drc --param exp-coords --n 1e4 --seed 3");
  REQUIRE(r.code == 0);
  CHECK(r.doc["parameters"]["n"] == 10000);
  CHECK(r.doc["parameters"]["seed"] == 3);
  CHECK(num(r.doc["result"]["sup_ratio"]) == doctest::Approx(1.0).epsilon(1e-12));

  r = run("drc --param quaternion --n 1e4");
  REQUIRE(r.code == 0);
  CHECK(num(r.doc["result"]["sup_ratio"]) == doctest::Approx(kPi / std::sqrt(2.0)).epsilon(1e-12));

  r = run("drc --param quaternion-unconstrained --n 1e4");
  CHECK(r.code == code(ExitCode::UnboundedConstant));
  CHECK(r.doc["result"]["refused"] == true);
  CHECK(r.doc["result"]["analytic_mu"] == "inf");

  CHECK(run("drc --param exp --n 0").code == code(ExitCode::InvalidArgument));
  CHECK(run("drc --param exp --n 1.5").code == code(ExitCode::InvalidArgument));
  CHECK(run("drc --param rodrigues").code == code(ExitCode::InvalidArgument));
}

TEST_CASE("drc results do not depend on jobs, and ROTSENSE_JOBS sets the default") {
  const auto a = run("drc --param exp-coords-unconstrained --n 20000 --seed 8 --jobs 1");
  const auto b = run("drc --param exp-coords-unconstrained --n 20000 --seed 8", "ROTSENSE_JOBS=3");
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  CHECK(b.doc["parameters"]["jobs"] == 3);
  CHECK(a.doc["result"] == b.doc["result"]);
  const auto c = run("drc --param exp-coords-unconstrained --n 20000 --seed 8 --jobs 2",
                     "ROTSENSE_JOBS=3");
  CHECK(c.doc["parameters"]["jobs"] == 2);
}

TEST_CASE("drc-planar") {
  const auto r = run("drc-planar --param quaternion --grid 500");
  REQUIRE(r.code == 0);
  CHECK(std::abs(num(r.doc["result"]["arg"][0]) - std::sqrt(2.0)) <=
        num(r.doc["result"]["grid_step"]));
  CHECK(num(r.doc["result"]["value"]) == doctest::Approx(kPi / std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("lipschitz") {
  auto r = run("lipschitz " + (kFixtures / "toy_fc" / "manifest.json").string());
  REQUIRE(r.code == 0);
  CHECK(num(r.doc["result"]["product_bound"]) == doctest::Approx(6.0).epsilon(1e-8));
  CHECK(r.doc["result"]["per_layer"].size() == 2);
  CHECK(r.doc["result"]["per_layer"][0]["method"] == "lanczos-dense");

  r = run("lipschitz --split-pose-head --tol 1e-10 " +
          (kFixtures / "fc6" / "manifest.json").string());
  REQUIRE(r.code == 0);
  CHECK(r.doc["result"]["position"]["subnet"] == "position");
  CHECK(r.doc["result"]["rotation"]["subnet"] == "rotation");
  CHECK(num(r.doc["result"]["rotation"]["product_bound"]) <=
        num(r.doc["result"]["full"]["product_bound"]) + 1e-10);

  CHECK(run("lipschitz /no/such/manifest.json").code == code(ExitCode::MissingFile));
  CHECK(run("lipschitz --split-pose-head " + (kFixtures / "toy_fc" / "manifest.json").string())
            .code == code(ExitCode::InvalidArgument));
}

TEST_CASE("reference architecture smoke run") {
  const fs::path dir = fs::temp_directory_path() / ("rotsense_ref_" + std::to_string(::getpid()));
  auto r = run("make-reference --input-shape 3,64,64 --seed 1 --out " + dir.string());
  REQUIRE(r.code == 0);
  CHECK(r.doc["result"]["layers"] == 12);
  r = run("lipschitz --split-pose-head " + (dir / "manifest.json").string());
  REQUIRE(r.code == 0);
  CHECK(r.doc["result"]["full"]["per_layer"].size() == 12);
  const double full = num(r.doc["result"]["full"]["product_bound"]);
  const double rot = num(r.doc["result"]["rotation"]["product_bound"]);
  CHECK(std::isfinite(full));
  CHECK(full > 0.0);
  CHECK(rot <= full);
  fs::remove_all(dir);
  CHECK(run("make-reference --input-shape 3,16,16 --out " + dir.string()).code ==
        code(ExitCode::InvalidArgument));
}

TEST_CASE("perturb") {
  auto r = run("perturb --epsilon 1.1e-11 --L-e 84e9 --param exp-unconstrained");
  REQUIRE(r.code == 0);
  CHECK(num(r.doc["result"]["output_radius"]) == doctest::Approx(0.924).epsilon(1e-12));
  CHECK(num(r.doc["result"]["output_radius"]) <= 1.0);
  CHECK(r.doc["result"]["useful"] == true);

  r = run("perturb --target-radians 1 --L-e 84e9");
  REQUIRE(r.code == 0);
  CHECK(num(r.doc["result"]["epsilon"]) == doctest::Approx(1.19e-11).epsilon(0.01));

  r = run("perturb --epsilon 1 --L-e 5 --param exp");
  REQUIRE(r.code == 0);
  CHECK(r.doc["result"]["useful"] == false);

  r = run("perturb --epsilon 0.1 --manifest " + (kFixtures / "toy_fc" / "manifest.json").string());
  REQUIRE(r.code == 0);
  CHECK(num(r.doc["result"]["euclidean_bound"]) == doctest::Approx(6.0).epsilon(1e-8));

  CHECK(run("perturb --epsilon 1 --L-e 5 --param quaternion-unconstrained").code ==
        code(ExitCode::UnboundedConstant));
  CHECK(run("perturb --L-e 5").code == code(ExitCode::InvalidArgument));
  CHECK(run("perturb --epsilon 1 --target-radians 1 --L-e 5").code == code(ExitCode::Usage));
}

TEST_CASE("demo-divergence") {
  auto r = run("demo-divergence unconstrained-quat");
  REQUIRE(r.code == 0);
  const auto& rows = r.doc["result"]["rows"];
  REQUIRE(rows.size() == 7);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(num(rows[i]["ratio"]) / num(rows[i - 1]["ratio"]) == doctest::Approx(10.0).epsilon(1e-9));
  }
  r = run("demo-divergence unit-norm --eps 1,0.5");
  REQUIRE(r.code == 0);
  CHECK(num(r.doc["result"]["rows"][1]["ratio"]) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("output is reproducible apart from wall time") {
  auto a = run("drc --param quaternion --n 5000 --seed 4");
  auto b = run("drc --param quaternion --n 5000 --seed 4");
  a.doc.erase("wall_time_s");
  b.doc.erase("wall_time_s");
  CHECK(a.doc == b.doc);
  CHECK(run("").code == code(ExitCode::Usage));
  CHECK(run("--help").code == 0);
}
