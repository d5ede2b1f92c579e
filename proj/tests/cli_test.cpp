// Copyright 2026 The pbdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>
#include <json.hpp>

#ifndef PBD_CLI_PATH
#define PBD_CLI_PATH "./pbdp"
#endif

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(PBD_CLI_PATH) + " " + args + " 2>/dev/null";
  std::array<char, 4096> buffer{};
  RunResult res;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::size_t got;
  while ((got = fread(buffer.data(), 1, buffer.size(), pipe)) > 0)
    res.out.append(buffer.data(), got);
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

}  // namespace

TEST_CASE("fit command emits the worked values") {
  const auto res = run("fit --model bernoulli --n 10 --p 0.1");
  CHECK(res.exit_code == 0);
  const auto j = nlohmann::json::parse(res.out);
  CHECK(j.at("a").get<double>() == doctest::Approx(1.125).epsilon(1e-12));
  CHECK(j.at("beta").get<double>() == doctest::Approx(0.1388888888888889).epsilon(1e-9));
  CHECK(j.at("regime").get<std::string>() == "underdispersed");

  const auto runs = run("fit --model runs --n 100 --k 2 --p 0.3");
  const auto jr = nlohmann::json::parse(runs.out);
  CHECK(jr.at("a").get<double>() == doctest::Approx(6.76692).epsilon(1e-5));
  CHECK(jr.at("b").get<double>() == doctest::Approx(0.24812).epsilon(1e-4));
}

TEST_CASE("fit rejection surfaces as a machine-readable error with exit code") {
  const auto res = run("fit --model bernoulli --n 10 --p 0.6");
  CHECK(res.exit_code == 2);
  const auto j = nlohmann::json::parse(res.out);
  CHECK(j.contains("error"));
}

TEST_CASE("stochastic commands demand a seed") {
  const auto res = run("sample --model bernoulli --n 5 --p 0.2 --n-samples 3");
  CHECK(res.exit_code == 1);
}

TEST_CASE("sample emits one sorted pattern per line") {
  const auto res = run("sample --model bernoulli --n 5 --p 0.4 --n-samples 4 --seed 7");
  CHECK(res.exit_code == 0);
  int lines = 0;
  std::istringstream in(res.out);
  std::string line;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    const auto pts = j.at("points").get<std::vector<double>>();
    for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i - 1] <= pts[i]);
    ++lines;
  }
  CHECK(lines == 4);
}

TEST_CASE("outputs are byte-identical for identical config and seed") {
  const std::string args =
      "d2 --model bernoulli --n 6 --p 0.2 --n-samples 40 --seed 99";
  const auto first = run(args);
  const auto second = run(args);
  CHECK(first.exit_code == 0);
  CHECK(first.out == second.out);
  CHECK(first.out.find("empirical-OT") != std::string::npos);
  // Every stochastic row carries the seed.
  CHECK(first.out.find(",99") != std::string::npos);
}

TEST_CASE("self-distance with shared streams is exactly zero") {
  {
    std::ofstream cfg("cli_test_selfd2.json");
    cfg << R"({"pbdp":  {"a": 0.5, "b": 0.0, "beta": 0.2, "space": {"sites": [[0,0.5],[0.5,0]]}, "nu": [[0,0.5],[1,0.5]]},
               "pbdp2": {"a": 0.5, "b": 0.0, "beta": 0.2, "space": {"sites": [[0,0.5],[0.5,0]]}, "nu": [[0,0.5],[1,0.5]]}})";
  }
  const auto res =
      run("d2 --config cli_test_selfd2.json --shared-streams --n-samples 30 --seed 5");
  CHECK(res.exit_code == 0);
  std::istringstream in(res.out);
  std::string line;
  std::getline(in, line);  // header
  bool saw_empirical = false, saw_bound = false;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    const std::string method = line.substr(0, comma);
    const double value = std::stod(line.substr(comma + 1));
    if (method == "empirical-OT") {
      CHECK(value == 0.0);
      saw_empirical = true;
    }
    if (method == "coupling-bound") {
      CHECK(value <= 1e-9);  // upper estimate includes the truncation tails
      saw_bound = true;
    }
  }
  CHECK(saw_empirical);
  CHECK(saw_bound);
  std::remove("cli_test_selfd2.json");
}

TEST_CASE("exact enumeration row on a tiny instance") {
  const auto res =
      run("d2 --model bernoulli --n 3 --p 0.15 --n-samples 60 --seed 11 --exact");
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("exact-enumeration") != std::string::npos);
}

TEST_CASE("verify chain suite passes") {
  const auto res = run("verify --suite chain --seed 3");
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("poisson_reduction_sup_error") != std::string::npos);
  CHECK(res.out.find(",0\n") == std::string::npos);  // no failing rows
}

TEST_CASE("sweep writes rows and plot data") {
  {
    std::ofstream cfg("cli_test_sweep.json");
    cfg << R"({"sweep": "runs_p", "n": 60, "k": 2, "p": [0.2, 0.4]})";
  }
  const auto res = run(
      "sweep --config cli_test_sweep.json --seed 21 --n-samples 24 --out cli_test_sweep.csv "
      "--plot-out cli_test_sweep.plot");
  CHECK(res.exit_code == 0);
  std::ifstream csv("cli_test_sweep.csv");
  std::string all((std::istreambuf_iterator<char>(csv)), std::istreambuf_iterator<char>());
  CHECK(all.find("bound_shape") != std::string::npos);
  CHECK(all.find("d2_fitted") != std::string::npos);
  std::ifstream plot("cli_test_sweep.plot");
  std::string pall((std::istreambuf_iterator<char>(plot)), std::istreambuf_iterator<char>());
  CHECK(pall.find("# d2_fitted") != std::string::npos);
  std::remove("cli_test_sweep.json");
  std::remove("cli_test_sweep.csv");
  std::remove("cli_test_sweep.plot");
}
