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

#include "pbd/json_io.hpp"

#include <sstream>

#include <doctest.h>

#include "pbd/rng.hpp"

using namespace pbd;

TEST_CASE("serialization round-trips preserve values exactly") {
  rng::Stream rng(314159);
  for (int trial = 0; trial < 200; ++trial) {
    // Patterns.
    std::vector<double> pts;
    for (std::uint64_t i = 0, n = rng.uniform_index(7); i < n; ++i)
      pts.push_back(rng.uniform());
    const carrier::PointPattern pattern{std::move(pts)};
    CHECK(io::pattern_from_json(io::pattern_to_json(pattern)) == pattern);

    // Measures (atoms merge on construction, so round-trips are fixed points).
    std::vector<std::pair<carrier::Point, double>> atoms;
    for (std::uint64_t i = 0, n = 1 + rng.uniform_index(5); i < n; ++i)
      atoms.emplace_back(rng.uniform(), rng.uniform());
    const carrier::DiscreteMeasure measure{std::move(atoms)};
    const auto back = io::measure_from_json(io::measure_to_json(measure));
    CHECK(back.atoms() == measure.atoms());
    CHECK(back.total() == measure.total());
  }
}

TEST_CASE("model specs round-trip through their JSON schema") {
  const std::vector<models::ModelSpec> cases = {
      models::ModelSpec{models::BernoulliModel(5, std::vector<double>{0.1, 0.3, 0.2, 0.4, 0.25})},
      models::ModelSpec{models::RunsModel(17, 3, 0.45)},
      models::ModelSpec{models::CompoundPoissonModel(
          carrier::CarrierSpace::circle(),
          {carrier::DiscreteMeasure({{0.1, 0.5}}), carrier::DiscreteMeasure({{0.6, 0.25}})})}};
  for (const auto& model : cases) {
    const auto restored = io::model_from_json(io::model_to_json(model));
    CHECK(io::model_to_json(restored) == io::model_to_json(model));
  }
}

TEST_CASE("processes round-trip including finite-site spaces") {
  Matrix d(3, 3);
  d(0, 1) = d(1, 0) = 0.25;
  d(1, 2) = d(2, 1) = 0.25;
  d(0, 2) = d(2, 0) = 0.5;
  const sim::PbdpSpec spec(chain::BirthDeathParams(1.25, 0.1, 0.3),
                           carrier::CarrierSpace::finite_sites(d),
                           carrier::DiscreteMeasure({{0.0, 0.25}, {1.0, 0.5}, {2.0, 0.25}}));
  const auto restored = io::pbdp_from_json(io::pbdp_to_json(spec));
  CHECK(restored.params.a == spec.params.a);
  CHECK(restored.params.beta == spec.params.beta);
  CHECK(restored.nu.atoms() == spec.nu.atoms());
  CHECK(restored.space.site_count() == 3);
  CHECK(restored.space.distance(0.0, 2.0) == 0.5);
}

TEST_CASE("CSV writer quotes only where needed and renders numbers tersely") {
  std::ostringstream os;
  io::CsvWriter csv(os);
  csv.header({"name", "value"});
  csv.row({"plain", io::CsvWriter::number(0.1)});
  csv.row({"with,comma", "with\"quote"});
  CHECK(os.str() == "name,value\nplain,0.1\n\"with,comma\",\"with\"\"quote\"\n");
}

TEST_CASE("bound reports serialize their three sections") {
  bounds::BoundReport report;
  report.exact_terms["2*d0(G)"] = 0.25;
  report.order_terms["model_shape"] = 0.5;
  report.mc_terms["site_integral"] = {1.5, 0.1};
  const auto j = io::bound_report_to_json(report);
  CHECK(j.at("exact").at("2*d0(G)").get<double>() == 0.25);
  CHECK(j.at("order").at("model_shape").get<double>() == 0.5);
  CHECK(j.at("mc").at("site_integral").at("estimate").get<double>() == 1.5);
  CHECK(j.at("total_excluding_order").get<double>() == doctest::Approx(1.75));
}
