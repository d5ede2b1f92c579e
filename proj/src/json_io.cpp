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

#include <stdexcept>

namespace pbd::io {

json pattern_to_json(const carrier::PointPattern& pattern) {
  return json{{"points", pattern.points()}};
}

carrier::PointPattern pattern_from_json(const json& j) {
  return carrier::PointPattern(j.at("points").get<std::vector<double>>());
}

json measure_to_json(const carrier::DiscreteMeasure& measure) {
  json atoms = json::array();
  for (const auto& [x, w] : measure.atoms()) atoms.push_back(json::array({x, w}));
  return json{{"atoms", atoms}};
}

carrier::DiscreteMeasure measure_from_json(const json& j) {
  std::vector<std::pair<carrier::Point, double>> atoms;
  for (const auto& pair : j.at("atoms"))
    atoms.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
  return carrier::DiscreteMeasure(std::move(atoms));
}

json space_to_json(const carrier::CarrierSpace& space) {
  switch (space.kind()) {
    case carrier::SpaceKind::unit_interval: return json("unit_interval");
    case carrier::SpaceKind::circle: return json("circle");
    case carrier::SpaceKind::finite_sites: {
      const int n = space.site_count();
      json rows = json::array();
      for (int i = 0; i < n; ++i) {
        json row = json::array();
        for (int j2 = 0; j2 < n; ++j2)
          row.push_back(space.distance(static_cast<double>(i), static_cast<double>(j2)));
        rows.push_back(row);
      }
      return json{{"sites", rows}};
    }
  }
  throw std::logic_error("space_to_json: unknown kind");
}

carrier::CarrierSpace space_from_json(const json& j) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "unit_interval") return carrier::CarrierSpace::unit_interval();
    if (name == "circle") return carrier::CarrierSpace::circle();
    throw std::invalid_argument("space_from_json: unknown space '" + name + "'");
  }
  const auto rows = j.at("sites").get<std::vector<std::vector<double>>>();
  Matrix dist(rows.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size())
      throw std::invalid_argument("space_from_json: distance matrix must be square");
    for (std::size_t k = 0; k < rows.size(); ++k) dist(i, k) = rows[i][k];
  }
  return carrier::CarrierSpace::finite_sites(std::move(dist));
}

models::ModelSpec model_from_json(const json& j) {
  const std::string kind = j.at("model").get<std::string>();
  if (kind == "bernoulli") {
    const int n = j.at("n").get<int>();
    if (j.at("p").is_array())
      return models::BernoulliModel(n, j.at("p").get<std::vector<double>>());
    return models::BernoulliModel(n, j.at("p").get<double>());
  }
  if (kind == "runs") {
    return models::RunsModel(j.at("n").get<int>(), j.at("k").get<int>(),
                             j.at("p").get<double>());
  }
  if (kind == "cp") {
    carrier::CarrierSpace space = j.contains("space")
                                      ? space_from_json(j.at("space"))
                                      : carrier::CarrierSpace::unit_interval();
    std::vector<carrier::DiscreteMeasure> mus;
    for (const auto& mj : j.at("mus")) mus.push_back(measure_from_json(mj));
    return models::CompoundPoissonModel(std::move(space), std::move(mus));
  }
  throw std::invalid_argument("model_from_json: unknown model '" + kind + "'");
}

json model_to_json(const models::ModelSpec& model) {
  return std::visit(
      [](const auto& m) -> json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, models::BernoulliModel>) {
          return json{{"model", "bernoulli"}, {"n", m.n}, {"p", m.p}};
        } else if constexpr (std::is_same_v<T, models::RunsModel>) {
          return json{{"model", "runs"}, {"n", m.n}, {"k", m.k}, {"p", m.p}};
        } else {
          json mus = json::array();
          for (const auto& mu : m.mus) mus.push_back(measure_to_json(mu));
          return json{{"model", "cp"}, {"space", space_to_json(m.space)}, {"mus", mus}};
        }
      },
      model);
}

json fit_to_json(const fitting::FitResult& fit) {
  json nu = json::array();
  for (const auto& [x, w] : fit.spec.nu.atoms()) nu.push_back(json::array({x, w}));
  return json{{"a", fit.spec.params.a},
              {"b", fit.spec.params.b},
              {"beta", fit.spec.params.beta},
              {"nu", nu},
              {"regime", fitting::regime_name(fit.regime)},
              {"diagnostics", fit.diagnostics}};
}

json pbdp_to_json(const sim::PbdpSpec& spec) {
  json nu = json::array();
  for (const auto& [x, w] : spec.nu.atoms()) nu.push_back(json::array({x, w}));
  return json{{"a", spec.params.a},
              {"b", spec.params.b},
              {"beta", spec.params.beta},
              {"space", space_to_json(spec.space)},
              {"nu", nu}};
}

sim::PbdpSpec pbdp_from_json(const json& j) {
  chain::BirthDeathParams params(j.at("a").get<double>(), j.at("b").get<double>(),
                                 j.at("beta").get<double>());
  carrier::CarrierSpace space = j.contains("space") ? space_from_json(j.at("space"))
                                                    : carrier::CarrierSpace::unit_interval();
  std::vector<std::pair<carrier::Point, double>> atoms;
  for (const auto& pair : j.at("nu"))
    atoms.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
  return sim::PbdpSpec(params, std::move(space), carrier::DiscreteMeasure(std::move(atoms)));
}

json event_to_json(const sim::Event& event) {
  const char* kind = "?";
  switch (event.kind) {
    case sim::EventKind::immigration: kind = "immigration"; break;
    case sim::EventKind::birth: kind = "birth"; break;
    case sim::EventKind::natural_death: kind = "natural-death"; break;
    case sim::EventKind::kill: kind = "kill"; break;
  }
  return json{{"time", event.time}, {"kind", kind}, {"point", event.point}};
}

json bound_report_to_json(const bounds::BoundReport& report) {
  json mc = json::object();
  for (const auto& [name, term] : report.mc_terms)
    mc[name] = json{{"estimate", term.estimate}, {"stderr", term.stderr_}};
  return json{{"exact", report.exact_terms},
              {"order", report.order_terms},
              {"mc", mc},
              {"meta", report.meta},
              {"total_excluding_order", report.total_excluding_order()}};
}

void CsvWriter::header(const std::vector<std::string>& names) { row(names); }

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    const std::string& cell = cells[i];
    const bool needs_quotes =
        cell.find_first_of(",\"\n\r") != std::string::npos;
    if (!needs_quotes) {
      out_ << cell;
      continue;
    }
    out_ << '"';
    for (char c : cell) {
      if (c == '"') out_ << '"';
      out_ << c;
    }
    out_ << '"';
  }
  out_ << '\n';
}

std::string CsvWriter::number(double value) { return json(value).dump(); }

}  // namespace pbd::io
