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

#ifndef PBD_JSON_IO_HPP_
#define PBD_JSON_IO_HPP_

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pbd/bounds.hpp"
#include "pbd/carrier.hpp"
#include "pbd/fitting.hpp"
#include "pbd/models.hpp"
#include "pbd/sim.hpp"

namespace pbd::io {

using nlohmann::json;

json pattern_to_json(const carrier::PointPattern& pattern);
carrier::PointPattern pattern_from_json(const json& j);

json measure_to_json(const carrier::DiscreteMeasure& measure);
carrier::DiscreteMeasure measure_from_json(const json& j);

json space_to_json(const carrier::CarrierSpace& space);
carrier::CarrierSpace space_from_json(const json& j);

// {"model": "bernoulli" | "runs" | "cp", ...}
models::ModelSpec model_from_json(const json& j);
json model_to_json(const models::ModelSpec& model);

json fit_to_json(const fitting::FitResult& fit);

json pbdp_to_json(const sim::PbdpSpec& spec);
sim::PbdpSpec pbdp_from_json(const json& j);

json event_to_json(const sim::Event& event);

json bound_report_to_json(const bounds::BoundReport& report);

// RFC 4180 CSV writer: comma separator, '.' decimal point, LF line endings,
// quoting only where required.  Doubles are rendered shortest-round-trip.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void header(const std::vector<std::string>& names);
  void row(const std::vector<std::string>& cells);
  static std::string number(double value);

 private:
  std::ostream& out_;
};

}  // namespace pbd::io

#endif  // PBD_JSON_IO_HPP_
