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

// Batch experiment driver: fit models, sample, estimate process distances,
// verify module invariants, and run parameter sweeps with machine-readable
// (JSON / RFC-4180 CSV) outputs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pbd/bounds.hpp"
#include "pbd/chain.hpp"
#include "pbd/distance.hpp"
#include "pbd/fitting.hpp"
#include "pbd/json_io.hpp"
#include "pbd/models.hpp"
#include "pbd/parallel.hpp"
#include "pbd/sim.hpp"

namespace {

using nlohmann::json;
using namespace pbd;

struct OutputTarget {
  std::string path;  // empty = stdout
  std::unique_ptr<std::ostream> stream;

  std::ostream& open() {
    if (path.empty()) return std::cout;
    if (!stream) {
      stream = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*stream) throw std::runtime_error("cannot open output file: " + path);
    }
    return *stream;
  }
};

json load_config(const std::string& config_path, const std::string& model_inline) {
  json cfg = json::object();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot read config file: " + config_path);
    in >> cfg;
  }
  if (!model_inline.empty()) {
    if (model_inline.front() == '{')
      cfg["model"] = json::parse(model_inline);
    else
      cfg["model"] = model_inline;  // bare name, resolved with --n/--k/--p
  }
  return cfg;
}

models::ModelSpec model_from_config(const json& cfg, int n, int k, double p) {
  if (!cfg.contains("model"))
    throw std::runtime_error("no model given; pass --model or a config with a \"model\" key");
  if (cfg.at("model").is_string()) {
    const std::string kind = cfg.at("model").get<std::string>();
    if (kind == "bernoulli") return models::BernoulliModel(n, p);
    if (kind == "runs") return models::RunsModel(n, k, p);
    throw std::runtime_error("bare --model supports bernoulli|runs; use JSON for cp");
  }
  return io::model_from_json(cfg.at("model"));
}

std::string fmt(double v) { return io::CsvWriter::number(v); }

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

int cmd_fit(const json& cfg, int n, int k, double p, OutputTarget& out) {
  const models::ModelSpec model = model_from_config(cfg, n, k, p);
  try {
    const fitting::FitResult fit = fitting::fit_model(model);
    out.open() << io::fit_to_json(fit).dump(2) << "\n";
    return 0;
  } catch (const fitting::FitError& err) {
    out.open() << json{{"error", err.what()}}.dump(2) << "\n";
    return 2;
  }
}

// ---------------------------------------------------------------------------
// sample
// ---------------------------------------------------------------------------

int cmd_sample(const json& cfg, int n, int k, double p, std::uint64_t seed,
               std::int64_t n_samples, double horizon, OutputTarget& out) {
  std::ostream& os = out.open();
  if (horizon > 0) {
    // Trajectory dump: one header object, then one event per line.
    const sim::PbdpSpec spec = cfg.contains("pbdp")
                                   ? io::pbdp_from_json(cfg.at("pbdp"))
                                   : fitting::fit_model(model_from_config(cfg, n, k, p)).spec;
    rng::Stream s = rng::Stream::substream(seed, 0);
    const auto traj = sim::simulate_system(spec, carrier::PointPattern(), horizon, s);
    os << json{{"seed", seed},
               {"horizon", horizon},
               {"initial", traj.initial.points()}}
              .dump()
       << "\n";
    for (const auto& ev : traj.events) os << io::event_to_json(ev).dump() << "\n";
    return 0;
  }
  if (cfg.contains("pbdp")) {
    const sim::PbdpSpec spec = io::pbdp_from_json(cfg.at("pbdp"));
    const sim::PbdpSampler sampler(spec);
    for (std::int64_t i = 0; i < n_samples; ++i) {
      rng::Stream s = rng::Stream::substream(seed, static_cast<std::uint64_t>(i));
      os << io::pattern_to_json(sampler(s)).dump() << "\n";
    }
  } else {
    const models::ModelSpec model = model_from_config(cfg, n, k, p);
    for (std::int64_t i = 0; i < n_samples; ++i) {
      rng::Stream s = rng::Stream::substream(seed, static_cast<std::uint64_t>(i));
      os << io::pattern_to_json(models::sample(model, s)).dump() << "\n";
    }
  }
  std::cerr << "sample: seed=" << seed << " n_samples=" << n_samples << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// d2
// ---------------------------------------------------------------------------

distance::Sampler model_sampler(const models::ModelSpec& model) {
  return [model](rng::Stream& rng) { return models::sample(model, rng); };
}

int cmd_d2(const json& cfg, int n, int k, double p, std::uint64_t seed,
           std::int64_t n_samples, const std::string& against, bool exact,
           bool shared_streams, OutputTarget& out) {
  std::ostream& os = out.open();
  io::CsvWriter csv(os);
  csv.header({"method", "value", "stderr", "n_samples", "seed"});
  const auto emit = [&](const distance::D2Estimate& est) {
    csv.row({distance::method_name(est.method), fmt(est.value), fmt(est.stderr_),
             std::to_string(est.n_samples), std::to_string(seed)});
  };
  const std::uint64_t seed1 = rng::mix64(seed + 1);
  const std::uint64_t seed2 = shared_streams ? seed1 : rng::mix64(seed + 2);

  if (cfg.contains("pbdp") && cfg.contains("pbdp2")) {
    const sim::PbdpSpec s1 = io::pbdp_from_json(cfg.at("pbdp"));
    const sim::PbdpSpec s2 = io::pbdp_from_json(cfg.at("pbdp2"));
    if (!s1.space.same_kind(s2.space))
      throw std::runtime_error("d2: the two processes live on incompatible carrier spaces");
    const sim::PbdpSampler sampler1(s1), sampler2(s2);
    emit(distance::empirical_d2(s1.space, sampler1, sampler2,
                                static_cast<int>(n_samples), seed1, seed2));
    distance::D2Estimate bound;
    bound.method = distance::Method::coupling_bound;
    bound.value = distance::coupling_bound(s1, s2);
    emit(bound);
    return 0;
  }

  const models::ModelSpec model = model_from_config(cfg, n, k, p);
  const fitting::FitResult fit =
      against == "poisson" ? fitting::fit_poisson(model) : fitting::fit_model(model);
  const sim::PbdpSampler pbdp_sampler(fit.spec);
  emit(distance::empirical_d2(models::space_of(model), model_sampler(model), pbdp_sampler,
                              static_cast<int>(n_samples), seed1, seed2));

  if (exact) {
    const auto* bern = std::get_if<models::BernoulliModel>(&model);
    if (bern == nullptr || bern->n > 4)
      throw std::runtime_error("--exact needs an independent-indicator model with n <= 4");
    const distance::ConfigDistribution target = distance::enumerate_bernoulli(*bern);
    const std::vector<carrier::Point> sites = models::site_points(model);
    const sim::PbdpSpec pinned = distance::to_site_space(fit.spec, sites);
    const distance::ConfigDistribution approx = distance::enumerate_pbdp(pinned, 10);
    emit(distance::exact_d2_small(target, approx));
  }
  return 0;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct CheckRecorder {
  io::CsvWriter csv;
  int failures = 0;

  explicit CheckRecorder(std::ostream& os) : csv(os) {
    csv.header({"suite", "check", "observed", "required", "pass"});
  }
  void record(const std::string& suite, const std::string& check, double observed,
              double required, bool pass) {
    csv.row({suite, check, fmt(observed), fmt(required), pass ? "1" : "0"});
    if (!pass) ++failures;
  }
};

std::vector<chain::BirthDeathParams> parameter_grid() {
  std::vector<chain::BirthDeathParams> grid;
  for (const double a : {0.2, 0.7, 1.5, 4.0, 9.0})
    for (const double b : {0.0, 0.35})
      for (const double beta : {0.0, 0.08}) grid.emplace_back(a, b, beta);
  return grid;
}

void verify_chain(CheckRecorder& rec) {
  {
    const auto dist = chain::stationary(chain::BirthDeathParams(2, 0, 0), 1e-14);
    double worst = 0;
    for (int k = 0; k <= 50; ++k) {
      const double expect = std::exp(-2.0 + k * std::log(2.0) - std::lgamma(k + 1.0));
      const double got = k <= dist.max_count() ? dist.probs[static_cast<std::size_t>(k)] : 0.0;
      worst = std::max(worst, std::fabs(got - expect));
    }
    rec.record("chain", "poisson_reduction_sup_error", worst, 1e-12, worst <= 1e-12);
  }
  {
    const auto dist = chain::stationary(chain::BirthDeathParams(1, 0.5, 0), 1e-14);
    double worst = 0;
    for (int k = 0; k <= 50 && k <= dist.max_count(); ++k) {
      const double expect = (k + 1) * 0.25 * std::pow(0.5, k);
      worst = std::max(worst, std::fabs(dist.probs[static_cast<std::size_t>(k)] - expect));
    }
    rec.record("chain", "negative_binomial_reduction_sup_error", worst, 1e-12, worst <= 1e-12);
  }
  double worst_balance = 0, worst_ratio = 0, worst_identity = 0;
  int bound_violations = 0;
  for (const auto& params : parameter_grid()) {
    const auto dist = chain::stationary(params, 1e-13);
    for (int k = 0; k + 1 <= dist.max_count(); ++k) {
      const double lhs = dist.probs[static_cast<std::size_t>(k)] * params.birth_rate(k);
      const double rhs = dist.probs[static_cast<std::size_t>(k + 1)] * params.death_rate(k + 1);
      worst_balance = std::max(worst_balance, std::fabs(lhs - rhs) / std::max(lhs, 1e-300));
    }
    for (int k = 1; k <= dist.max_count(); ++k) {
      if (dist.probs[static_cast<std::size_t>(k)] < 1e-280) continue;
      const double ratio = params.birth_rate(k) / params.death_rate(k);
      const double up = dist.cdf(k) / dist.cdf(k - 1);
      // Tail-free survivor ratio: adding the truncation tail to both sides
      // would push the quotient toward 1 and fake a violation.
      const double down = (dist.upper_tail(k + 1) - dist.tail_bound) /
                          (dist.upper_tail(k) - dist.tail_bound);
      worst_ratio = std::max({worst_ratio, ratio - up, down - ratio});
      const double f_k = params.birth_rate(k) * dist.probs[static_cast<std::size_t>(k)] *
                         chain::mean_hitting_time_up(params, dist, k);
      worst_identity = std::max(worst_identity, std::fabs(f_k - dist.cdf(k)));
    }
    bound_violations +=
        static_cast<int>(chain::death_count_bound_violations(params, 100).size());
  }
  rec.record("chain", "detailed_balance_rel_error", worst_balance, 1e-12,
             worst_balance <= 1e-12);
  rec.record("chain", "hitting_ratio_chain_violation", worst_ratio, 1e-12,
             worst_ratio <= 1e-12);
  rec.record("chain", "hitting_identity_error", worst_identity, 1e-12,
             worst_identity <= 1e-12);
  rec.record("chain", "death_count_bound_violations", bound_violations, 0,
             bound_violations == 0);
}

void verify_stein(CheckRecorder& rec, std::int64_t reps, std::uint64_t seed) {
  const carrier::CarrierSpace space = carrier::CarrierSpace::unit_interval();
  std::vector<std::pair<carrier::Point, double>> atoms;
  for (int i = 0; i < 8; ++i) atoms.emplace_back((i + 1) / 9.0, 0.125);
  const carrier::DiscreteMeasure nu{std::move(atoms)};
  int failures = 0;
  double worst_margin = -1e300;
  for (const double a : {1.0, 4.0}) {
    for (const double b : {0.0, 0.4}) {
      const sim::PbdpSpec spec(chain::BirthDeathParams(a, b, 0.05), space, nu);
      for (const int size : {0, 3, 6}) {
        std::vector<carrier::Point> eta_pts;
        for (int i = 0; i < size; ++i) eta_pts.push_back((i + 1) / 9.0);
        const carrier::PointPattern eta{std::move(eta_pts)};
        const carrier::PointPattern ref({0.25, 0.75});
        const sim::PatternFn f = [&space, ref](const carrier::PointPattern& xi) {
          return carrier::d1(space, xi, ref);
        };
        const auto est = sim::estimate_first_difference(
            spec, eta, 0.15, 0.85, f, reps, rng::mix64(seed + static_cast<unsigned>(size)));
        const double bound = chain::first_difference_bound(spec.params, size);
        const double margin = std::fabs(est.mean) - (bound + 3 * est.stderr_);
        worst_margin = std::max(worst_margin, margin);
        if (margin > 0) ++failures;
      }
    }
  }
  rec.record("stein", "first_difference_bound_margin", worst_margin, 0.0, failures == 0);

  const sim::PbdpSpec spec(chain::BirthDeathParams(2.0, 0.3, 0.0), space, nu);
  const std::vector<double> times{0.1, 0.5, 1.0, 2.0, 3.0};
  const auto curve = sim::survival_ratio_curve(spec, 6, times, reps, rng::mix64(seed ^ 0x5u));
  double worst = -1e300;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double bound = sim::survival_ratio_bound(spec.params, 6, times[i]);
    worst = std::max(worst, curve[i].mean - (bound + 3 * curve[i].stderr_));
  }
  rec.record("stein", "survival_fraction_bound_margin", worst, 0.0, worst <= 0.0);
}

void verify_palm(CheckRecorder& rec, std::int64_t reps, std::uint64_t seed) {
  const std::vector<std::pair<std::string, models::ModelSpec>> cases = {
      {"bernoulli", models::ModelSpec{models::BernoulliModel(7, 0.3)}},
      {"runs", models::ModelSpec{models::RunsModel(12, 2, 0.4)}},
      {"cp", models::ModelSpec{models::CompoundPoissonModel(
                 carrier::CarrierSpace::unit_interval(),
                 {carrier::DiscreteMeasure({{0.2, 0.8}, {0.6, 0.7}}),
                  carrier::DiscreteMeasure({{0.2, 0.3}, {0.9, 0.2}})})}}};
  for (const auto& [name, model] : cases) {
    const carrier::DiscreteMeasure lambda = models::mean_measure(model);
    const std::vector<carrier::Point> sites = models::site_points(model);
    const carrier::Point site = sites[sites.size() / 2];
    const double lam = lambda.mass_at(site);
    const carrier::CarrierSpace space = models::space_of(model);
    int window_id = 0;
    for (const double radius : {0.08, 0.26, 0.49}) {
      auto window_count = [&space, site, radius](const carrier::PointPattern& xi) {
        double c = 0;
        for (carrier::Point q : xi.points())
          if (space.distance(q, site) <= radius) c += 1.0;
        return c;
      };
      const auto lhs = parallel::replicate_mean(
          rng::mix64(seed ^ (0xabc1u + window_id)), reps,
          [&](std::int64_t, rng::Stream& rng) {
            carrier::PointPattern xi = models::sample(model, rng);
            const int at = xi.count_at(site);
            if (at == 0) return 0.0;
            carrier::PointPattern reduced = xi;
            reduced.remove_one(site);
            return static_cast<double>(at) * window_count(reduced);
          });
      const auto rhs = parallel::replicate_mean(
          rng::mix64(seed ^ (0xbcd2u + window_id)), reps,
          [&](std::int64_t, rng::Stream& rng) {
            return window_count(models::sample_palm(model, site, rng));
          });
      const double diff = std::fabs(lhs.mean - lam * rhs.mean);
      const double gate = 3 * std::hypot(lhs.stderr_, lam * rhs.stderr_) + 1e-12;
      rec.record("palm", name + "_reduced_palm_identity_w" + std::to_string(window_id), diff,
                 gate, diff <= gate);
      ++window_id;
    }
  }
}

void verify_bounds(CheckRecorder& rec, std::int64_t reps, std::uint64_t seed, double u,
                   int partition_override) {
  const models::BernoulliModel bern(10, 0.2);
  const models::ModelSpec model{bern};
  const carrier::PartitionScheme scheme =
      partition_override > 0 ? bounds::block_partition(model, partition_override)
                             : bounds::default_partition(model);
  const fitting::FitResult fit = fitting::fit_model(model);
  const double a = fit.diagnostics.at("a");
  const carrier::Point site = models::site_position(5, 10);
  const bounds::McTerm mc = bounds::smoothing_estimate(model, site, scheme, a, u, reps, seed);
  const double exact = bounds::smoothing_exact_bernoulli(bern, site, scheme, a, u);
  const double diff = std::fabs(mc.estimate - exact);
  rec.record("bounds", "smoothing_mc_vs_enumeration", diff, 3 * mc.stderr_,
             diff <= 3 * mc.stderr_ + 1e-9);

  rng::Stream rng = rng::Stream::substream(seed, 77);
  const carrier::CarrierSpace interval = carrier::CarrierSpace::unit_interval();
  double worst = -1e300;
  const carrier::PartitionScheme grid = carrier::PartitionScheme::intervals(
      interval, {0.0, 0.3, 0.55, 1.0}, {0.15, 0.425, 0.775});
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<carrier::Point> pts;
    const int count = static_cast<int>(rng.uniform_index(7));
    for (int i = 0; i < count; ++i) pts.push_back(rng.uniform());
    const carrier::PointPattern xi{std::move(pts)};
    worst = std::max(worst,
                     carrier::d1(interval, xi, carrier::shuffle(grid, xi)) - grid.resolution());
  }
  rec.record("bounds", "shuffle_contraction_margin", worst, 0.0, worst <= 0.0);

  const carrier::PartitionScheme one_cell =
      carrier::PartitionScheme::intervals(interval, {0.0, 1.0}, {0.5});
  const std::vector<double> half(100, 0.5);
  const double kappa = bounds::bernoulli_kappa(half, one_cell);
  rec.record("bounds", "kappa_equal_half_100", kappa, 1.0 / (2 * std::sqrt(24.5)),
             std::fabs(kappa - 1.0 / (2 * std::sqrt(24.5))) <= 1e-9);

  double prev = 1e300;
  bool monotone = true;
  for (const int n : {64, 256, 1024, 4096}) {
    const models::ModelSpec m{models::BernoulliModel(n, 0.2)};
    const double shape = bounds::asymptotic_shape(m, fitting::fit_model(m));
    if (shape >= prev) monotone = false;
    prev = shape;
  }
  rec.record("bounds", "shape_decreasing_in_n", monotone ? 1 : 0, 1, monotone);
}

int cmd_verify(const std::string& suite, std::int64_t reps, std::uint64_t seed, double u,
               int partition_override, OutputTarget& out) {
  std::ostream& os = out.open();
  CheckRecorder rec(os);
  if (suite == "chain" || suite == "all") verify_chain(rec);
  if (suite == "stein" || suite == "all") verify_stein(rec, reps, seed);
  if (suite == "palm" || suite == "all") verify_palm(rec, reps, seed);
  if (suite == "bounds" || suite == "all")
    verify_bounds(rec, reps, seed, u, partition_override);
  return rec.failures == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

int cmd_sweep(const json& cfg, std::uint64_t seed, std::int64_t n_samples,
              OutputTarget& out, const std::string& plot_path) {
  std::ostream& os = out.open();
  io::CsvWriter csv(os);
  csv.header({"sweep", "x", "metric", "value", "stderr", "n_samples", "seed", "error"});
  struct PlotPoint {
    std::string metric;
    double x, y, se;
  };
  std::vector<PlotPoint> plot;
  const std::string kind = cfg.at("sweep").get<std::string>();

  auto emit = [&](const std::string& metric, double x, double value, double se,
                  std::int64_t ns) {
    csv.row({kind, fmt(x), metric, fmt(value), fmt(se), std::to_string(ns),
             std::to_string(seed), ""});
    plot.push_back({metric, x, value, se});
  };
  auto emit_error = [&](double x, const std::string& what) {
    csv.row({kind, fmt(x), "", "", "", "", std::to_string(seed), what});
  };

  auto d2_to_fit = [&](const models::ModelSpec& model, const fitting::FitResult& fit,
                       std::uint64_t salt) {
    const sim::PbdpSampler sampler(fit.spec);
    return distance::empirical_d2(models::space_of(model), model_sampler(model), sampler,
                                  static_cast<int>(n_samples), rng::mix64(seed + 2 * salt),
                                  rng::mix64(seed + 2 * salt + 1));
  };

  if (kind == "bernoulli_n") {
    const double p = cfg.at("p").get<double>();
    std::uint64_t salt = 0;
    for (const int n : cfg.at("n").get<std::vector<int>>()) {
      try {
        const models::ModelSpec model{models::BernoulliModel(n, p)};
        const fitting::FitResult fit = fitting::fit_model(model);
        const auto est = d2_to_fit(model, fit, ++salt);
        emit("d2_fitted", n, est.value, est.stderr_, est.n_samples);
        const auto poisson = d2_to_fit(model, fitting::fit_poisson(model), ++salt);
        emit("d2_poisson", n, poisson.value, poisson.stderr_, poisson.n_samples);
        emit("bound_shape", n, bounds::asymptotic_shape(model, fit), 0, 0);
        if (cfg.value("bound_terms", false)) {
          const auto report = bounds::assemble_bound(
              model, fit, bounds::default_partition(model), 2.0, 4000, seed + 77 * ++salt);
          for (const auto& [name, value] : report.exact_terms)
            emit("bound_exact:" + name, n, value, 0, 0);
          for (const auto& [name, term] : report.mc_terms)
            emit("bound_mc:" + name, n, term.estimate, term.stderr_, 4000);
          for (const auto& [name, value] : report.order_terms)
            emit("bound_order:" + name, n, value, 0, 0);
        }
      } catch (const std::exception& err) {
        emit_error(n, err.what());
      }
    }
  } else if (kind == "runs_p") {
    const int n = cfg.at("n").get<int>();
    const int k = cfg.at("k").get<int>();
    std::uint64_t salt = 100;
    for (const double p : cfg.at("p").get<std::vector<double>>()) {
      try {
        const models::ModelSpec model{models::RunsModel(n, k, p)};
        emit("dispersion_margin", p, models::runs_dispersion_margin(k, p), 0, 0);
        const fitting::FitResult fit = fitting::fit_model(model);
        emit("bound_shape", p, bounds::asymptotic_shape(model, fit), 0, 0);
        if (n_samples > 0) {
          const auto est = d2_to_fit(model, fit, ++salt);
          emit("d2_fitted", p, est.value, est.stderr_, est.n_samples);
        }
      } catch (const std::exception& err) {
        emit_error(p, err.what());
      }
    }
  } else if (kind == "cp_scale") {
    std::vector<carrier::DiscreteMeasure> mus;
    for (const auto& mj : cfg.at("mus")) mus.push_back(io::measure_from_json(mj));
    std::uint64_t salt = 200;
    for (const double scale : cfg.at("scales").get<std::vector<double>>()) {
      try {
        std::vector<carrier::DiscreteMeasure> scaled = mus;
        std::vector<std::pair<carrier::Point, double>> atoms;
        for (const auto& [x, w] : mus.front().atoms()) atoms.emplace_back(x, w * scale);
        scaled.front() = carrier::DiscreteMeasure(std::move(atoms));
        const models::ModelSpec model{models::CompoundPoissonModel(
            carrier::CarrierSpace::unit_interval(), std::move(scaled))};
        const fitting::FitResult fit = fitting::fit_model(model);
        const auto est = d2_to_fit(model, fit, ++salt);
        emit("d2_fitted", scale, est.value, est.stderr_, est.n_samples);
        emit("bound_shape", scale, bounds::asymptotic_shape(model, fit), 0, 0);
      } catch (const std::exception& err) {
        emit_error(scale, err.what());
      }
    }
  } else {
    throw std::runtime_error("unknown sweep kind: " + kind);
  }

  if (!plot_path.empty()) {
    std::ofstream pf(plot_path, std::ios::binary);
    if (!pf) throw std::runtime_error("cannot open plot file: " + plot_path);
    std::stable_sort(plot.begin(), plot.end(),
                     [](const PlotPoint& a, const PlotPoint& b) { return a.metric < b.metric; });
    std::string current;
    for (const auto& point : plot) {
      if (point.metric != current) {
        if (!current.empty()) pf << "\n\n";
        pf << "# " << point.metric << "\n";
        current = point.metric;
      }
      pf << fmt(point.x) << " " << fmt(point.y) << " " << fmt(point.se) << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polynomial birth-death point process toolkit"};
  app.require_subcommand(1);

  std::string config_path, model_inline, out_path, plot_path;
  std::string against = "fit", suite = "all";
  int n = 10, k = 2;
  double p = 0.1, u = 2.0;
  std::uint64_t seed = 0;
  std::int64_t reps = 20000, n_samples = 400;
  int partition_override = 0;
  bool exact = false, shared_streams = false, serial = false;

  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--model", model_inline,
                 "model JSON, e.g. '{\"model\":\"runs\",\"n\":100,\"k\":2,\"p\":0.3}', "
                 "or a bare name (bernoulli|runs) combined with --n/--k/--p");
  app.add_option("--n", n, "site count for bare-name models");
  app.add_option("--k", k, "run length for bare-name runs model");
  app.add_option("--p", p, "success probability for bare-name models");
  app.add_option("--u", u, "smoothing-term threshold parameter");
  app.add_option("--partition", partition_override,
                 "override the default partition with blocks of this many sites");
  auto* seed_opt =
      app.add_option("--seed", seed, "master seed (required for stochastic commands)");
  app.add_option("--reps", reps, "Monte Carlo replicates");
  app.add_option("--n-samples", n_samples, "samples per side for distance estimates");
  app.add_option("--out", out_path, "output path (default stdout)");
  app.add_flag("--serial", serial, "run the serial reference kernels instead of OpenMP");

  auto* fit_cmd = app.add_subcommand("fit", "fit a stationary process to a model");
  fit_cmd->fallthrough();
  auto* sample_cmd = app.add_subcommand("sample", "draw configurations as JSON lines");
  sample_cmd->fallthrough();
  double horizon = 0;
  sample_cmd->add_option("--trajectory-horizon", horizon,
                         "dump one event-driven trajectory up to this time instead");
  auto* d2_cmd = app.add_subcommand("d2", "estimate the process distance to the fit");
  d2_cmd->fallthrough();
  d2_cmd->add_option("--against", against, "fit | poisson");
  d2_cmd->add_flag("--exact", exact, "add an exact-enumeration row (tiny models)");
  d2_cmd->add_flag("--shared-streams", shared_streams,
                   "use one stream per sample index on both sides");
  auto* verify_cmd = app.add_subcommand("verify", "run module invariant suites");
  verify_cmd->fallthrough();
  verify_cmd->add_option("--suite", suite, "chain | stein | palm | bounds | all");
  auto* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep from --config");
  sweep_cmd->fallthrough();
  sweep_cmd->add_option("--plot-out", plot_path, "plot-data file (x y stderr triples)");

  CLI11_PARSE(app, argc, argv);
  parallel::set_enabled(!serial);

  try {
    OutputTarget out{out_path, nullptr};
    const json cfg = load_config(config_path, model_inline);
    const bool stochastic = !fit_cmd->parsed();
    if (stochastic && seed_opt->count() == 0)
      throw std::runtime_error("--seed is required for stochastic commands");
    if (fit_cmd->parsed()) return cmd_fit(cfg, n, k, p, out);
    if (sample_cmd->parsed())
      return cmd_sample(cfg, n, k, p, seed, n_samples, horizon, out);
    if (d2_cmd->parsed())
      return cmd_d2(cfg, n, k, p, seed, n_samples, against, exact, shared_streams, out);
    if (verify_cmd->parsed()) return cmd_verify(suite, reps, seed, u, partition_override, out);
    if (sweep_cmd->parsed()) return cmd_sweep(cfg, seed, n_samples, out, plot_path);
  } catch (const std::exception& err) {
    std::cerr << json{{"error", err.what()}}.dump() << "\n";
    return 1;
  }
  return 0;
}
