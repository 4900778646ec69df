#include <doctest.h>

#include <cmath>

#include "bnshift/errors.hpp"
#include "bnshift/evaluate.hpp"
#include "bnshift/simulator.hpp"
#include "bnshift/svg_plot.hpp"

using namespace bnshift;

namespace {

std::vector<DetectionEvent> events_at(std::initializer_list<std::uint64_t> ts) {
  std::vector<DetectionEvent> out;
  for (auto t : ts) out.push_back({t, 1.0, 20.0});
  return out;
}

}  // namespace

TEST_CASE("scenario config validation") {
  ScenarioConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.batch_size = 1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.num_domains = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.layers.clear();
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.domain_gap = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("scenario layout mirrors 15 corruption domains") {
  const auto sc = generate_scenario({});
  CHECK(sc.stream.size() == 1170);
  REQUIRE(sc.truth.change_points.size() == 14);
  for (std::size_t i = 0; i < 14; ++i) CHECK(sc.truth.change_points[i] == 78 * (i + 1));
  CHECK(sc.truth.labels.size() == 15);
  CHECK(schema_of(sc.source) == ScenarioConfig{}.layers);
  for (std::size_t t = 0; t < sc.stream.size(); ++t) {
    CHECK(sc.stream[t].batch_index == t);
    CHECK(schema_of(sc.stream[t]) == ScenarioConfig{}.layers);
  }
  CHECK_NOTHROW(sc.truth.validate());
}

TEST_CASE("scenario is seed deterministic") {
  ScenarioConfig cfg;
  cfg.num_domains = 3;
  cfg.rng_seed = 9;
  const auto a = generate_scenario(cfg);
  const auto b = generate_scenario(cfg);
  CHECK(a.source == b.source);
  CHECK(a.stream == b.stream);
  cfg.rng_seed = 10;
  CHECK_FALSE(generate_scenario(cfg).stream == a.stream);
}

TEST_CASE("zero gap gives a stationary stream around the source") {
  ScenarioConfig cfg;
  cfg.domain_gap = 0.0;
  cfg.num_domains = 4;
  cfg.batches_per_domain = 200;
  cfg.layers = {{"a", 4}};
  const auto sc = generate_scenario(cfg);
  // Per-domain average of batch means is within sampling error of the source.
  for (std::size_t d = 0; d < cfg.num_domains; ++d) {
    for (std::size_t c = 0; c < 4; ++c) {
      double mean = 0.0;
      double var = 0.0;
      for (std::size_t i = 0; i < cfg.batches_per_domain; ++i) {
        const auto& g = sc.stream[d * cfg.batches_per_domain + i].layers[0].channels[c];
        mean += g.mean;
        var += g.variance;
      }
      mean /= static_cast<double>(cfg.batches_per_domain);
      var /= static_cast<double>(cfg.batches_per_domain);
      const auto& src = sc.source.layers[0].channels[c];
      const double se = std::sqrt(src.variance / 128.0 / 200.0);
      CHECK(std::abs(mean - src.mean) < 5 * se);
      CHECK(std::abs(var / src.variance - 1.0) < 5 * std::sqrt(2.0 / 127.0 / 200.0));
    }
  }
}

TEST_CASE("sample moments follow the sampling-noise model") {
  ScenarioConfig cfg;
  cfg.num_domains = 1;
  cfg.batches_per_domain = 4000;
  cfg.layers = {{"a", 1}};
  cfg.batch_size = 32;
  const auto sc = generate_scenario(cfg);
  double m1 = 0.0;
  double m2 = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
  for (const auto& b : sc.stream) {
    m1 += b.layers[0].channels[0].mean;
    m2 += b.layers[0].channels[0].mean * b.layers[0].channels[0].mean;
    r1 += b.layers[0].channels[0].variance;
    r2 += b.layers[0].channels[0].variance * b.layers[0].channels[0].variance;
  }
  const double n = 4000.0;
  const double mean_var = m2 / n - (m1 / n) * (m1 / n);
  const double var_mean = r1 / n;
  const double var_var = r2 / n - var_mean * var_mean;
  // population variance of the stream is var_mean, up to noise
  CHECK(mean_var == doctest::Approx(var_mean / 32.0).epsilon(0.08));
  CHECK(var_var / (var_mean * var_mean) == doctest::Approx(2.0 / 31.0).epsilon(0.08));
}

TEST_CASE("evaluate examples") {
  const GroundTruth truth{{78, 156}, {}};
  const auto perfect = evaluate(events_at({78, 156}), truth, {3});
  CHECK(perfect.true_positives == 2);
  CHECK(perfect.false_positives == 0);
  CHECK(perfect.precision == 1.0);
  CHECK(perfect.recall == 1.0);
  CHECK(perfect.mean_detection_delay == 0.0);

  GroundTruth fourteen;
  for (std::uint64_t i = 1; i <= 14; ++i) fourteen.change_points.push_back(78 * i);
  const auto none = evaluate({}, fourteen, {3});
  CHECK(none.recall == 0.0);
  CHECK(none.precision == 1.0);
  CHECK(none.false_negatives == 14);
  CHECK_FALSE(none.mean_detection_delay);

  const auto mixed = evaluate(events_at({79, 80, 400}), truth, {3});
  CHECK(mixed.true_positives == 1);
  CHECK(mixed.false_positives == 1);
  CHECK(mixed.false_negatives == 1);
  CHECK(mixed.precision == 0.5);
  CHECK(mixed.recall == 0.5);
  CHECK(mixed.mean_detection_delay == 1.0);
}

TEST_CASE("evaluate edge cases") {
  const GroundTruth truth{{10, 20}, {}};
  CHECK_THROWS_AS(evaluate(events_at({15, 12}), truth, {3}), ValidationError);
  CHECK(evaluate(events_at({9}), truth, {3}).false_positives == 1);
  CHECK(evaluate(events_at({13}), truth, {3}).true_positives == 1);
  CHECK(evaluate(events_at({14}), truth, {3}).true_positives == 0);
  CHECK(evaluate(events_at({10}), truth, {0}).true_positives == 1);
  const auto merged = evaluate(events_at({10, 11, 12, 13, 20, 21}), truth, {3});
  CHECK(merged.true_positives == 2);
  CHECK(merged.false_positives == 0);
  const auto empty = evaluate({}, GroundTruth{}, {3});
  CHECK(empty.precision == 1.0);
  CHECK(empty.recall == 1.0);
  for (const auto& ev : {events_at({}), events_at({1, 10, 11, 30}), events_at({20, 22, 23, 24})}) {
    const auto r = evaluate(ev, truth, {3});
    CHECK(r.true_positives + r.false_negatives == truth.change_points.size());
  }
}

TEST_CASE("report json fields") {
  const auto j = to_json(evaluate(events_at({79}), GroundTruth{{78}, {}}, {3}));
  CHECK(j["true_positives"] == 1);
  CHECK(j["precision"] == 1.0);
  CHECK(j["mean_detection_delay"] == 1.0);
  CHECK(to_json(EvalReport{})["mean_detection_delay"].is_null());
}

TEST_CASE("threshold sweep on a separated scenario") {
  ScenarioConfig cfg;
  cfg.num_domains = 6;
  cfg.batches_per_domain = 50;
  cfg.rng_seed = 3;
  const auto sc = generate_scenario(cfg);
  const std::vector<double> thresholds{5, 10, 15, 20, 1e6};
  const auto sweep = threshold_sweep(sc.source, sc.stream, sc.truth, thresholds, {}, {3});
  REQUIRE(sweep.size() == thresholds.size());
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(sweep[i].threshold == thresholds[i]);
    CHECK(sweep[i].report.true_positives == 5);
  }
  CHECK(sweep[4].detections == 0);
  for (std::size_t i = 1; i < sweep.size(); ++i) {
    CHECK(sweep[i].detections <= sweep[i - 1].detections);
  }
  const auto j = to_json(sweep);
  CHECK(j.size() == thresholds.size());
  CHECK(j[2]["threshold"] == 15.0);
}

TEST_CASE("svg plot structure") {
  std::vector<TraceRecord> trace;
  for (std::uint64_t t = 0; t < 50; ++t) trace.push_back({t, 0.1, t == 20 ? 1.0 : 0.05, {}, false});
  const GroundTruth truth{{20, 40}, {}};
  const auto svg = render_alpha_svg(trace, truth, events_at({21}));
  CHECK(svg.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\""));
  CHECK(svg.ends_with("</svg>\n"));
  auto count = [&](const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = svg.find(needle); pos != std::string::npos; pos = svg.find(needle, pos + 1)) ++n;
    return n;
  };
  CHECK(count("<polyline") == 1);
  CHECK(count("class=\"truth-marker\"") == 2);
  CHECK(count("class=\"event-marker\"") == 1);

  CHECK_THROWS_AS(render_alpha_svg({}, truth, {}), ValidationError);
  CHECK_THROWS_AS(render_alpha_svg(trace, GroundTruth{}, events_at({50})), ValidationError);
  CHECK_THROWS_AS(render_alpha_svg(trace, GroundTruth{{99}, {}}, {}), ValidationError);
}
