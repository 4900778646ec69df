#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "bnshift/errors.hpp"
#include "bnshift/momentum.hpp"
#include "test_support.hpp"

using namespace bnshift;
using bnshift::testing::uniform_snapshot;

namespace {

BatchSnapshot blocks_snapshot(std::uint64_t t, double mean) {
  BatchSnapshot s{t, {}};
  for (const char* id : {"b1.bn", "b2.bn", "b3.bn", "b4.bn1", "b4.bn2"}) {
    s.layers.push_back({id, std::vector<ChannelGaussian>(4, {mean, 1.0})});
  }
  return s;
}

}  // namespace

TEST_CASE("init tracks every source layer") {
  MomentumTracker tracker(uniform_snapshot(0, 3, 8, 0.0, 1.0));
  CHECK(tracker.schema().size() == 3);
  CHECK(tracker.alpha_max() == kAlphaMaxInit);
  CHECK(tracker.batches_seen() == 0);
  for (std::size_t l = 0; l < 3; ++l) CHECK(tracker.is_tracked(l));
}

TEST_CASE("layer filter restricts momentum but not the update") {
  MomentumTracker tracker(blocks_snapshot(0, 0.0), LayerFilter::prefix("b4"));
  CHECK_FALSE(tracker.is_tracked(0));
  CHECK(tracker.is_tracked(3));
  CHECK(tracker.is_tracked(4));
  const auto step = tracker.step(blocks_snapshot(0, 1.0));
  REQUIRE(step.per_layer.size() == 2);
  CHECK(step.per_layer[0].layer_id == "b4.bn1");
  CHECK(step.per_layer[1].layer_id == "b4.bn2");
  CHECK(step.alpha_bar == 1.0);
  for (const auto& layer : tracker.running()) {
    for (const auto& g : layer.channels) CHECK(g.mean == 1.0);
  }
}

TEST_CASE("filter matching nothing is an error") {
  CHECK_THROWS_AS(MomentumTracker(blocks_snapshot(0, 0.0), LayerFilter::prefix("b9")),
                  ConfigError);
  CHECK_THROWS_AS(MomentumTracker(blocks_snapshot(0, 0.0), LayerFilter::ids({"nope"})),
                  ConfigError);
  MomentumTracker by_id(blocks_snapshot(0, 0.0), LayerFilter::ids({"b2.bn"}));
  CHECK(by_id.is_tracked(1));
  CHECK_FALSE(by_id.is_tracked(0));
}

TEST_CASE("layer momentum is the channel mean of kl") {
  const std::vector<ChannelGaussian> running{{0, 1}, {0, 1}};
  CHECK(layer_momentum(running, {"l", running}) == 0.0);

  const LayerSnapshot incoming{"l", {{1, 1}, {0, 4}}};
  const double expected = (0.5 + (std::log(2.0) + 0.125 - 0.5)) / 2.0;
  CHECK(layer_momentum(running, incoming) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(expected == doctest::Approx(0.40907).epsilon(1e-5));

  const std::vector<ChannelGaussian> one{{0.3, 2.0}};
  const LayerSnapshot single{"l", {{-1.0, 0.5}}};
  CHECK(layer_momentum(one, single) == kl_univariate_gaussian(one[0], single.channels[0]));

  CHECK_THROWS_AS(layer_momentum(running, LayerSnapshot{"l", {{0, 1}}}), SchemaError);
}

TEST_CASE("aggregate momentum is the layer mean") {
  const std::vector<LayerMomentum> one{{"a", 0.7}};
  CHECK(aggregate_momentum(one) == 0.7);
  const std::vector<LayerMomentum> three{{"a", 0.2}, {"b", 0.4}, {"c", 0.6}};
  CHECK(aggregate_momentum(three) == doctest::Approx(0.4).epsilon(1e-15));
  const std::vector<LayerMomentum> zeros{{"a", 0.0}, {"b", 0.0}};
  CHECK(aggregate_momentum(zeros) == 0.0);
  CHECK_THROWS_AS(aggregate_momentum({}), ValidationError);
}

TEST_CASE("first non-degenerate batch normalises to one") {
  MomentumTracker tracker(uniform_snapshot(0, 2, 4, 0.0, 1.0));
  const auto step = tracker.step(uniform_snapshot(0, 2, 4, 0.3, 1.5));
  CHECK(step.alpha_bar == 1.0);
  CHECK(step.alpha_raw > 0.0);
  CHECK(tracker.alpha_max() == step.alpha_raw);
  CHECK(tracker.batches_seen() == 1);
}

TEST_CASE("degenerate first batch keeps the initial maximum") {
  MomentumTracker tracker(uniform_snapshot(0, 1, 4, 0.0, 1.0));
  const auto step = tracker.step(uniform_snapshot(0, 1, 4, 0.0, 1.0));
  CHECK(step.alpha_raw == 0.0);
  CHECK(step.alpha_bar == 0.0);
  CHECK(tracker.alpha_max() == kAlphaMaxInit);
}

TEST_CASE("batch equal to running stats leaves them unchanged") {
  MomentumTracker tracker(uniform_snapshot(0, 1, 3, 0.0, 1.0));
  tracker.step(uniform_snapshot(0, 1, 3, 2.0, 3.0));
  const auto before = tracker.running();
  const auto step = tracker.step(uniform_snapshot(1, 1, 3, 2.0, 3.0));
  CHECK(step.alpha_raw == 0.0);
  CHECK(step.alpha_bar == 0.0);
  CHECK(tracker.running() == before);
}

TEST_CASE("ema update with half momentum") {
  MomentumTracker tracker(uniform_snapshot(0, 1, 2, 5.0, 1.0));
  tracker.step(uniform_snapshot(0, 1, 2, 0.0, 1.0));  // ᾱ = 1 -> running (0, 1)
  auto batch = uniform_snapshot(1, 1, 2, 2.0, 3.0);
  auto d = tracker.measure(batch);
  d.alpha_raw = 0.5 * tracker.alpha_max();
  const auto step = tracker.commit(batch, d);
  CHECK(step.alpha_bar == 0.5);
  for (const auto& g : tracker.running()[0].channels) {
    CHECK(g.mean == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(g.variance == doctest::Approx(2.0).epsilon(1e-15));
  }
}

TEST_CASE("constant stream aligns in one step") {
  MomentumTracker tracker(uniform_snapshot(0, 2, 4, 0.0, 1.0));
  CHECK(tracker.step(uniform_snapshot(0, 2, 4, 1.0, 2.0)).alpha_bar == 1.0);
  for (std::uint64_t t = 1; t < 20; ++t) {
    CHECK(tracker.step(uniform_snapshot(t, 2, 4, 1.0, 2.0)).alpha_raw == 0.0);
  }
}

TEST_CASE("constant segment after a larger shift decays strictly to zero") {
  MomentumTracker tracker(uniform_snapshot(0, 2, 4, 0.0, 1.0));
  tracker.step(uniform_snapshot(0, 2, 4, 6.0, 1.0));
  double previous = HUGE_VAL;
  double first = 0.0;
  double last = 0.0;
  for (std::uint64_t t = 1; t < 2000; ++t) {
    const auto step = tracker.step(uniform_snapshot(t, 2, 4, 4.5, 1.8));
    CAPTURE(t);
    CHECK(step.alpha_bar < 1.0);
    if (step.alpha_raw == 0.0) break;
    CHECK(step.alpha_raw < previous);
    if (t == 1) first = step.alpha_raw;
    previous = step.alpha_raw;
    last = step.alpha_raw;
  }
  CHECK(last < 0.01 * first);
}

TEST_CASE("normalised momentum stays in range and updates are convex") {
  std::mt19937_64 rng(5);
  const Schema schema{{"a", 5}, {"b", 7}};
  MomentumTracker tracker(testing::random_snapshot(rng, 0, schema));
  double alpha_max = 0.0;
  for (std::uint64_t t = 0; t < 200; ++t) {
    const auto batch = testing::random_snapshot(rng, t, schema);
    const auto before = tracker.running();
    const auto step = tracker.step(batch);
    CHECK(step.alpha_bar > 0.0);
    CHECK(step.alpha_bar <= 1.0);
    CHECK(tracker.alpha_max() >= alpha_max);
    alpha_max = tracker.alpha_max();
    if (step.alpha_raw == tracker.alpha_max()) CHECK(step.alpha_bar == 1.0);
    for (const auto& pl : step.per_layer) CHECK(pl.value >= -1e-12);
    for (std::size_t l = 0; l < schema.size(); ++l) {
      for (std::size_t c = 0; c < schema[l].channels; ++c) {
        const auto& old = before[l].channels[c];
        const auto& in = batch.layers[l].channels[c];
        const auto& now = tracker.running()[l].channels[c];
        CHECK(now.mean >= std::min(old.mean, in.mean) - 1e-12);
        CHECK(now.mean <= std::max(old.mean, in.mean) + 1e-12);
        CHECK(now.variance >= std::min(old.variance, in.variance) - 1e-12);
        CHECK(now.variance <= std::max(old.variance, in.variance) + 1e-12);
      }
    }
  }
}

TEST_CASE("normalisation is invariant to scaling the divergence") {
  for (const double scale : {1e-3, 7.0, 1e4}) {
    std::mt19937_64 rng(11);
    const Schema schema{{"a", 6}, {"b", 3}};
    const auto source = testing::random_snapshot(rng, 0, schema);
    MomentumTracker plain(source);
    MomentumTracker scaled(source);
    for (std::uint64_t t = 0; t < 150; ++t) {
      const auto batch = testing::random_snapshot(rng, t, schema);
      const auto a = plain.step(batch);
      auto d = scaled.measure(batch);
      d.alpha_raw *= scale;
      for (auto& pl : d.per_layer) pl.value *= scale;
      const auto b = scaled.commit(batch, d);
      CHECK(std::abs(a.alpha_bar - b.alpha_bar) <= 1e-9);
    }
  }
}

TEST_CASE("tracker is deterministic") {
  auto run = [] {
    std::mt19937_64 rng(3);
    const Schema schema{{"x", 4}};
    MomentumTracker tracker(testing::random_snapshot(rng, 0, schema));
    std::vector<double> out;
    for (std::uint64_t t = 0; t < 50; ++t) {
      const auto s = tracker.step(testing::random_snapshot(rng, t, schema));
      out.push_back(s.alpha_raw);
      out.push_back(s.alpha_bar);
    }
    return out;
  };
  CHECK(run() == run());
}

TEST_CASE("out-of-order and mismatched batches are rejected without state change") {
  MomentumTracker tracker(uniform_snapshot(0, 2, 4, 0.0, 1.0));
  CHECK_THROWS_AS(tracker.step(uniform_snapshot(1, 2, 4, 1.0, 1.0)), ValidationError);
  CHECK_THROWS_AS(tracker.step(uniform_snapshot(0, 2, 5, 1.0, 1.0)), SchemaError);
  CHECK_THROWS_AS(tracker.step(uniform_snapshot(0, 3, 4, 1.0, 1.0)), SchemaError);
  auto bad = uniform_snapshot(0, 2, 4, 1.0, 1.0);
  bad.layers[0].channels[1].variance = -2.0;
  CHECK_THROWS_AS(tracker.step(bad), ValidationError);
  CHECK(tracker.batches_seen() == 0);
  CHECK(tracker.alpha_max() == kAlphaMaxInit);
  CHECK(tracker.step(uniform_snapshot(0, 2, 4, 1.0, 1.0)).alpha_bar == 1.0);
}
