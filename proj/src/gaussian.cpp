#include "bnshift/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bnshift/errors.hpp"

namespace bnshift {

namespace {

void check_channel(const ChannelGaussian& g, const std::string& context) {
  if (!std::isfinite(g.mean) || !std::isfinite(g.variance)) {
    throw ValidationError("non-finite statistic" + context);
  }
  if (g.variance < 0.0) {
    throw ValidationError("negative variance" + context);
  }
}

std::string channel_context(const std::string& layer, std::size_t channel) {
  return " in layer '" + layer + "' channel " + std::to_string(channel);
}

}  // namespace

Schema schema_of(const BatchSnapshot& snapshot) {
  Schema schema;
  schema.reserve(snapshot.layers.size());
  for (const auto& layer : snapshot.layers) {
    schema.push_back({layer.id, layer.channels.size()});
  }
  return schema;
}

double kl_univariate_gaussian(const ChannelGaussian& running, const ChannelGaussian& incoming) {
  check_channel(running, " (running)");
  check_channel(incoming, " (incoming)");
  const double var_p = std::max(running.variance, kVarianceEpsilon);
  const double var_q = std::max(incoming.variance, kVarianceEpsilon);
  const double diff = running.mean - incoming.mean;
  return 0.5 * std::log(var_q / var_p) + (var_p + diff * diff) / (2.0 * var_q) - 0.5;
}

BatchSnapshot validate_snapshot(BatchSnapshot snapshot) {
  if (snapshot.layers.empty()) {
    throw ValidationError("snapshot for batch " + std::to_string(snapshot.batch_index) +
                          " has no layers");
  }
  for (auto& layer : snapshot.layers) {
    if (layer.channels.empty()) {
      throw ValidationError("layer '" + layer.id + "' has no channels");
    }
    for (std::size_t c = 0; c < layer.channels.size(); ++c) {
      auto& g = layer.channels[c];
      check_channel(g, channel_context(layer.id, c));
      g.variance = std::max(g.variance, kVarianceEpsilon);
    }
  }
  return snapshot;
}

void check_schema(const BatchSnapshot& snapshot, const Schema& expected) {
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const auto& want = expected[i];
    if (i >= snapshot.layers.size()) {
      throw SchemaError("layer '" + want.id + "' missing");
    }
    const auto& got = snapshot.layers[i];
    if (got.id != want.id) {
      throw SchemaError("expected layer '" + want.id + "' at position " + std::to_string(i) +
                        ", found '" + got.id + "'");
    }
    if (got.channels.size() != want.channels) {
      throw SchemaError("layer '" + want.id + "' has " + std::to_string(got.channels.size()) +
                        " channels, expected " + std::to_string(want.channels));
    }
  }
  if (snapshot.layers.size() > expected.size()) {
    throw SchemaError("unexpected layer '" + snapshot.layers[expected.size()].id + "'");
  }
}

BatchSnapshot validate_snapshot(BatchSnapshot snapshot, const Schema& expected) {
  check_schema(snapshot, expected);
  return validate_snapshot(std::move(snapshot));
}

}  // namespace bnshift
