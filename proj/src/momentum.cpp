#include "bnshift/momentum.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bnshift/errors.hpp"

namespace bnshift {

LayerFilter LayerFilter::all() { return LayerFilter{}; }

LayerFilter LayerFilter::prefix(std::string prefix) {
  LayerFilter f;
  f.mode_ = Mode::prefix;
  f.patterns_.push_back(std::move(prefix));
  return f;
}

LayerFilter LayerFilter::ids(std::vector<std::string> ids) {
  LayerFilter f;
  f.mode_ = Mode::ids;
  f.patterns_ = std::move(ids);
  return f;
}

bool LayerFilter::matches(std::string_view layer_id) const {
  switch (mode_) {
    case Mode::all:
      return true;
    case Mode::prefix:
      return layer_id.starts_with(patterns_.front());
    case Mode::ids:
      return std::find(patterns_.begin(), patterns_.end(), layer_id) != patterns_.end();
  }
  return false;
}

std::string LayerFilter::describe() const {
  switch (mode_) {
    case Mode::all:
      return "all layers";
    case Mode::prefix:
      return "prefix '" + patterns_.front() + "'";
    case Mode::ids: {
      std::string out = "ids {";
      for (std::size_t i = 0; i < patterns_.size(); ++i) {
        out += (i ? "," : "") + patterns_[i];
      }
      return out + "}";
    }
  }
  return {};
}

double layer_momentum(std::span<const ChannelGaussian> running, const LayerSnapshot& incoming) {
  if (running.size() != incoming.channels.size()) {
    throw SchemaError("layer '" + incoming.id + "' has " +
                      std::to_string(incoming.channels.size()) + " channels, expected " +
                      std::to_string(running.size()));
  }
  if (running.empty()) {
    throw SchemaError("layer '" + incoming.id + "' has no channels");
  }
  double sum = 0.0;
  for (std::size_t c = 0; c < running.size(); ++c) {
    sum += kl_univariate_gaussian(running[c], incoming.channels[c]);
  }
  return sum / static_cast<double>(running.size());
}

double aggregate_momentum(std::span<const LayerMomentum> per_layer) {
  if (per_layer.empty()) {
    throw ValidationError("cannot aggregate momentum over zero layers");
  }
  double sum = 0.0;
  for (const auto& layer : per_layer) sum += layer.value;
  return sum / static_cast<double>(per_layer.size());
}

MomentumTracker::MomentumTracker(BatchSnapshot source, LayerFilter filter)
    : filter_(std::move(filter)) {
  source = validate_snapshot(std::move(source));
  schema_ = schema_of(source);
  running_ = std::move(source.layers);
  tracked_.reserve(running_.size());
  for (const auto& layer : running_) tracked_.push_back(filter_.matches(layer.id));
  if (std::none_of(tracked_.begin(), tracked_.end(), [](bool b) { return b; })) {
    throw ConfigError("layer filter " + filter_.describe() + " matches no source layer");
  }
}

void MomentumTracker::check_batch(const BatchSnapshot& batch) const {
  if (batch.batch_index != t_) {
    throw ValidationError("batch index " + std::to_string(batch.batch_index) +
                          " out of order, expected " + std::to_string(t_));
  }
  check_schema(batch, schema_);
  for (const auto& layer : batch.layers) {
    for (std::size_t c = 0; c < layer.channels.size(); ++c) {
      const auto& g = layer.channels[c];
      if (!std::isfinite(g.mean) || !std::isfinite(g.variance) || g.variance < 0.0) {
        throw ValidationError("invalid statistic in layer '" + layer.id + "' channel " +
                              std::to_string(c) + " of batch " +
                              std::to_string(batch.batch_index));
      }
    }
  }
}

double MomentumTracker::layer_momentum(const LayerSnapshot& layer) const {
  for (const auto& r : running_) {
    if (r.id == layer.id) return bnshift::layer_momentum(r.channels, layer);
  }
  throw SchemaError("layer '" + layer.id + "' is not tracked");
}

Divergence MomentumTracker::measure(const BatchSnapshot& batch) const {
  check_batch(batch);
  Divergence d;
  for (std::size_t l = 0; l < running_.size(); ++l) {
    if (!tracked_[l]) continue;
    d.per_layer.push_back(
        {running_[l].id, bnshift::layer_momentum(running_[l].channels, batch.layers[l])});
  }
  d.alpha_raw = aggregate_momentum(d.per_layer);
  return d;
}

MomentumStep MomentumTracker::commit(const BatchSnapshot& batch, Divergence divergence) {
  check_batch(batch);
  const double alpha = divergence.alpha_raw;
  if (!std::isfinite(alpha)) {
    throw ValidationError("divergence at batch " + std::to_string(batch.batch_index) +
                          " is not finite");
  }
  if (alpha > alpha_max_) alpha_max_ = alpha;
  // A zero divergence stays zero instead of dividing 0 by the tiny initial max.
  const double alpha_bar = alpha > 0.0 ? alpha / alpha_max_ : 0.0;

  for (std::size_t l = 0; l < running_.size(); ++l) {
    auto& running = running_[l].channels;
    const auto& incoming = batch.layers[l].channels;
    for (std::size_t c = 0; c < running.size(); ++c) {
      running[c].mean = (1.0 - alpha_bar) * running[c].mean + alpha_bar * incoming[c].mean;
      running[c].variance =
          (1.0 - alpha_bar) * running[c].variance + alpha_bar * incoming[c].variance;
    }
  }

  MomentumStep out{t_, alpha, alpha_bar, std::move(divergence.per_layer)};
  ++t_;
  return out;
}

MomentumStep MomentumTracker::step(const BatchSnapshot& batch) {
  auto divergence = measure(batch);
  return commit(batch, std::move(divergence));
}

}  // namespace bnshift
