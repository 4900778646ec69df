#include "bnshift/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "bnshift/errors.hpp"

namespace bnshift {

void ScenarioConfig::validate() const {
  if (num_domains == 0) throw ConfigError("num_domains must be positive");
  if (batches_per_domain == 0) throw ConfigError("batches_per_domain must be positive");
  if (batch_size < 2) throw ConfigError("batch_size must be at least 2");
  if (!(domain_gap >= 0.0) || !std::isfinite(domain_gap)) {
    throw ConfigError("domain_gap must be a finite non-negative number");
  }
  if (layers.empty()) throw ConfigError("scenario needs at least one layer");
  for (const auto& l : layers) {
    if (l.channels == 0) throw ConfigError("layer '" + l.id + "' needs at least one channel");
  }
}

Scenario generate_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.rng_seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Scenario out;
  out.source.batch_index = 0;
  for (const auto& shape : cfg.layers) {
    LayerSnapshot layer{shape.id, {}};
    layer.channels.reserve(shape.channels);
    for (std::size_t c = 0; c < shape.channels; ++c) {
      const double mean = normal(rng);
      const double variance = std::exp(0.5 * normal(rng));
      layer.channels.push_back({mean, variance});
    }
    out.source.layers.push_back(std::move(layer));
  }

  std::vector<std::vector<LayerSnapshot>> populations;
  populations.reserve(cfg.num_domains);
  const auto* previous = &out.source.layers;
  for (std::size_t d = 0; d < cfg.num_domains; ++d) {
    auto next = *previous;
    for (auto& layer : next) {
      for (auto& g : layer.channels) {
        g.mean += cfg.domain_gap * std::sqrt(g.variance) * normal(rng);
        g.variance *= std::exp(cfg.domain_gap * normal(rng) * kVarianceShiftScale);
      }
    }
    populations.push_back(std::move(next));
    previous = &populations.back();
  }

  const auto b = static_cast<double>(cfg.batch_size);
  const double var_rel_std = std::sqrt(2.0 / (b - 1.0));
  out.stream.reserve(cfg.num_domains * cfg.batches_per_domain);
  std::uint64_t t = 0;
  for (std::size_t d = 0; d < cfg.num_domains; ++d) {
    if (d > 0) out.truth.change_points.push_back(t);
    out.truth.labels.push_back({t, "domain_" + std::to_string(d + 1)});
    for (std::size_t i = 0; i < cfg.batches_per_domain; ++i, ++t) {
      BatchSnapshot batch{t, {}};
      batch.layers.reserve(populations[d].size());
      for (const auto& pop : populations[d]) {
        LayerSnapshot layer{pop.id, {}};
        layer.channels.reserve(pop.channels.size());
        for (const auto& g : pop.channels) {
          const double mean = g.mean + std::sqrt(g.variance / b) * normal(rng);
          const double variance =
              std::max(g.variance * (1.0 + var_rel_std * normal(rng)), kVarianceEpsilon);
          layer.channels.push_back({mean, variance});
        }
        batch.layers.push_back(std::move(layer));
      }
      out.stream.push_back(std::move(batch));
    }
  }
  return out;
}

}  // namespace bnshift
