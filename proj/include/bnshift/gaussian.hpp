#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace bnshift {

/// Variances are clamped to at least this value before any divergence.
inline constexpr double kVarianceEpsilon = 1e-12;

/// Univariate Gaussian summarising one channel of one layer.
struct ChannelGaussian {
  double mean = 0.0;
  double variance = 1.0;

  friend bool operator==(const ChannelGaussian&, const ChannelGaussian&) = default;
};

struct LayerSnapshot {
  std::string id;
  std::vector<ChannelGaussian> channels;

  friend bool operator==(const LayerSnapshot&, const LayerSnapshot&) = default;
};

/// Statistics of every captured layer for one test batch.
struct BatchSnapshot {
  std::uint64_t batch_index = 0;
  std::vector<LayerSnapshot> layers;

  friend bool operator==(const BatchSnapshot&, const BatchSnapshot&) = default;
};

struct LayerShape {
  std::string id;
  std::size_t channels = 0;

  friend bool operator==(const LayerShape&, const LayerShape&) = default;
};

/// Ordered layer ids with their channel counts.
using Schema = std::vector<LayerShape>;

Schema schema_of(const BatchSnapshot& snapshot);

/// KL(running || incoming) for univariate Gaussians, variances clamped to
/// kVarianceEpsilon. Throws ValidationError on non-finite or negative input.
double kl_univariate_gaussian(const ChannelGaussian& running, const ChannelGaussian& incoming);

/// Checks finiteness and non-negative variances, then clamps variances.
/// Errors name the offending layer and channel.
BatchSnapshot validate_snapshot(BatchSnapshot snapshot);

/// As above, and additionally requires the layer ids, their order and channel
/// counts to match `expected`.
BatchSnapshot validate_snapshot(BatchSnapshot snapshot, const Schema& expected);

/// Throws SchemaError unless `snapshot` has exactly the layout `expected`.
void check_schema(const BatchSnapshot& snapshot, const Schema& expected);

}  // namespace bnshift
