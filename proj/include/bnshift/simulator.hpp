#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bnshift/gaussian.hpp"
#include "bnshift/ground_truth.hpp"

namespace bnshift {

/// Multiplier on the log-variance step between consecutive domains.
inline constexpr double kVarianceShiftScale = 0.5;

struct ScenarioConfig {
  std::size_t num_domains = 15;
  std::size_t batches_per_domain = 78;
  Schema layers = {{"layer0", 64}, {"layer1", 64}, {"layer2", 64}};
  std::size_t batch_size = 128;
  /// Inter-domain shift in units of the within-domain standard deviation.
  double domain_gap = 1.0;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

struct Scenario {
  BatchSnapshot source;
  std::vector<BatchSnapshot> stream;
  GroundTruth truth;
};

/// Synthetic multi-domain batch-statistics stream.
///
/// The source statistics are the population of domain 0. Stream domains
/// 1..num_domains each take a random-walk step from the previous population:
/// every channel mean moves by gap * sigma * N(0,1) and every variance is
/// scaled by exp(gap * N(0,1) * kVarianceShiftScale). Each batch reports
/// sample moments: mean ~ N(mu, sigma^2 / B) and variance
/// sigma^2 * (1 + N(0, 2 / (B - 1))), floored at kVarianceEpsilon.
/// Output is fully determined by the config.
Scenario generate_scenario(const ScenarioConfig& cfg);

}  // namespace bnshift
