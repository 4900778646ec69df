#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "bnshift/gaussian.hpp"

namespace bnshift::testing {

inline LayerSnapshot layer(std::string id, std::vector<ChannelGaussian> channels) {
  return {std::move(id), std::move(channels)};
}

/// `layers` layers of `channels` channels each, all N(mean, variance).
inline BatchSnapshot uniform_snapshot(std::uint64_t t, std::size_t layers, std::size_t channels,
                                      double mean, double variance) {
  BatchSnapshot s{t, {}};
  for (std::size_t l = 0; l < layers; ++l) {
    s.layers.push_back({"layer" + std::to_string(l),
                        std::vector<ChannelGaussian>(channels, {mean, variance})});
  }
  return s;
}

inline BatchSnapshot random_snapshot(std::mt19937_64& rng, std::uint64_t t,
                                     const Schema& schema) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> v(0.2, 3.0);
  BatchSnapshot s{t, {}};
  for (const auto& shape : schema) {
    LayerSnapshot l{shape.id, {}};
    for (std::size_t c = 0; c < shape.channels; ++c) l.channels.push_back({n(rng), v(rng)});
    s.layers.push_back(std::move(l));
  }
  return s;
}

/// Fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("bnshift_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace bnshift::testing
