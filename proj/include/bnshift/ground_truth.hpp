#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bnshift {

struct DomainLabel {
  std::uint64_t start = 0;
  std::string label;

  friend bool operator==(const DomainLabel&, const DomainLabel&) = default;
};

/// Known domain boundaries of a stream. Each change point is the index of the
/// first batch of a new domain.
struct GroundTruth {
  std::vector<std::uint64_t> change_points;
  std::vector<DomainLabel> labels;

  /// Throws ValidationError unless change points are strictly increasing and
  /// positive, and label starts are strictly increasing.
  void validate() const;

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

}  // namespace bnshift
