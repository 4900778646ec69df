#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "bnshift/engine.hpp"
#include "bnshift/ground_truth.hpp"

namespace bnshift {

struct EvalConfig {
  /// A detection at t matches change c when c <= t <= c + tolerance.
  std::size_t tolerance = 3;
};

struct EvalReport {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  double precision = 1.0;  // 0/0 -> 1
  double recall = 1.0;     // 0/0 -> 1
  std::optional<double> mean_detection_delay;  // absent without matches

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Greedy time-ordered matching. Each change takes the earliest unmatched
/// detection inside its window; further detections inside a matched window
/// are merged into that match; detections outside every matched window are
/// false positives. Throws ValidationError when events are not sorted by t.
EvalReport evaluate(std::span<const DetectionEvent> events, const GroundTruth& truth,
                    const EvalConfig& cfg);

nlohmann::ordered_json to_json(const EvalReport& report);

struct SweepPoint {
  double threshold = 0.0;
  std::size_t detections = 0;
  EvalReport report;
};

/// One independent engine run per threshold over the same stream, reported in
/// input order. Every other engine setting comes from `base`.
std::vector<SweepPoint> threshold_sweep(const BatchSnapshot& source,
                                        std::span<const BatchSnapshot> stream,
                                        const GroundTruth& truth,
                                        std::span<const double> thresholds,
                                        const EngineConfig& base, const EvalConfig& eval);

nlohmann::ordered_json to_json(std::span<const SweepPoint> sweep);

}  // namespace bnshift
