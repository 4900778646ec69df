#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bnshift/errors.hpp"
#include "bnshift/gaussian.hpp"
#include "bnshift/momentum.hpp"
#include "bnshift/peak_detector.hpp"

namespace bnshift {

struct EngineConfig {
  PeakDetectorConfig peak;
  LayerFilter layer_filter = LayerFilter::all();
  /// Minimum gap between emitted events; a peak within this many batches of
  /// the previous event is recorded in the trace but not emitted. 0 disables.
  std::size_t cooldown_batches = 0;

  void validate() const { peak.validate(); }
};

struct DetectionEvent {
  std::uint64_t t = 0;
  double alpha_bar = 0.0;
  double z_score = 0.0;

  friend bool operator==(const DetectionEvent&, const DetectionEvent&) = default;
};

struct TraceRecord {
  std::uint64_t t = 0;
  double alpha_raw = 0.0;
  double alpha_bar = 0.0;
  std::optional<double> z_score;
  bool is_peak = false;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

/// Receives every emitted detection. Typical implementations restore an
/// adapted model to its source parameters.
class ResetHook {
 public:
  virtual ~ResetHook() = default;
  virtual void on_reset(const DetectionEvent& event) = 0;
};

/// Adapts any callable to a ResetHook.
class FunctionHook final : public ResetHook {
 public:
  explicit FunctionHook(std::function<void(const DetectionEvent&)> fn) : fn_(std::move(fn)) {}
  void on_reset(const DetectionEvent& event) override { fn_(event); }

 private:
  std::function<void(const DetectionEvent&)> fn_;
};

/// Raised after a batch has been fully processed when the reset hook failed.
/// Engine state already includes the batch.
class HookError : public Error {
 public:
  HookError(const std::string& what, TraceRecord record)
      : Error(what), record_(std::move(record)) {}
  const TraceRecord& record() const { return record_; }

 private:
  TraceRecord record_;
};

/// Per-stream detection engine: momentum tracking, peak detection on the
/// normalised momentum, and reset-event emission.
///
/// Detection does not reset the tracker or the detector.
class Engine {
 public:
  Engine(BatchSnapshot source, EngineConfig cfg);

  TraceRecord process_batch(const BatchSnapshot& batch, ResetHook* hook = nullptr);

  const EngineConfig& config() const { return cfg_; }
  const MomentumTracker& momentum() const { return momentum_; }
  const PeakDetector& detector() const { return detector_; }
  const std::vector<TraceRecord>& trace() const { return trace_; }
  const std::vector<DetectionEvent>& events() const { return events_; }
  std::uint64_t batches_processed() const { return momentum_.batches_seen(); }

 private:
  EngineConfig cfg_;
  MomentumTracker momentum_;
  PeakDetector detector_;
  std::vector<TraceRecord> trace_;
  std::vector<DetectionEvent> events_;
};

struct StreamResult {
  std::vector<TraceRecord> trace;
  std::vector<DetectionEvent> events;
};

/// Folds process_batch over `batches`; returns the records and events
/// produced by this call only.
StreamResult run_stream(Engine& engine, std::span<const BatchSnapshot> batches,
                        ResetHook* hook = nullptr);

}  // namespace bnshift
