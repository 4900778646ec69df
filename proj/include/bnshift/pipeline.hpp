#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "bnshift/engine.hpp"
#include "bnshift/evaluate.hpp"
#include "bnshift/simulator.hpp"

namespace bnshift {

using OptionalPath = std::optional<std::filesystem::path>;

void simulate_to_files(const ScenarioConfig& cfg, const std::filesystem::path& stream_path,
                       const std::filesystem::path& truth_path,
                       const std::filesystem::path& source_path);

struct DetectSummary {
  std::uint64_t batches = 0;
  std::size_t peaks = 0;
  std::size_t detections = 0;
};

/// Streams `stream_path` through a fresh engine. Trace and events are written
/// as batches are processed; the trace format follows the file extension.
DetectSummary detect_files(const std::filesystem::path& stream_path,
                           const std::filesystem::path& source_path, const EngineConfig& cfg,
                           const OptionalPath& trace_path, const OptionalPath& events_path,
                           ResetHook* hook = nullptr);

EvalReport evaluate_files(const std::filesystem::path& events_path,
                          const std::filesystem::path& truth_path, const EvalConfig& cfg,
                          const OptionalPath& report_path);

std::vector<SweepPoint> sweep_files(const std::filesystem::path& stream_path,
                                    const std::filesystem::path& source_path,
                                    const std::filesystem::path& truth_path,
                                    std::span<const double> thresholds, const EngineConfig& base,
                                    const EvalConfig& eval, const OptionalPath& report_path);

void plot_files(const std::filesystem::path& trace_path, const OptionalPath& truth_path,
                const OptionalPath& events_path, const std::filesystem::path& svg_path);

}  // namespace bnshift
