#pragma once

#include <span>
#include <string>

#include "bnshift/engine.hpp"
#include "bnshift/ground_truth.hpp"

namespace bnshift {

struct PlotOptions {
  int width = 1200;
  int height = 360;
  std::string title = "normalised momentum";
};

/// Self-contained SVG of alpha_bar against batch index: one polyline, one
/// `truth-marker` line per change point and one `event-marker` line per
/// detection. Throws ValidationError for an empty trace or markers outside
/// the trace range.
std::string render_alpha_svg(std::span<const TraceRecord> trace, const GroundTruth& truth,
                             std::span<const DetectionEvent> events,
                             const PlotOptions& options = {});

}  // namespace bnshift
