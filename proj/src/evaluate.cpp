#include "bnshift/evaluate.hpp"

#include <string>

#include "bnshift/errors.hpp"

namespace bnshift {

EvalReport evaluate(std::span<const DetectionEvent> events, const GroundTruth& truth,
                    const EvalConfig& cfg) {
  truth.validate();
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (events[i].t < events[i - 1].t) {
      throw ValidationError("events must be sorted by batch index; " +
                            std::to_string(events[i].t) + " follows " +
                            std::to_string(events[i - 1].t));
    }
  }

  // 0 = unclaimed, 1 = match, 2 = merged into a match
  std::vector<int> claim(events.size(), 0);
  EvalReport r;
  double delay_sum = 0.0;
  for (const auto c : truth.change_points) {
    const auto last = c + cfg.tolerance;
    bool matched = false;
    for (std::size_t i = 0; i < events.size(); ++i) {
      const auto t = events[i].t;
      if (t < c) continue;
      if (t > last) break;
      if (claim[i] != 0) continue;
      if (!matched) {
        claim[i] = 1;
        matched = true;
        delay_sum += static_cast<double>(t - c);
      } else {
        claim[i] = 2;
      }
    }
    if (matched) {
      ++r.true_positives;
    } else {
      ++r.false_negatives;
    }
  }
  for (const int c : claim) {
    if (c == 0) ++r.false_positives;
  }

  const auto tp = static_cast<double>(r.true_positives);
  const auto detected = r.true_positives + r.false_positives;
  const auto changes = r.true_positives + r.false_negatives;
  r.precision = detected == 0 ? 1.0 : tp / static_cast<double>(detected);
  r.recall = changes == 0 ? 1.0 : tp / static_cast<double>(changes);
  if (r.true_positives > 0) r.mean_detection_delay = delay_sum / tp;
  return r;
}

nlohmann::ordered_json to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["true_positives"] = report.true_positives;
  j["false_positives"] = report.false_positives;
  j["false_negatives"] = report.false_negatives;
  j["precision"] = report.precision;
  j["recall"] = report.recall;
  j["mean_detection_delay"] = report.mean_detection_delay
                                  ? nlohmann::ordered_json(*report.mean_detection_delay)
                                  : nlohmann::ordered_json(nullptr);
  return j;
}

std::vector<SweepPoint> threshold_sweep(const BatchSnapshot& source,
                                        std::span<const BatchSnapshot> stream,
                                        const GroundTruth& truth,
                                        std::span<const double> thresholds,
                                        const EngineConfig& base, const EvalConfig& eval) {
  std::vector<SweepPoint> out;
  out.reserve(thresholds.size());
  for (const double threshold : thresholds) {
    EngineConfig cfg = base;
    cfg.peak.threshold = threshold;
    Engine engine(source, cfg);
    const auto result = run_stream(engine, stream);
    out.push_back({threshold, result.events.size(), evaluate(result.events, truth, eval)});
  }
  return out;
}

nlohmann::ordered_json to_json(std::span<const SweepPoint> sweep) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& p : sweep) {
    nlohmann::ordered_json j;
    j["threshold"] = p.threshold;
    j["detections"] = p.detections;
    j["report"] = to_json(p.report);
    arr.push_back(std::move(j));
  }
  return arr;
}

}  // namespace bnshift
