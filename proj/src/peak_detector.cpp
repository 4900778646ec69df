#include "bnshift/peak_detector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bnshift/errors.hpp"

namespace bnshift {

namespace {

struct MeanStd {
  double mean;
  double stddev;
};

// Population statistics (divide by n).
MeanStd window_stats(const std::deque<double>& w) {
  const auto n = static_cast<double>(w.size());
  double sum = 0.0;
  for (double x : w) sum += x;
  const double mean = sum / n;
  double ss = 0.0;
  for (double x : w) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / n)};
}

}  // namespace

void PeakDetectorConfig::validate() const {
  if (window_size < 2) {
    throw ConfigError("window size must be at least 2, got " + std::to_string(window_size));
  }
  if (!(threshold > 0.0) || !std::isfinite(threshold)) {
    throw ConfigError("threshold must be a positive finite number, got " +
                      std::to_string(threshold));
  }
  if (!(influence >= 0.0 && influence <= 1.0)) {
    throw ConfigError("influence must lie in [0, 1], got " + std::to_string(influence));
  }
}

PeakDetector::PeakDetector(PeakDetectorConfig cfg) : cfg_(cfg) { cfg_.validate(); }

PeakObservation PeakDetector::observe(double value, std::uint64_t t) {
  if (!std::isfinite(value)) {
    throw ValidationError("non-finite value at batch " + std::to_string(t));
  }
  PeakObservation obs{t, value, std::nullopt, false};

  if (!initialized_) {
    window_.push_back(value);
    if (window_.size() == cfg_.window_size) {
      const auto s = window_stats(window_);
      mu_r_ = s.mean;
      sigma_r_ = s.stddev;
      initialized_ = true;
    }
    return obs;
  }

  const double z = (value - mu_r_) / std::max(sigma_r_, kSigmaEpsilon);
  obs.z_score = z;
  obs.is_peak = z > cfg_.threshold;

  window_.pop_front();
  window_.push_back(value);
  const auto current = window_stats(window_);
  const double k = cfg_.influence;
  mu_r_ = (1.0 - k) * mu_r_ + k * current.mean;
  sigma_r_ = (1.0 - k) * sigma_r_ + k * current.stddev;
  return obs;
}

std::vector<PeakObservation> detect_offline(std::span<const double> values,
                                            const PeakDetectorConfig& cfg) {
  PeakDetector detector(cfg);
  std::vector<PeakObservation> out;
  out.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    out.push_back(detector.observe(values[i], i));
  }
  return out;
}

}  // namespace bnshift
