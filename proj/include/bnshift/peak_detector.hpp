#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

namespace bnshift {

/// Floor on the running standard deviation when forming a z-score.
inline constexpr double kSigmaEpsilon = 1e-12;

struct PeakDetectorConfig {
  std::size_t window_size = 10;
  double threshold = 15.0;
  double influence = 0.1;

  /// Throws ConfigError unless window_size >= 2, threshold > 0 and
  /// influence in [0, 1].
  void validate() const;
};

struct PeakObservation {
  std::uint64_t t = 0;
  double value = 0.0;
  std::optional<double> z_score;  // absent during warm-up
  bool is_peak = false;

  friend bool operator==(const PeakObservation&, const PeakObservation&) = default;
};

/// Online one-sided z-score peak detector.
///
/// The first window_size values only fill the window; once full, the running
/// mean and standard deviation start as the window's population mean and
/// std. Every later value is z-scored against the running statistics, then
/// pushed into the window (peaks included), and the running statistics are
/// blended toward the window's current mean and std with weight `influence`.
class PeakDetector {
 public:
  explicit PeakDetector(PeakDetectorConfig cfg);

  PeakObservation observe(double value, std::uint64_t t);

  const PeakDetectorConfig& config() const { return cfg_; }
  bool initialized() const { return initialized_; }
  double running_mean() const { return mu_r_; }
  double running_std() const { return sigma_r_; }
  const std::deque<double>& window() const { return window_; }

 private:
  PeakDetectorConfig cfg_;
  std::deque<double> window_;
  double mu_r_ = 0.0;
  double sigma_r_ = 0.0;
  bool initialized_ = false;
};

/// Folds observe() over `values`, using positions as batch indices.
std::vector<PeakObservation> detect_offline(std::span<const double> values,
                                            const PeakDetectorConfig& cfg);

}  // namespace bnshift
