#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bnshift/gaussian.hpp"

namespace bnshift {

/// Initial running maximum of the raw momentum; any realistic divergence
/// exceeds it, so the first non-degenerate batch normalises to exactly 1.
inline constexpr double kAlphaMaxInit = 1e-30;

/// Selects the layers that contribute to the momentum. Running statistics of
/// every layer are updated regardless.
class LayerFilter {
 public:
  static LayerFilter all();
  static LayerFilter prefix(std::string prefix);
  static LayerFilter ids(std::vector<std::string> ids);

  bool matches(std::string_view layer_id) const;
  bool is_all() const { return mode_ == Mode::all; }
  std::string describe() const;

 private:
  enum class Mode { all, prefix, ids };
  Mode mode_ = Mode::all;
  std::vector<std::string> patterns_;
};

struct LayerMomentum {
  std::string layer_id;
  double value = 0.0;
};

/// Raw divergence of one batch against the running statistics.
struct Divergence {
  std::vector<LayerMomentum> per_layer;
  double alpha_raw = 0.0;
};

struct MomentumStep {
  std::uint64_t t = 0;
  double alpha_raw = 0.0;
  double alpha_bar = 0.0;
  std::vector<LayerMomentum> per_layer;
};

/// Channel-mean KL(running || incoming) over one layer.
double layer_momentum(std::span<const ChannelGaussian> running, const LayerSnapshot& incoming);

/// Arithmetic mean of per-layer momenta. Throws ValidationError when empty.
double aggregate_momentum(std::span<const LayerMomentum> per_layer);

/// Running per-channel statistics driven by KL-adaptive momentum.
///
/// Each step divides the raw momentum by the running maximum, then moves every
/// channel's running mean and variance toward the incoming batch by that
/// normalised amount. The maximum is never reset.
class MomentumTracker {
 public:
  explicit MomentumTracker(BatchSnapshot source, LayerFilter filter = LayerFilter::all());

  /// measure() followed by commit().
  MomentumStep step(const BatchSnapshot& batch);

  /// Raw divergence of `batch` against the current running statistics.
  /// Does not change state.
  Divergence measure(const BatchSnapshot& batch) const;

  /// Applies a divergence: updates the maximum, normalises, blends every
  /// channel and advances the counter. Splitting measure/commit lets callers
  /// rescale the divergence.
  MomentumStep commit(const BatchSnapshot& batch, Divergence divergence);

  double layer_momentum(const LayerSnapshot& layer) const;

  double alpha_max() const { return alpha_max_; }
  std::uint64_t batches_seen() const { return t_; }
  const Schema& schema() const { return schema_; }
  const std::vector<LayerSnapshot>& running() const { return running_; }
  const LayerFilter& filter() const { return filter_; }
  bool is_tracked(std::size_t layer_index) const { return tracked_[layer_index]; }

 private:
  void check_batch(const BatchSnapshot& batch) const;

  std::vector<LayerSnapshot> running_;
  Schema schema_;
  LayerFilter filter_;
  std::vector<bool> tracked_;
  double alpha_max_ = kAlphaMaxInit;
  std::uint64_t t_ = 0;
};

}  // namespace bnshift
