#include "bnshift/engine.hpp"

#include <exception>

namespace bnshift {

namespace {

MomentumTracker make_tracker(BatchSnapshot source, const EngineConfig& cfg) {
  cfg.validate();
  return MomentumTracker(std::move(source), cfg.layer_filter);
}

}  // namespace

Engine::Engine(BatchSnapshot source, EngineConfig cfg)
    : cfg_(std::move(cfg)),
      momentum_(make_tracker(std::move(source), cfg_)),
      detector_(cfg_.peak) {}

TraceRecord Engine::process_batch(const BatchSnapshot& batch, ResetHook* hook) {
  const auto step = momentum_.step(batch);
  const auto obs = detector_.observe(step.alpha_bar, step.t);
  TraceRecord record{step.t, step.alpha_raw, step.alpha_bar, obs.z_score, obs.is_peak};
  trace_.push_back(record);

  if (!obs.is_peak) return record;
  if (cfg_.cooldown_batches > 0 && !events_.empty() &&
      step.t - events_.back().t <= cfg_.cooldown_batches) {
    return record;
  }
  const DetectionEvent event{step.t, step.alpha_bar, *obs.z_score};
  events_.push_back(event);
  if (hook != nullptr) {
    try {
      hook->on_reset(event);
    } catch (const std::exception& e) {
      throw HookError("reset hook failed at batch " + std::to_string(step.t) + ": " + e.what(),
                      record);
    } catch (...) {
      throw HookError("reset hook failed at batch " + std::to_string(step.t), record);
    }
  }
  return record;
}

StreamResult run_stream(Engine& engine, std::span<const BatchSnapshot> batches, ResetHook* hook) {
  StreamResult out;
  out.trace.reserve(batches.size());
  const auto events_before = engine.events().size();
  for (const auto& batch : batches) {
    out.trace.push_back(engine.process_batch(batch, hook));
  }
  out.events.assign(engine.events().begin() + static_cast<std::ptrdiff_t>(events_before),
                    engine.events().end());
  return out;
}

}  // namespace bnshift
