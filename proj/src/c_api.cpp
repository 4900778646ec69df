#include "bnshift/bnshift.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "bnshift/engine.hpp"
#include "bnshift/errors.hpp"
#include "bnshift/pipeline.hpp"
#include "bnshift/stream_io.hpp"

struct bnshift_engine {
  bnshift::Engine engine;
  bnshift_reset_fn hook = nullptr;
  void* hook_data = nullptr;
};

namespace {

thread_local std::string g_last_error;

class CallbackFailed : public std::exception {
 public:
  explicit CallbackFailed(int code) : what_("callback returned " + std::to_string(code)) {}
  const char* what() const noexcept override { return what_.c_str(); }

 private:
  std::string what_;
};

template <class F>
bnshift_status guarded(F&& f) {
  try {
    f();
    return BNSHIFT_OK;
  } catch (const bnshift::HookError& e) {
    g_last_error = e.what();
    return BNSHIFT_ERR_HOOK;
  } catch (const bnshift::ValidationError& e) {
    g_last_error = e.what();
    return BNSHIFT_ERR_VALIDATION;
  } catch (const bnshift::FormatError& e) {
    g_last_error = e.what();
    return BNSHIFT_ERR_IO;
  } catch (const bnshift::IoError& e) {
    g_last_error = e.what();
    return BNSHIFT_ERR_IO;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return BNSHIFT_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return BNSHIFT_ERR_INTERNAL;
  }
}

template <class T>
T& deref(T* p, const char* what) {
  if (p == nullptr) throw bnshift::ValidationError(std::string(what) + " must not be NULL");
  return *p;
}

const char* require(const char* s, const char* what) {
  if (s == nullptr || *s == '\0') {
    throw bnshift::ValidationError(std::string(what) + " must be a non-empty path");
  }
  return s;
}

bnshift::OptionalPath optional_path(const char* s) {
  if (s == nullptr || *s == '\0') return std::nullopt;
  return std::filesystem::path(s);
}

bnshift::EngineConfig to_engine_config(const bnshift_engine_config* cfg) {
  bnshift::EngineConfig out;
  if (cfg == nullptr) return out;
  out.peak.window_size = cfg->window_size;
  out.peak.threshold = cfg->threshold;
  out.peak.influence = cfg->influence;
  out.cooldown_batches = cfg->cooldown_batches;
  if (cfg->layer_prefix != nullptr && *cfg->layer_prefix != '\0') {
    out.layer_filter = bnshift::LayerFilter::prefix(cfg->layer_prefix);
  }
  out.validate();
  return out;
}

bnshift::BatchSnapshot to_snapshot(uint64_t t, const bnshift_layer_stats* layers, size_t n) {
  if (n > 0 && layers == nullptr) throw bnshift::ValidationError("layers must not be NULL");
  bnshift::BatchSnapshot snap{t, {}};
  snap.layers.reserve(n);
  for (size_t l = 0; l < n; ++l) {
    const auto& in = layers[l];
    if (in.id == nullptr) throw bnshift::ValidationError("layer id must not be NULL");
    if (in.channels > 0 && (in.mean == nullptr || in.variance == nullptr)) {
      throw bnshift::ValidationError(std::string("layer '") + in.id +
                                     "' has NULL statistics arrays");
    }
    bnshift::LayerSnapshot layer{in.id, {}};
    layer.channels.reserve(in.channels);
    for (size_t c = 0; c < in.channels; ++c) {
      layer.channels.push_back({in.mean[c], in.variance[c]});
    }
    snap.layers.push_back(std::move(layer));
  }
  return snap;
}

bnshift_eval_report to_c(const bnshift::EvalReport& r) {
  bnshift_eval_report out{};
  out.true_positives = r.true_positives;
  out.false_positives = r.false_positives;
  out.false_negatives = r.false_negatives;
  out.precision = r.precision;
  out.recall = r.recall;
  out.has_delay = r.mean_detection_delay.has_value() ? 1 : 0;
  out.mean_detection_delay = r.mean_detection_delay.value_or(0.0);
  return out;
}

char* dup_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* bnshift_version(void) { return "1.0.0"; }

const char* bnshift_last_error(void) { return g_last_error.c_str(); }

void bnshift_string_free(char* s) { std::free(s); }

void bnshift_engine_config_init(bnshift_engine_config* cfg) {
  if (cfg == nullptr) return;
  const bnshift::EngineConfig defaults;
  cfg->window_size = defaults.peak.window_size;
  cfg->threshold = defaults.peak.threshold;
  cfg->influence = defaults.peak.influence;
  cfg->cooldown_batches = defaults.cooldown_batches;
  cfg->layer_prefix = nullptr;
}

bnshift_status bnshift_engine_create(const bnshift_layer_stats* source, size_t num_layers,
                                     const bnshift_engine_config* cfg, bnshift_engine** out) {
  return guarded([&] {
    auto& slot = deref(out, "out");
    slot = nullptr;
    slot = new bnshift_engine{bnshift::Engine(to_snapshot(0, source, num_layers),
                                              to_engine_config(cfg))};
  });
}

bnshift_status bnshift_engine_create_from_file(const char* source_path,
                                               const bnshift_engine_config* cfg,
                                               bnshift_engine** out) {
  return guarded([&] {
    auto& slot = deref(out, "out");
    slot = nullptr;
    auto source = bnshift::read_source_file(require(source_path, "source_path"));
    slot = new bnshift_engine{bnshift::Engine(std::move(source), to_engine_config(cfg))};
  });
}

void bnshift_engine_destroy(bnshift_engine* engine) { delete engine; }

bnshift_status bnshift_engine_set_reset_hook(bnshift_engine* engine, bnshift_reset_fn fn,
                                             void* user_data) {
  return guarded([&] {
    auto& e = deref(engine, "engine");
    e.hook = fn;
    e.hook_data = user_data;
  });
}

bnshift_status bnshift_engine_process_batch(bnshift_engine* engine, uint64_t t,
                                            const bnshift_layer_stats* layers, size_t num_layers,
                                            bnshift_trace_record* out) {
  bnshift::TraceRecord record;
  std::size_t events_before = 0;
  bool processed = false;
  auto status = guarded([&] {
    auto& e = deref(engine, "engine");
    events_before = e.engine.events().size();
    const auto batch = to_snapshot(t, layers, num_layers);
    bnshift::FunctionHook hook([&](const bnshift::DetectionEvent& ev) {
      const bnshift_event c_event{ev.t, ev.alpha_bar, ev.z_score};
      if (const int rc = e.hook(&c_event, e.hook_data); rc != 0) throw CallbackFailed(rc);
    });
    try {
      record = e.engine.process_batch(batch, e.hook != nullptr ? &hook : nullptr);
    } catch (const bnshift::HookError& err) {
      record = err.record();
      processed = true;
      throw;
    }
    processed = true;
  });
  if (out != nullptr && processed) {
    out->t = record.t;
    out->alpha_raw = record.alpha_raw;
    out->alpha_bar = record.alpha_bar;
    out->has_z_score = record.z_score ? 1 : 0;
    out->z_score = record.z_score.value_or(0.0);
    out->is_peak = record.is_peak ? 1 : 0;
    out->event_emitted = engine->engine.events().size() > events_before ? 1 : 0;
  }
  return status;
}

uint64_t bnshift_engine_batches_processed(const bnshift_engine* engine) {
  return engine == nullptr ? 0 : engine->engine.batches_processed();
}

double bnshift_engine_alpha_max(const bnshift_engine* engine) {
  return engine == nullptr ? 0.0 : engine->engine.momentum().alpha_max();
}

size_t bnshift_engine_event_count(const bnshift_engine* engine) {
  return engine == nullptr ? 0 : engine->engine.events().size();
}

bnshift_status bnshift_engine_get_event(const bnshift_engine* engine, size_t index,
                                        bnshift_event* out) {
  return guarded([&] {
    const auto& events = deref(engine, "engine").engine.events();
    auto& slot = deref(out, "out");
    if (index >= events.size()) {
      throw bnshift::ValidationError("event index " + std::to_string(index) +
                                     " out of range (" + std::to_string(events.size()) +
                                     " events)");
    }
    slot = {events[index].t, events[index].alpha_bar, events[index].z_score};
  });
}

void bnshift_scenario_config_init(bnshift_scenario_config* cfg) {
  if (cfg == nullptr) return;
  const bnshift::ScenarioConfig defaults;
  cfg->num_domains = defaults.num_domains;
  cfg->batches_per_domain = defaults.batches_per_domain;
  cfg->batch_size = defaults.batch_size;
  cfg->domain_gap = defaults.domain_gap;
  cfg->seed = defaults.rng_seed;
  cfg->num_layers = defaults.layers.size();
  cfg->layer_ids = nullptr;
  cfg->channels_per_layer = defaults.layers.front().channels;
}

bnshift_status bnshift_simulate_files(const bnshift_scenario_config* cfg, const char* stream_path,
                                      const char* truth_path, const char* source_path) {
  return guarded([&] {
    const auto& c = deref(cfg, "cfg");
    bnshift::ScenarioConfig sc;
    sc.num_domains = c.num_domains;
    sc.batches_per_domain = c.batches_per_domain;
    sc.batch_size = c.batch_size;
    sc.domain_gap = c.domain_gap;
    sc.rng_seed = c.seed;
    sc.layers.clear();
    for (size_t l = 0; l < c.num_layers; ++l) {
      std::string id = "layer" + std::to_string(l);
      if (c.layer_ids != nullptr) {
        if (c.layer_ids[l] == nullptr || *c.layer_ids[l] == '\0') {
          throw bnshift::ConfigError("layer id " + std::to_string(l) + " is empty");
        }
        id = c.layer_ids[l];
      }
      for (const auto& prev : sc.layers) {
        if (prev.id == id) throw bnshift::ConfigError("duplicate layer id '" + id + "'");
      }
      sc.layers.push_back({std::move(id), c.channels_per_layer});
    }
    bnshift::simulate_to_files(sc, require(stream_path, "stream_path"),
                               require(truth_path, "truth_path"),
                               require(source_path, "source_path"));
  });
}

bnshift_status bnshift_detect_files(const char* stream_path, const char* source_path,
                                    const bnshift_engine_config* cfg, const char* trace_path,
                                    const char* events_path, bnshift_detect_summary* out) {
  return guarded([&] {
    const auto summary = bnshift::detect_files(
        require(stream_path, "stream_path"), require(source_path, "source_path"),
        to_engine_config(cfg), optional_path(trace_path), optional_path(events_path));
    if (out != nullptr) *out = {summary.batches, summary.peaks, summary.detections};
  });
}

bnshift_status bnshift_evaluate_files(const char* events_path, const char* truth_path,
                                      size_t tolerance, const char* report_path,
                                      bnshift_eval_report* out, char** json_out) {
  if (json_out != nullptr) *json_out = nullptr;
  return guarded([&] {
    const auto report = bnshift::evaluate_files(require(events_path, "events_path"),
                                                require(truth_path, "truth_path"), {tolerance},
                                                optional_path(report_path));
    if (out != nullptr) *out = to_c(report);
    if (json_out != nullptr) *json_out = dup_string(bnshift::to_json(report).dump(2));
  });
}

bnshift_status bnshift_sweep_files(const char* stream_path, const char* source_path,
                                   const char* truth_path, const double* thresholds,
                                   size_t num_thresholds, const bnshift_engine_config* base,
                                   size_t tolerance, const char* report_path,
                                   bnshift_sweep_point* out, char** json_out) {
  if (json_out != nullptr) *json_out = nullptr;
  return guarded([&] {
    if (num_thresholds == 0 || thresholds == nullptr) {
      throw bnshift::ValidationError("at least one threshold is required");
    }
    const std::vector<double> ts(thresholds, thresholds + num_thresholds);
    const auto sweep = bnshift::sweep_files(
        require(stream_path, "stream_path"), require(source_path, "source_path"),
        require(truth_path, "truth_path"), ts, to_engine_config(base), {tolerance},
        optional_path(report_path));
    if (out != nullptr) {
      for (size_t i = 0; i < sweep.size(); ++i) {
        out[i] = {sweep[i].threshold, sweep[i].detections, to_c(sweep[i].report)};
      }
    }
    if (json_out != nullptr) *json_out = dup_string(bnshift::to_json(sweep).dump(2));
  });
}

bnshift_status bnshift_plot_files(const char* trace_path, const char* truth_path,
                                  const char* events_path, const char* svg_path) {
  return guarded([&] {
    bnshift::plot_files(require(trace_path, "trace_path"), optional_path(truth_path),
                        optional_path(events_path), require(svg_path, "svg_path"));
  });
}

}  // extern "C"
