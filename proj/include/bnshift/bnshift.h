/*
 * C interface to the bnshift domain-shift detection engine.
 *
 * Every function that can fail returns a bnshift_status. On failure a
 * description is available from bnshift_last_error() on the calling thread
 * until the next failing call on that thread.
 */
#ifndef BNSHIFT_H
#define BNSHIFT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(BNSHIFT_BUILDING_LIBRARY)
#    define BNSHIFT_API __declspec(dllexport)
#  else
#    define BNSHIFT_API __declspec(dllimport)
#  endif
#else
#  define BNSHIFT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bnshift_status {
  BNSHIFT_OK = 0,
  BNSHIFT_ERR_VALIDATION = 1, /* bad values, schema mismatch, bad configuration */
  BNSHIFT_ERR_IO = 2,         /* file cannot be opened/written, or malformed content */
  BNSHIFT_ERR_HOOK = 3,       /* reset hook failed; the batch itself was processed */
  BNSHIFT_ERR_INTERNAL = 4
} bnshift_status;

BNSHIFT_API const char* bnshift_version(void);
BNSHIFT_API const char* bnshift_last_error(void);
BNSHIFT_API void bnshift_string_free(char* s);

/* ---- engine ------------------------------------------------------------ */

typedef struct bnshift_engine bnshift_engine;

typedef struct bnshift_engine_config {
  size_t window_size;
  double threshold;
  double influence;
  size_t cooldown_batches;
  const char* layer_prefix; /* NULL or "" selects every layer */
} bnshift_engine_config;

/* window 10, threshold 15, influence 0.1, no cooldown, all layers */
BNSHIFT_API void bnshift_engine_config_init(bnshift_engine_config* cfg);

typedef struct bnshift_layer_stats {
  const char* id;
  size_t channels;
  const double* mean;     /* channels values */
  const double* variance; /* channels values */
} bnshift_layer_stats;

typedef struct bnshift_trace_record {
  uint64_t t;
  double alpha_raw;
  double alpha_bar;
  double z_score; /* meaningful only when has_z_score */
  int has_z_score;
  int is_peak;
  int event_emitted;
} bnshift_trace_record;

typedef struct bnshift_event {
  uint64_t t;
  double alpha_bar;
  double z_score;
} bnshift_event;

/* Return 0 on success. A non-zero return makes process_batch report
 * BNSHIFT_ERR_HOOK without affecting engine state. */
typedef int (*bnshift_reset_fn)(const bnshift_event* event, void* user_data);

BNSHIFT_API bnshift_status bnshift_engine_create(const bnshift_layer_stats* source,
                                                 size_t num_layers,
                                                 const bnshift_engine_config* cfg,
                                                 bnshift_engine** out);
BNSHIFT_API bnshift_status bnshift_engine_create_from_file(const char* source_path,
                                                           const bnshift_engine_config* cfg,
                                                           bnshift_engine** out);
BNSHIFT_API void bnshift_engine_destroy(bnshift_engine* engine);

BNSHIFT_API bnshift_status bnshift_engine_set_reset_hook(bnshift_engine* engine,
                                                         bnshift_reset_fn fn, void* user_data);

/* `out` may be NULL. It is filled even when the hook fails. */
BNSHIFT_API bnshift_status bnshift_engine_process_batch(bnshift_engine* engine, uint64_t t,
                                                        const bnshift_layer_stats* layers,
                                                        size_t num_layers,
                                                        bnshift_trace_record* out);

BNSHIFT_API uint64_t bnshift_engine_batches_processed(const bnshift_engine* engine);
BNSHIFT_API double bnshift_engine_alpha_max(const bnshift_engine* engine);
BNSHIFT_API size_t bnshift_engine_event_count(const bnshift_engine* engine);
BNSHIFT_API bnshift_status bnshift_engine_get_event(const bnshift_engine* engine, size_t index,
                                                    bnshift_event* out);

/* ---- file pipeline ----------------------------------------------------- */

typedef struct bnshift_scenario_config {
  size_t num_domains;
  size_t batches_per_domain;
  size_t batch_size;
  double domain_gap;
  uint64_t seed;
  size_t num_layers;
  const char* const* layer_ids; /* NULL names layers layer0, layer1, ... */
  size_t channels_per_layer;
} bnshift_scenario_config;

/* 15 domains x 78 batches, batch 128, gap 1.0, seed 0, 3 layers x 64 channels */
BNSHIFT_API void bnshift_scenario_config_init(bnshift_scenario_config* cfg);

BNSHIFT_API bnshift_status bnshift_simulate_files(const bnshift_scenario_config* cfg,
                                                  const char* stream_path,
                                                  const char* truth_path,
                                                  const char* source_path);

typedef struct bnshift_detect_summary {
  uint64_t batches;
  size_t peaks;
  size_t detections;
} bnshift_detect_summary;

/* trace_path and events_path may be NULL. */
BNSHIFT_API bnshift_status bnshift_detect_files(const char* stream_path, const char* source_path,
                                                const bnshift_engine_config* cfg,
                                                const char* trace_path, const char* events_path,
                                                bnshift_detect_summary* out);

typedef struct bnshift_eval_report {
  size_t true_positives;
  size_t false_positives;
  size_t false_negatives;
  double precision;
  double recall;
  double mean_detection_delay; /* meaningful only when has_delay */
  int has_delay;
} bnshift_eval_report;

/* report_path and json_out may be NULL; *json_out is freed with
 * bnshift_string_free. */
BNSHIFT_API bnshift_status bnshift_evaluate_files(const char* events_path, const char* truth_path,
                                                  size_t tolerance, const char* report_path,
                                                  bnshift_eval_report* out, char** json_out);

typedef struct bnshift_sweep_point {
  double threshold;
  size_t detections;
  bnshift_eval_report report;
} bnshift_sweep_point;

/* `out` holds num_thresholds entries or is NULL. */
BNSHIFT_API bnshift_status bnshift_sweep_files(const char* stream_path, const char* source_path,
                                               const char* truth_path, const double* thresholds,
                                               size_t num_thresholds,
                                               const bnshift_engine_config* base,
                                               size_t tolerance, const char* report_path,
                                               bnshift_sweep_point* out, char** json_out);

/* truth_path and events_path may be NULL. */
BNSHIFT_API bnshift_status bnshift_plot_files(const char* trace_path, const char* truth_path,
                                              const char* events_path, const char* svg_path);

#ifdef __cplusplus
}
#endif

#endif /* BNSHIFT_H */
