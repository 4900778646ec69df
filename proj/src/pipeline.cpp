#include "bnshift/pipeline.hpp"

#include <fstream>

#include "bnshift/errors.hpp"
#include "bnshift/stream_io.hpp"
#include "bnshift/svg_plot.hpp"

namespace bnshift {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void close_out(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  close_out(out, path);
}

}  // namespace

void simulate_to_files(const ScenarioConfig& cfg, const std::filesystem::path& stream_path,
                       const std::filesystem::path& truth_path,
                       const std::filesystem::path& source_path) {
  const auto scenario = generate_scenario(cfg);
  nlohmann::json meta;
  meta["generator"] = "bnshift simulate";
  meta["batch_size"] = cfg.batch_size;
  meta["domain_gap"] = cfg.domain_gap;
  meta["seed"] = cfg.rng_seed;
  write_stream_file(stream_path, {kStreamFormatVersion, cfg.layers, meta}, scenario.stream);
  write_ground_truth_file(truth_path, scenario.truth);
  write_source_file(source_path, scenario.source, meta);
}

DetectSummary detect_files(const std::filesystem::path& stream_path,
                           const std::filesystem::path& source_path, const EngineConfig& cfg,
                           const OptionalPath& trace_path, const OptionalPath& events_path,
                           ResetHook* hook) {
  Engine engine(read_source_file(source_path), cfg);

  std::ifstream in(stream_path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + stream_path.string() + "' for reading");
  StreamReader reader(in);
  if (reader.header().layers != engine.momentum().schema()) {
    // Reuse the per-layer diagnostics of the batch check.
    BatchSnapshot probe;
    for (const auto& l : reader.header().layers) {
      probe.layers.push_back({l.id, std::vector<ChannelGaussian>(l.channels)});
    }
    check_schema(probe, engine.momentum().schema());
  }

  std::ofstream trace_out;
  std::ofstream events_out;
  const auto format = trace_path ? trace_format_for(*trace_path) : TraceFormat::jsonl;
  if (trace_path) {
    trace_out = open_out(*trace_path);
    if (format == TraceFormat::csv) trace_out << kTraceCsvHeader << '\n';
  }
  if (events_path) events_out = open_out(*events_path);

  DetectSummary summary;
  while (auto batch = reader.next()) {
    const auto before = engine.events().size();
    const auto record = engine.process_batch(*batch, hook);
    ++summary.batches;
    if (record.is_peak) ++summary.peaks;
    if (trace_path) trace_out << trace_line(record, format) << '\n';
    if (events_path && engine.events().size() > before) {
      events_out << event_line(engine.events().back()) << '\n';
    }
  }
  summary.detections = engine.events().size();
  if (trace_path) close_out(trace_out, *trace_path);
  if (events_path) close_out(events_out, *events_path);
  return summary;
}

EvalReport evaluate_files(const std::filesystem::path& events_path,
                          const std::filesystem::path& truth_path, const EvalConfig& cfg,
                          const OptionalPath& report_path) {
  const auto events = read_events_file(events_path);
  const auto truth = read_ground_truth_file(truth_path);
  const auto report = evaluate(events, truth, cfg);
  if (report_path) write_json(*report_path, to_json(report));
  return report;
}

std::vector<SweepPoint> sweep_files(const std::filesystem::path& stream_path,
                                    const std::filesystem::path& source_path,
                                    const std::filesystem::path& truth_path,
                                    std::span<const double> thresholds, const EngineConfig& base,
                                    const EvalConfig& eval, const OptionalPath& report_path) {
  const auto source = read_source_file(source_path);
  const auto stream = read_stream_file(stream_path);
  const auto truth = read_ground_truth_file(truth_path);
  for (const double t : thresholds) {
    PeakDetectorConfig probe = base.peak;
    probe.threshold = t;
    probe.validate();
  }
  auto sweep = threshold_sweep(source, stream.batches, truth, thresholds, base, eval);
  if (report_path) write_json(*report_path, to_json(sweep));
  return sweep;
}

void plot_files(const std::filesystem::path& trace_path, const OptionalPath& truth_path,
                const OptionalPath& events_path, const std::filesystem::path& svg_path) {
  const auto trace = read_trace_file(trace_path);
  const auto truth = truth_path ? read_ground_truth_file(*truth_path) : GroundTruth{};
  const auto events =
      events_path ? read_events_file(*events_path) : std::vector<DetectionEvent>{};
  const auto svg = render_alpha_svg(trace, truth, events);
  auto out = open_out(svg_path);
  out << svg;
  close_out(out, svg_path);
}

}  // namespace bnshift
