// Command-line front end. Links only against the C interface.

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bnshift/bnshift.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;

int report(bnshift_status status, const char* command) {
  if (status == BNSHIFT_OK) return 0;
  std::fprintf(stderr, "bnshift %s: %s\n", command, bnshift_last_error());
  return status == BNSHIFT_ERR_VALIDATION ? kExitUsage : kExitIo;
}

struct EngineFlags {
  std::size_t window = 10;
  double threshold = 15.0;
  double influence = 0.1;
  std::string layer_filter;
  std::size_t cooldown = 0;

  void add_to(CLI::App* cmd, bool with_threshold) {
    cmd->add_option("--window", window, "Sliding window size")->capture_default_str();
    if (with_threshold) {
      cmd->add_option("--threshold", threshold, "Z-score threshold")->capture_default_str();
    }
    cmd->add_option("--influence", influence, "Influence of each window on running stats")
        ->capture_default_str();
    cmd->add_option("--layer-filter", layer_filter,
                    "Only layers whose id starts with this prefix drive the momentum");
    cmd->add_option("--cooldown", cooldown, "Suppress events within N batches of the last one")
        ->capture_default_str();
  }

  bnshift_engine_config to_c() const {
    bnshift_engine_config cfg;
    bnshift_engine_config_init(&cfg);
    cfg.window_size = window;
    cfg.threshold = threshold;
    cfg.influence = influence;
    cfg.cooldown_batches = cooldown;
    cfg.layer_prefix = layer_filter.empty() ? nullptr : layer_filter.c_str();
    return cfg;
  }
};

const char* or_null(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

void print_and_free(char* json) {
  if (json == nullptr) return;
  std::printf("%s\n", json);
  bnshift_string_free(json);
}

std::vector<std::string> split_layers(const std::string& spec, std::size_t& count) {
  std::vector<std::string> ids;
  if (spec.find_first_not_of("0123456789") == std::string::npos && !spec.empty()) {
    count = std::stoul(spec);
    return ids;
  }
  std::size_t start = 0;
  while (start <= spec.size()) {
    const auto end = spec.find(',', start);
    ids.push_back(spec.substr(start, end == std::string::npos ? std::string::npos : end - start));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  count = ids.size();
  return ids;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming domain-shift detection from batch-normalisation statistics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(bnshift_version()));

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic multi-domain stream");
  bnshift_scenario_config scenario;
  bnshift_scenario_config_init(&scenario);
  std::string layer_spec = "3";
  std::string sim_out = "stream.jsonl";
  std::string sim_truth = "truth.json";
  std::string sim_source = "source.jsonl";
  simulate->add_option("--domains", scenario.num_domains, "Number of domains")
      ->capture_default_str();
  simulate->add_option("--batches-per-domain", scenario.batches_per_domain)
      ->capture_default_str();
  simulate->add_option("--layers", layer_spec, "Layer count, or comma-separated layer ids")
      ->capture_default_str();
  simulate->add_option("--channels", scenario.channels_per_layer, "Channels per layer")
      ->capture_default_str();
  simulate->add_option("--batch-size", scenario.batch_size)->capture_default_str();
  simulate->add_option("--gap", scenario.domain_gap, "Domain gap in within-domain sigmas")
      ->capture_default_str();
  simulate->add_option("--seed", scenario.seed)->capture_default_str();
  simulate->add_option("--out", sim_out, "Stream output (JSONL)")->capture_default_str();
  simulate->add_option("--truth", sim_truth, "Ground-truth output (JSON)")->capture_default_str();
  simulate->add_option("--source", sim_source, "Source statistics output (JSONL)")
      ->capture_default_str();

  // detect
  auto* detect = app.add_subcommand("detect", "Run the detector over a statistics stream");
  EngineFlags detect_flags;
  std::string det_input;
  std::string det_source;
  std::string det_trace;
  std::string det_events;
  detect->add_option("--input", det_input, "Stream file (JSONL)")->required();
  detect->add_option("--source", det_source, "Source statistics file (JSONL)")->required();
  detect_flags.add_to(detect, true);
  detect->add_option("--trace", det_trace, "Trace output (.csv or .jsonl)");
  detect->add_option("--events", det_events, "Detection events output (JSONL)");

  // eval
  auto* eval = app.add_subcommand("eval", "Score detection events against ground truth");
  std::string ev_events;
  std::string ev_truth;
  std::string ev_out;
  std::size_t ev_tolerance = 3;
  eval->add_option("--events", ev_events)->required();
  eval->add_option("--truth", ev_truth)->required();
  eval->add_option("--tolerance", ev_tolerance, "Batches after a change that still count")
      ->capture_default_str();
  eval->add_option("--out", ev_out, "Report output (JSON)");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Evaluate several detection thresholds");
  EngineFlags sweep_flags;
  std::string sw_input;
  std::string sw_source;
  std::string sw_truth;
  std::string sw_out;
  std::vector<double> sw_thresholds = {5, 10, 15, 20};
  std::size_t sw_tolerance = 3;
  sweep->add_option("--input", sw_input)->required();
  sweep->add_option("--source", sw_source)->required();
  sweep->add_option("--truth", sw_truth)->required();
  sweep->add_option("--thresholds", sw_thresholds)->delimiter(',')->capture_default_str();
  sweep->add_option("--tolerance", sw_tolerance)->capture_default_str();
  sweep_flags.add_to(sweep, false);
  sweep->add_option("--out", sw_out, "Report output (JSON)");

  // plot
  auto* plot = app.add_subcommand("plot", "Render the momentum trace as SVG");
  std::string pl_trace;
  std::string pl_truth;
  std::string pl_events;
  std::string pl_out = "alpha.svg";
  plot->add_option("--trace", pl_trace)->required();
  plot->add_option("--truth", pl_truth);
  plot->add_option("--events", pl_events);
  plot->add_option("--out", pl_out)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  if (simulate->parsed()) {
    std::size_t count = 0;
    std::vector<std::string> ids;
    try {
      ids = split_layers(layer_spec, count);
    } catch (const std::exception&) {
      std::fprintf(stderr, "bnshift simulate: bad --layers '%s'\n", layer_spec.c_str());
      return kExitUsage;
    }
    std::vector<const char*> id_ptrs;
    for (const auto& id : ids) id_ptrs.push_back(id.c_str());
    scenario.num_layers = count;
    scenario.layer_ids = ids.empty() ? nullptr : id_ptrs.data();
    const auto status = bnshift_simulate_files(&scenario, sim_out.c_str(), sim_truth.c_str(),
                                               sim_source.c_str());
    if (status == BNSHIFT_OK) {
      std::printf("wrote %zu batches (%zu domains) to %s\n",
                  scenario.num_domains * scenario.batches_per_domain, scenario.num_domains,
                  sim_out.c_str());
    }
    return report(status, "simulate");
  }

  if (detect->parsed()) {
    const auto cfg = detect_flags.to_c();
    bnshift_detect_summary summary{};
    const auto status = bnshift_detect_files(det_input.c_str(), det_source.c_str(), &cfg,
                                             or_null(det_trace), or_null(det_events), &summary);
    if (status == BNSHIFT_OK) {
      std::printf("batches processed: %llu\npeaks: %zu\ndetections: %zu\n",
                  static_cast<unsigned long long>(summary.batches), summary.peaks,
                  summary.detections);
    }
    return report(status, "detect");
  }

  if (eval->parsed()) {
    char* json = nullptr;
    const auto status = bnshift_evaluate_files(ev_events.c_str(), ev_truth.c_str(), ev_tolerance,
                                               or_null(ev_out), nullptr, &json);
    print_and_free(json);
    return report(status, "eval");
  }

  if (sweep->parsed()) {
    const auto cfg = sweep_flags.to_c();
    char* json = nullptr;
    const auto status = bnshift_sweep_files(
        sw_input.c_str(), sw_source.c_str(), sw_truth.c_str(), sw_thresholds.data(),
        sw_thresholds.size(), &cfg, sw_tolerance, or_null(sw_out), nullptr, &json);
    print_and_free(json);
    return report(status, "sweep");
  }

  if (plot->parsed()) {
    const auto status = bnshift_plot_files(pl_trace.c_str(), or_null(pl_truth),
                                           or_null(pl_events), pl_out.c_str());
    if (status == BNSHIFT_OK) std::printf("wrote %s\n", pl_out.c_str());
    return report(status, "plot");
  }
  return kExitUsage;
}
