#include "bnshift/svg_plot.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <string>

#include "bnshift/errors.hpp"

namespace bnshift {

namespace {

constexpr double kMarginLeft = 50.0;
constexpr double kMarginRight = 15.0;
constexpr double kMarginTop = 30.0;
constexpr double kMarginBottom = 35.0;

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace

std::string render_alpha_svg(std::span<const TraceRecord> trace, const GroundTruth& truth,
                             std::span<const DetectionEvent> events,
                             const PlotOptions& options) {
  if (trace.empty()) throw ValidationError("cannot plot an empty trace");
  const auto t0 = trace.front().t;
  const auto t1 = trace.back().t;
  for (const auto c : truth.change_points) {
    if (c < t0 || c > t1) {
      throw ValidationError("change point " + std::to_string(c) + " outside trace range [" +
                            std::to_string(t0) + ", " + std::to_string(t1) + "]");
    }
  }
  for (const auto& e : events) {
    if (e.t < t0 || e.t > t1) {
      throw ValidationError("event at batch " + std::to_string(e.t) + " outside trace range [" +
                            std::to_string(t0) + ", " + std::to_string(t1) + "]");
    }
  }

  const double w = options.width;
  const double h = options.height;
  const double plot_w = w - kMarginLeft - kMarginRight;
  const double plot_h = h - kMarginTop - kMarginBottom;
  const double span_t = std::max<double>(static_cast<double>(t1 - t0), 1.0);
  double y_max = 1.0;
  for (const auto& r : trace) y_max = std::max(y_max, r.alpha_bar);

  auto x_of = [&](std::uint64_t t) {
    return kMarginLeft + plot_w * static_cast<double>(t - t0) / span_t;
  };
  auto y_of = [&](double v) { return kMarginTop + plot_h * (1.0 - v / y_max); };
  const double y_top = kMarginTop;
  const double y_bottom = kMarginTop + plot_h;

  std::string svg;
  svg += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
      "viewBox=\"0 0 {} {}\">\n",
      options.width, options.height, options.width, options.height);
  svg += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", options.width,
                     options.height);
  svg += fmt::format(
      "<text x=\"{:.1f}\" y=\"18\" font-family=\"sans-serif\" font-size=\"13\">{}</text>\n",
      kMarginLeft, escape(options.title));
  svg += fmt::format(
      "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\">"
      "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\"/>"
      "<line x1=\"{0:.2f}\" y1=\"{2:.2f}\" x2=\"{3:.2f}\" y2=\"{2:.2f}\"/></g>\n",
      kMarginLeft, y_top, y_bottom, kMarginLeft + plot_w);
  svg += fmt::format(
      "<g font-family=\"sans-serif\" font-size=\"11\">"
      "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:.3g}</text>"
      "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">0</text>"
      "<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>"
      "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{}</text></g>\n",
      kMarginLeft - 4, y_top + 4, y_max, kMarginLeft - 4, y_bottom, kMarginLeft, y_bottom + 16,
      t0, kMarginLeft + plot_w, y_bottom + 16, t1);

  svg += "<g class=\"truth\" stroke=\"#2a7ab0\" stroke-width=\"1\" stroke-dasharray=\"4,3\">\n";
  for (const auto c : truth.change_points) {
    svg += fmt::format(
        "<line class=\"truth-marker\" data-t=\"{0}\" x1=\"{1:.2f}\" y1=\"{2:.2f}\" "
        "x2=\"{1:.2f}\" y2=\"{3:.2f}\"/>\n",
        c, x_of(c), y_top, y_bottom);
  }
  svg += "</g>\n";

  svg += "<g class=\"events\" stroke=\"#e07b00\" stroke-width=\"1.5\">\n";
  for (const auto& e : events) {
    svg += fmt::format(
        "<line class=\"event-marker\" data-t=\"{0}\" x1=\"{1:.2f}\" y1=\"{2:.2f}\" "
        "x2=\"{1:.2f}\" y2=\"{3:.2f}\"/>\n",
        e.t, x_of(e.t), y_top, y_bottom);
  }
  svg += "</g>\n";

  svg += "<polyline class=\"alpha-bar\" fill=\"none\" stroke=\"black\" stroke-width=\"1\" "
         "points=\"";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (i) svg += ' ';
    svg += fmt::format("{:.2f},{:.2f}", x_of(trace[i].t), y_of(trace[i].alpha_bar));
  }
  svg += "\"/>\n</svg>\n";
  return svg;
}

}  // namespace bnshift
