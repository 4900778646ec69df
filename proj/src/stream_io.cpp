#include "bnshift/stream_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "bnshift/errors.hpp"

namespace bnshift {

using nlohmann::json;

namespace {

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

std::string json_string(const std::string& s) { return json(s).dump(); }

bool is_blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

json parse_line(const std::string& text, std::size_t line) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(at_line(line) + "malformed JSON: " + e.what());
  }
}

const json& field(const json& obj, const char* key, std::size_t line) {
  if (!obj.is_object()) throw FormatError(at_line(line) + "expected a JSON object");
  auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(at_line(line) + "missing field '" + key + "'");
  return *it;
}

std::uint64_t as_index(const json& v, const char* what, std::size_t line) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  throw FormatError(at_line(line) + "'" + what + "' must be a non-negative integer");
}

double as_real(const json& v, const char* what, std::size_t line) {
  if (!v.is_number()) throw FormatError(at_line(line) + "'" + what + "' must be a number");
  return v.get<double>();
}

std::string as_string(const json& v, const char* what, std::size_t line) {
  if (!v.is_string()) throw FormatError(at_line(line) + "'" + what + "' must be a string");
  return v.get<std::string>();
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

void finish(std::ostream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void append_array(std::string& out, const std::vector<ChannelGaussian>& channels, bool means) {
  out += '[';
  for (std::size_t c = 0; c < channels.size(); ++c) {
    if (c) out += ',';
    out += format_double(means ? channels[c].mean : channels[c].variance);
  }
  out += ']';
}

std::string optional_real(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string("null");
}

double parse_csv_real(std::string_view s, const char* what, std::size_t line) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end) {
    throw FormatError(at_line(line) + "bad " + what + " '" + std::string(s) + "'");
  }
  return v;
}

std::uint64_t parse_csv_index(std::string_view s, std::size_t line) {
  std::uint64_t v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end) {
    throw FormatError(at_line(line) + "bad t '" + std::string(s) + "'");
  }
  return v;
}

TraceRecord parse_trace_csv(const std::string& text, std::size_t line) {
  std::vector<std::string_view> cols;
  std::string_view rest(text);
  if (!rest.empty() && rest.back() == '\r') rest.remove_suffix(1);
  while (true) {
    auto pos = rest.find(',');
    cols.push_back(rest.substr(0, pos));
    if (pos == std::string_view::npos) break;
    rest.remove_prefix(pos + 1);
  }
  if (cols.size() != 5) {
    throw FormatError(at_line(line) + "expected 5 columns, found " + std::to_string(cols.size()));
  }
  TraceRecord r;
  r.t = parse_csv_index(cols[0], line);
  r.alpha_raw = parse_csv_real(cols[1], "alpha_raw", line);
  r.alpha_bar = parse_csv_real(cols[2], "alpha_bar", line);
  if (!cols[3].empty()) r.z_score = parse_csv_real(cols[3], "z", line);
  if (cols[4] == "1") {
    r.is_peak = true;
  } else if (cols[4] != "0") {
    throw FormatError(at_line(line) + "is_peak must be 0 or 1");
  }
  return r;
}

TraceRecord parse_trace_json(const std::string& text, std::size_t line) {
  const auto obj = parse_line(text, line);
  TraceRecord r;
  r.t = as_index(field(obj, "t", line), "t", line);
  r.alpha_raw = as_real(field(obj, "alpha_raw", line), "alpha_raw", line);
  r.alpha_bar = as_real(field(obj, "alpha_bar", line), "alpha_bar", line);
  const auto& z = field(obj, "z", line);
  if (!z.is_null()) r.z_score = as_real(z, "z", line);
  const auto& peak = field(obj, "is_peak", line);
  if (!peak.is_boolean()) throw FormatError(at_line(line) + "'is_peak' must be a boolean");
  r.is_peak = peak.get<bool>();
  return r;
}

}  // namespace

std::string format_double(double value) {
  if (!std::isfinite(value)) throw ValidationError("cannot serialise a non-finite value");
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw Error("number formatting failed");
  return std::string(buf, ptr);
}

StreamWriter::StreamWriter(std::ostream& out, StreamHeader header)
    : out_(&out), header_(std::move(header)) {
  if (header_.format_version != kStreamFormatVersion) {
    throw FormatError("unsupported format_version " + std::to_string(header_.format_version));
  }
  if (header_.layers.empty()) throw SchemaError("stream header needs at least one layer");
  for (const auto& l : header_.layers) {
    if (l.channels == 0) throw SchemaError("layer '" + l.id + "' has zero channels");
  }
  if (!header_.metadata.is_null() && !header_.metadata.is_object()) {
    throw ValidationError("stream metadata must be a JSON object");
  }
  std::string line = "{\"format_version\":" + std::to_string(header_.format_version) +
                     ",\"layers\":[";
  for (std::size_t i = 0; i < header_.layers.size(); ++i) {
    if (i) line += ',';
    line += "{\"id\":" + json_string(header_.layers[i].id) +
            ",\"channels\":" + std::to_string(header_.layers[i].channels) + "}";
  }
  line += ']';
  if (header_.metadata.is_object()) line += ",\"metadata\":" + header_.metadata.dump();
  line += "}\n";
  *out_ << line;
}

void StreamWriter::write(const BatchSnapshot& batch) {
  if (batch.batch_index != next_index_) {
    throw ValidationError("batch index " + std::to_string(batch.batch_index) +
                          " out of order, expected " + std::to_string(next_index_));
  }
  check_schema(batch, header_.layers);
  std::string line = "{\"t\":" + std::to_string(batch.batch_index) + ",\"layers\":[";
  for (std::size_t i = 0; i < batch.layers.size(); ++i) {
    const auto& layer = batch.layers[i];
    if (i) line += ',';
    line += "{\"id\":" + json_string(layer.id) + ",\"mean\":";
    append_array(line, layer.channels, true);
    line += ",\"var\":";
    append_array(line, layer.channels, false);
    line += '}';
  }
  line += "]}\n";
  *out_ << line;
  ++next_index_;
}

StreamReader::StreamReader(std::istream& in) : in_(&in) {
  std::string text;
  if (!next_line(text)) throw FormatError("empty stream: missing header line");
  const auto obj = parse_line(text, line_);
  const auto& version = field(obj, "format_version", line_);
  if (!version.is_number_integer()) {
    throw FormatError(at_line(line_) + "'format_version' must be an integer");
  }
  header_.format_version = version.get<int>();
  if (header_.format_version != kStreamFormatVersion) {
    throw FormatError(at_line(line_) + "unsupported format_version " +
                      std::to_string(header_.format_version));
  }
  const auto& layers = field(obj, "layers", line_);
  if (!layers.is_array() || layers.empty()) {
    throw FormatError(at_line(line_) + "schema error: 'layers' must be a non-empty array");
  }
  for (const auto& l : layers) {
    LayerShape shape{as_string(field(l, "id", line_), "id", line_),
                     as_index(field(l, "channels", line_), "channels", line_)};
    if (shape.channels == 0) {
      throw FormatError(at_line(line_) + "schema error: layer '" + shape.id +
                        "' has zero channels");
    }
    for (const auto& prev : header_.layers) {
      if (prev.id == shape.id) {
        throw FormatError(at_line(line_) + "schema error: duplicate layer '" + shape.id + "'");
      }
    }
    header_.layers.push_back(std::move(shape));
  }
  if (auto it = obj.find("metadata"); it != obj.end() && !it->is_null()) {
    if (!it->is_object()) throw FormatError(at_line(line_) + "'metadata' must be an object");
    header_.metadata = *it;
  }
}

bool StreamReader::next_line(std::string& line) {
  while (std::getline(*in_, line)) {
    ++line_;
    if (!is_blank(line)) return true;
  }
  if (in_->bad()) throw IoError("read failure after line " + std::to_string(line_));
  return false;
}

std::optional<BatchSnapshot> StreamReader::next() {
  std::string text;
  if (!next_line(text)) return std::nullopt;
  const auto obj = parse_line(text, line_);

  BatchSnapshot batch;
  batch.batch_index = as_index(field(obj, "t", line_), "t", line_);
  if (batch.batch_index != next_index_) {
    throw FormatError(at_line(line_) + "batch index " + std::to_string(batch.batch_index) +
                      " out of order, expected " + std::to_string(next_index_));
  }
  const auto& layers = field(obj, "layers", line_);
  if (!layers.is_array()) throw FormatError(at_line(line_) + "'layers' must be an array");
  if (layers.size() != header_.layers.size()) {
    throw FormatError(at_line(line_) + "schema error: record has " +
                      std::to_string(layers.size()) + " layers, header declares " +
                      std::to_string(header_.layers.size()));
  }
  batch.layers.reserve(layers.size());
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    const auto& shape = header_.layers[i];
    auto id = as_string(field(l, "id", line_), "id", line_);
    if (id != shape.id) {
      bool known = false;
      for (const auto& s : header_.layers) known = known || s.id == id;
      throw FormatError(at_line(line_) + "schema error: " +
                        (known ? "layer '" + id + "' out of order, expected '" + shape.id + "'"
                               : "unknown layer '" + id + "'"));
    }
    const auto& mean = field(l, "mean", line_);
    const auto& var = field(l, "var", line_);
    if (!mean.is_array() || !var.is_array() || mean.size() != shape.channels ||
        var.size() != shape.channels) {
      throw FormatError(at_line(line_) + "schema error: layer '" + id + "' must carry " +
                        std::to_string(shape.channels) + " means and variances");
    }
    LayerSnapshot layer{std::move(id), {}};
    layer.channels.reserve(shape.channels);
    for (std::size_t c = 0; c < shape.channels; ++c) {
      const double m = as_real(mean[c], "mean", line_);
      const double v = as_real(var[c], "var", line_);
      if (v < 0.0) {
        throw FormatError(at_line(line_) + "negative variance in layer '" + layer.id +
                          "' channel " + std::to_string(c));
      }
      layer.channels.push_back({m, v});
    }
    batch.layers.push_back(std::move(layer));
  }
  ++next_index_;
  return batch;
}

void write_stream_file(const std::filesystem::path& path, const StreamHeader& header,
                       std::span<const BatchSnapshot> batches) {
  auto out = open_out(path);
  StreamWriter writer(out, header);
  for (const auto& b : batches) writer.write(b);
  finish(out, path);
}

StreamFile read_stream_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  StreamReader reader(in);
  StreamFile file{reader.header(), {}};
  while (auto b = reader.next()) file.batches.push_back(std::move(*b));
  return file;
}

void write_source_file(const std::filesystem::path& path, const BatchSnapshot& source,
                       const nlohmann::json& metadata) {
  StreamHeader header{kStreamFormatVersion, schema_of(source), metadata};
  BatchSnapshot record = source;
  record.batch_index = 0;
  write_stream_file(path, header, std::span(&record, 1));
}

BatchSnapshot read_source_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  StreamReader reader(in);
  auto record = reader.next();
  if (!record) throw FormatError("source file '" + path.string() + "' has no statistics record");
  if (reader.next()) {
    throw FormatError("source file '" + path.string() + "' must hold exactly one record");
  }
  return std::move(*record);
}

TraceFormat trace_format_for(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? TraceFormat::csv : TraceFormat::jsonl;
}

std::string trace_line(const TraceRecord& r, TraceFormat format) {
  if (format == TraceFormat::csv) {
    return std::to_string(r.t) + ',' + format_double(r.alpha_raw) + ',' +
           format_double(r.alpha_bar) + ',' + (r.z_score ? format_double(*r.z_score) : "") +
           ',' + (r.is_peak ? '1' : '0');
  }
  return "{\"t\":" + std::to_string(r.t) + ",\"alpha_raw\":" + format_double(r.alpha_raw) +
         ",\"alpha_bar\":" + format_double(r.alpha_bar) + ",\"z\":" + optional_real(r.z_score) +
         ",\"is_peak\":" + (r.is_peak ? "true" : "false") + "}";
}

void write_trace(std::ostream& out, std::span<const TraceRecord> records, TraceFormat format) {
  if (format == TraceFormat::csv) out << kTraceCsvHeader << '\n';
  for (const auto& r : records) out << trace_line(r, format) << '\n';
}

std::vector<TraceRecord> read_trace(std::istream& in, TraceFormat format) {
  std::vector<TraceRecord> out;
  std::string text;
  std::size_t line = 0;
  bool header_seen = format != TraceFormat::csv;
  while (std::getline(in, text)) {
    ++line;
    if (is_blank(text)) continue;
    if (!header_seen) {
      if (!text.empty() && text.back() == '\r') text.pop_back();
      if (text != kTraceCsvHeader) {
        throw FormatError(at_line(line) + "expected CSV header '" + kTraceCsvHeader + "'");
      }
      header_seen = true;
      continue;
    }
    auto r = format == TraceFormat::csv ? parse_trace_csv(text, line) : parse_trace_json(text, line);
    if (!out.empty() && r.t != out.back().t + 1) {
      throw FormatError(at_line(line) + "trace index " + std::to_string(r.t) + " out of order");
    }
    out.push_back(r);
  }
  return out;
}

void write_trace_file(const std::filesystem::path& path, std::span<const TraceRecord> records) {
  auto out = open_out(path);
  write_trace(out, records, trace_format_for(path));
  finish(out, path);
}

std::vector<TraceRecord> read_trace_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_trace(in, trace_format_for(path));
}

std::string event_line(const DetectionEvent& e) {
  return "{\"t\":" + std::to_string(e.t) + ",\"alpha_bar\":" + format_double(e.alpha_bar) +
         ",\"z_score\":" + format_double(e.z_score) + "}";
}

void write_events(std::ostream& out, std::span<const DetectionEvent> events) {
  for (const auto& e : events) out << event_line(e) << '\n';
}

std::vector<DetectionEvent> read_events(std::istream& in) {
  std::vector<DetectionEvent> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (is_blank(text)) continue;
    const auto obj = parse_line(text, line);
    out.push_back({as_index(field(obj, "t", line), "t", line),
                   as_real(field(obj, "alpha_bar", line), "alpha_bar", line),
                   as_real(field(obj, "z_score", line), "z_score", line)});
  }
  return out;
}

void write_events_file(const std::filesystem::path& path, std::span<const DetectionEvent> events) {
  auto out = open_out(path);
  write_events(out, events);
  finish(out, path);
}

std::vector<DetectionEvent> read_events_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_events(in);
}

void write_ground_truth(std::ostream& out, const GroundTruth& truth) {
  truth.validate();
  std::string text = "{\"change_points\":[";
  for (std::size_t i = 0; i < truth.change_points.size(); ++i) {
    if (i) text += ',';
    text += std::to_string(truth.change_points[i]);
  }
  text += "],\"labels\":[";
  for (std::size_t i = 0; i < truth.labels.size(); ++i) {
    if (i) text += ',';
    text += "{\"start\":" + std::to_string(truth.labels[i].start) +
            ",\"label\":" + json_string(truth.labels[i].label) + "}";
  }
  text += "]}\n";
  out << text;
}

GroundTruth read_ground_truth(std::istream& in) {
  std::stringstream buffer;
  buffer << in.rdbuf();
  json obj;
  try {
    obj = json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("malformed ground truth JSON: ") + e.what());
  }
  GroundTruth truth;
  const auto& cps = field(obj, "change_points", 1);
  if (!cps.is_array()) throw FormatError("'change_points' must be an array");
  for (const auto& c : cps) truth.change_points.push_back(as_index(c, "change_points", 1));
  if (auto it = obj.find("labels"); it != obj.end() && !it->is_null()) {
    if (!it->is_array()) throw FormatError("'labels' must be an array");
    for (const auto& l : *it) {
      truth.labels.push_back({as_index(field(l, "start", 1), "start", 1),
                              as_string(field(l, "label", 1), "label", 1)});
    }
  }
  truth.validate();
  return truth;
}

void write_ground_truth_file(const std::filesystem::path& path, const GroundTruth& truth) {
  auto out = open_out(path);
  write_ground_truth(out, truth);
  finish(out, path);
}

GroundTruth read_ground_truth_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_ground_truth(in);
}

}  // namespace bnshift
