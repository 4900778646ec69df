#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "bnshift/engine.hpp"
#include "bnshift/gaussian.hpp"
#include "bnshift/ground_truth.hpp"

namespace bnshift {

inline constexpr int kStreamFormatVersion = 1;

struct StreamHeader {
  int format_version = kStreamFormatVersion;
  Schema layers;
  nlohmann::json metadata;  // null or object

  friend bool operator==(const StreamHeader&, const StreamHeader&) = default;
};

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

/// Writes the header line on construction, then one line per batch. Batches
/// must follow the header schema with indices 0, 1, 2, ...
class StreamWriter {
 public:
  StreamWriter(std::ostream& out, StreamHeader header);

  void write(const BatchSnapshot& batch);
  std::uint64_t records_written() const { return next_index_; }
  const StreamHeader& header() const { return header_; }

 private:
  std::ostream* out_;
  StreamHeader header_;
  std::uint64_t next_index_ = 0;
};

/// Line-at-a-time reader; holds at most one record in memory. Every error is a
/// FormatError carrying the 1-based line number.
class StreamReader {
 public:
  explicit StreamReader(std::istream& in);

  const StreamHeader& header() const { return header_; }
  std::optional<BatchSnapshot> next();
  std::size_t line_number() const { return line_; }

 private:
  bool next_line(std::string& line);

  std::istream* in_;
  StreamHeader header_;
  std::size_t line_ = 0;
  std::uint64_t next_index_ = 0;
};

struct StreamFile {
  StreamHeader header;
  std::vector<BatchSnapshot> batches;
};

void write_stream_file(const std::filesystem::path& path, const StreamHeader& header,
                       std::span<const BatchSnapshot> batches);
StreamFile read_stream_file(const std::filesystem::path& path);

/// Source statistics use the stream format with a single record.
void write_source_file(const std::filesystem::path& path, const BatchSnapshot& source,
                       const nlohmann::json& metadata = {});
BatchSnapshot read_source_file(const std::filesystem::path& path);

enum class TraceFormat { csv, jsonl };

/// `.csv` selects CSV; anything else is JSONL.
TraceFormat trace_format_for(const std::filesystem::path& path);

void write_trace(std::ostream& out, std::span<const TraceRecord> records, TraceFormat format);
std::vector<TraceRecord> read_trace(std::istream& in, TraceFormat format);
void write_trace_file(const std::filesystem::path& path, std::span<const TraceRecord> records);
std::vector<TraceRecord> read_trace_file(const std::filesystem::path& path);

std::string trace_line(const TraceRecord& record, TraceFormat format);
inline constexpr const char* kTraceCsvHeader = "t,alpha_raw,alpha_bar,z,is_peak";

std::string event_line(const DetectionEvent& event);
void write_events(std::ostream& out, std::span<const DetectionEvent> events);
std::vector<DetectionEvent> read_events(std::istream& in);
void write_events_file(const std::filesystem::path& path, std::span<const DetectionEvent> events);
std::vector<DetectionEvent> read_events_file(const std::filesystem::path& path);

void write_ground_truth(std::ostream& out, const GroundTruth& truth);
GroundTruth read_ground_truth(std::istream& in);
void write_ground_truth_file(const std::filesystem::path& path, const GroundTruth& truth);
GroundTruth read_ground_truth_file(const std::filesystem::path& path);

}  // namespace bnshift
