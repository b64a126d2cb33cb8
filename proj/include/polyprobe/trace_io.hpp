#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polyprobe/detect.hpp"
#include "polyprobe/report.hpp"
#include "polyprobe/vertex_detect.hpp"

namespace polyprobe {

inline constexpr const char* kTraceSchema = "polyprobe-traces/1";
inline constexpr const char* kReportSchema = "polyprobe-report/1";

enum class TraceSource { Ray, Probe };

struct TraceRecord {
  std::size_t id = 0;
  TraceSource source = TraceSource::Ray;
  std::size_t index = 0;    // ray index, or probe index
  std::string probe;        // probe name for probe traces
  FieldTrace trace;
};

struct TraceSet {
  WaveKind wave_kind = WaveKind::Em;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::vector<TraceRecord> traces;
};

/// Writes `path` (CSV: trace,z,incident_re,incident_im,reflected_re,
/// reflected_im,medium) and `path`.json with the ray geometry and run
/// metadata. Numbers carry 17 significant digits.
void write_traces(const std::filesystem::path& path, const TraceSet& set);

/// Throws SchemaMismatch when either file disagrees with the layout above.
TraceSet read_traces(const std::filesystem::path& path);

struct ProbeOutcome {
  std::string probe;
  std::size_t vertex = 0;
  VertexVerdict verdict;
};

/// CSV rows for interface and vertex hits plus `path`.json with tolerances,
/// seed, the acoustic transmission formula and every probe verdict.
void write_report(const std::filesystem::path& path, const DetectionReport& report,
                  WaveKind kind, std::span<const ProbeOutcome> probes = {});

DetectionReport read_report(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& path);

/// "%.17g"
std::string format_number(double x);

}  // namespace polyprobe
