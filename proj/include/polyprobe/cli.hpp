#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "polyprobe/error.hpp"
#include "polyprobe/scenario.hpp"
#include "polyprobe/trace_io.hpp"

namespace polyprobe {

/// Process exit status for an error kind: 2 config, 3 geometry, 4 schema,
/// 5 malformed cascade, 1 anything else.
int exit_code_for(ErrorKind k) noexcept;

/// All traces a scenario produces: one per ray (ids 0..), then the probe
/// traces in probe order. Trace `id` gets noise seeded with seed + id.
TraceSet simulate_scenario(const ScenarioConfig& cfg);

struct DetectionRun {
  DetectionReport report;
  std::vector<ProbeOutcome> probes;
};

/// Interface scan on every ray trace and the configured criterion on every
/// probe. Throws SchemaMismatch when the traces do not fit the scenario.
DetectionRun detect_scenario(const ScenarioConfig& cfg, const TraceSet& traces);

/// Entry point behind the `polyprobe` executable.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace polyprobe
