#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "polyprobe/detect.hpp"
#include "polyprobe/report.hpp"
#include "polyprobe/vertex_detect.hpp"

namespace polyprobe {

struct MediumRecord {
  MediumId name;
  Medium medium;
  std::vector<std::size_t> simplices;
};

/// Forward model placed at a vertex of the complex. Coupled-mode and cascade
/// probes emit one trace per interface of the vertex star; four-wave-mixing
/// probes emit one trace along `direction` centred on the vertex.
struct VertexProbe {
  std::string name;
  std::size_t vertex = 0;
  VertexCriterion criterion = VertexCriterion::Cascade;
  std::vector<double> kappas;
  std::vector<double> delay_phases;
  double beta = 0.0;
  cdouble x1{1.0, 0.0};
  cdouble x2{0.0, 0.0};
  std::size_t samples_per_section = 64;
  double grid_step = 0.01;
  // four-wave mixing
  double gain = 0.0;
  double amplitude = 1.0;
  double length = 1.0;
  Point direction;
  std::optional<double> chi3;
  std::optional<MediumId> medium;
  std::array<double, 3> pumps{1.0, 1.0, 1.0};
};

struct DetectionSettings {
  DetectionParams params;
  std::vector<CandidatePair> candidates;  // empty: every pair of distinct media
};

struct ScenarioConfig {
  std::size_t dimension = 0;
  std::vector<Point> vertices;
  std::vector<Simplex> simplices;
  std::vector<MediumRecord> media;
  std::vector<Ray> rays;
  std::vector<VertexProbe> probes;
  DetectionSettings detection;

  WaveKind wave_kind() const;
  MediaTable media_table() const;
};

/// Parses the block-structured text format:
///
///   # comment
///   [geometry]
///   dimension = 1
///   vertex = 0
///   simplex = 0 1
///   [medium]
///   name = glass
///   kind = em
///   index = 1.5
///   simplices = 0
///   [ray]  [vertex_probe]  [detection]
///
/// Throws ConfigParseError with "name:line:column" diagnostics.
ScenarioConfig parse_scenario(std::string_view text, std::string_view source = "<config>");
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Builds the complex with each simplex's medium attached.
SimplicialComplex build_scenario_complex(const ScenarioConfig& cfg);

}  // namespace polyprobe
