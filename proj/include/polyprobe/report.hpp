#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polyprobe/detect.hpp"
#include "polyprobe/vertex_detect.hpp"

namespace polyprobe {

struct VertexHit {
  std::string source;  // probe name
  std::size_t vertex = 0;
  Point position;
  VertexCriterion criterion = VertexCriterion::CoupledMode;
  double residual = 0.0;
  bool degenerate = false;
  std::string note;
};

struct DetectionParams {
  InterfaceTolerance interface_tol;
  double vertex_tol = 1e-6;
  double kappa_threshold = 1e-6;
  double noise = 0.0;
  std::uint64_t seed = 0;
  bool paper_exact = false;
};

/// Every reported hit satisfies residual <= its tolerance.
struct DetectionReport {
  std::vector<InterfaceHit> interface_hits;
  std::vector<VertexHit> vertex_hits;
  DetectionParams params;
};

}  // namespace polyprobe
