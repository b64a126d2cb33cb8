#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace polyprobe {

enum class ErrorKind {
  // geometry
  DimensionalInhomogeneity,
  FacetOvercount,
  DegenerateSimplex,
  KOutOfRange,
  UnknownVertex,
  // wave physics
  NonPositiveIndex,
  AngleOutOfRange,
  ModeSlabMismatch,
  NonPositiveStep,
  BothZero,
  NegativeLength,
  MalformedSpec,
  ZeroMismatch,
  NonPositiveAmplitude,
  TooFewSamples,
  NonPositiveImpedance,
  PaperExactSingularity,
  InvalidArgument,
  // detection
  RayOutsideComplex,
  ObliqueCrossing,
  WrongWaveKind,
  WindowTooSmall,
  TooFewTraces,
  GridMismatch,
  // front end
  ConfigParseError,
  SchemaMismatch,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace polyprobe
