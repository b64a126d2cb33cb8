#include "polyprobe/error.hpp"

namespace polyprobe {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DimensionalInhomogeneity: return "DimensionalInhomogeneity";
    case ErrorKind::FacetOvercount: return "FacetOvercount";
    case ErrorKind::DegenerateSimplex: return "DegenerateSimplex";
    case ErrorKind::KOutOfRange: return "KOutOfRange";
    case ErrorKind::UnknownVertex: return "UnknownVertex";
    case ErrorKind::NonPositiveIndex: return "NonPositiveIndex";
    case ErrorKind::AngleOutOfRange: return "AngleOutOfRange";
    case ErrorKind::ModeSlabMismatch: return "ModeSlabMismatch";
    case ErrorKind::NonPositiveStep: return "NonPositiveStep";
    case ErrorKind::BothZero: return "BothZero";
    case ErrorKind::NegativeLength: return "NegativeLength";
    case ErrorKind::MalformedSpec: return "MalformedSpec";
    case ErrorKind::ZeroMismatch: return "ZeroMismatch";
    case ErrorKind::NonPositiveAmplitude: return "NonPositiveAmplitude";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::NonPositiveImpedance: return "NonPositiveImpedance";
    case ErrorKind::PaperExactSingularity: return "PaperExactSingularity";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::RayOutsideComplex: return "RayOutsideComplex";
    case ErrorKind::ObliqueCrossing: return "ObliqueCrossing";
    case ErrorKind::WrongWaveKind: return "WrongWaveKind";
    case ErrorKind::WindowTooSmall: return "WindowTooSmall";
    case ErrorKind::TooFewTraces: return "TooFewTraces";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::ConfigParseError: return "ConfigParseError";
    case ErrorKind::SchemaMismatch: return "SchemaMismatch";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace polyprobe
