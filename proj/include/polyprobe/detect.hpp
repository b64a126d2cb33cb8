#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "polyprobe/acoustic.hpp"
#include "polyprobe/fresnel.hpp"
#include "polyprobe/geometry.hpp"

namespace polyprobe {

using Medium = std::variant<EmMedium, AcousticMedium>;
using MediaTable = std::map<MediumId, Medium>;

enum class WaveKind { Em, Acoustic };

std::string_view to_string(WaveKind k) noexcept;
WaveKind wave_kind_of(const Medium& m) noexcept;

/// Straight sampling line. Samples sit at z_j = j * grid_step, 0 <= z_j <= length.
struct Ray {
  Point origin;
  Point direction;  // unit length
  double length = 0.0;
  double grid_step = 0.0;

  Point at(double z) const;
  std::size_t sample_count() const;
};

void validate(const Ray& ray);

struct TraceSample {
  double z = 0.0;
  std::complex<double> incident{};
  std::complex<double> reflected{};
  MediumId medium;
};

/// Field values recovered along a ray. EM traces hold complex amplitudes;
/// acoustic traces hold intensities in the real part.
struct FieldTrace {
  Ray ray;
  WaveKind wave_kind = WaveKind::Em;
  std::vector<TraceSample> samples;
};

/// Point where the ray passes from one compartment into the next.
struct RayCrossing {
  double z;
  std::size_t from;
  std::size_t to;
  Simplex facet;
};

/// Walks the ray through the complex. Throws RayOutsideComplex if the ray
/// leaves the domain before its end and ObliqueCrossing if it meets an
/// interface off-normal or passes through a lower-dimensional face.
std::vector<RayCrossing> trace_ray(const SimplicialComplex& c, const Ray& ray);

/// Piecewise plane wave with unit incident value in the first compartment.
/// Crossing an interface scales the incident amplitude by t (EM) or the
/// intensity by T_I (acoustic); the last sample before the interface records
/// r (EM) or R_I (acoustic) times the local incident value. With
/// noise_sigma > 0 every value is multiplied by (1 + sigma N(0,1)) drawn from
/// a generator seeded with `seed`.
FieldTrace synthesize_ray_trace(const SimplicialComplex& c, const MediaTable& media,
                                const Ray& ray, double noise_sigma = 0.0,
                                std::uint64_t seed = 0);

/// Multiplicative Gaussian noise on the incident and reflected channels.
void apply_noise(FieldTrace& trace, double sigma, std::uint64_t seed);

/// Candidate (medium before, medium after) material constants: refractive
/// indices for EM, impedances for acoustic.
using CandidatePair = std::pair<double, double>;

struct InterfaceTolerance {
  double rel = 1e-6;
  double floor = 1e-3;  // lower bound on |r| when scaling the reflection test
};

struct InterfaceHit {
  std::size_t trace_id = 0;
  double z = 0.0;
  Point position;
  std::complex<double> t_measured{};
  std::complex<double> r_measured{};
  CandidatePair pair{};
  double residual = 0.0;
};

/// Scans adjacent sample pairs for t_hat = incident[j+1] / incident[j] and
/// r_hat = reflected[j] / incident[j] matching some candidate within
/// tolerance. Runs of flagged pairs merge into one hit at the first z.
/// Candidates with equal constants are ignored.
std::vector<InterfaceHit> detect_interfaces_em(const FieldTrace& trace,
                                               std::span<const CandidatePair> candidates,
                                               const InterfaceTolerance& tol,
                                               std::size_t trace_id = 0);

std::vector<InterfaceHit> detect_interfaces_acoustic(
    const FieldTrace& trace, std::span<const CandidatePair> candidates,
    const InterfaceTolerance& tol,
    TransmissionVariant variant = TransmissionVariant::EnergyConserving,
    std::size_t trace_id = 0);

/// All ordered pairs of distinct material constants present in `media` for
/// the given wave kind, ascending.
std::vector<CandidatePair> candidate_pairs(const MediaTable& media, WaveKind kind);

}  // namespace polyprobe
