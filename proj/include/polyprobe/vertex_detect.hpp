#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polyprobe/coupled_mode.hpp"
#include "polyprobe/detect.hpp"
#include "polyprobe/fwm.hpp"

namespace polyprobe {

enum class VertexCriterion { CoupledMode, Cascade, Fwm };

std::string_view to_string(VertexCriterion c) noexcept;

/// Closed z-interval selecting the samples a vertex criterion looks at.
struct ZWindow {
  double begin = 0.0;
  double end = 0.0;
};

/// Real coupled-mode parameters fitted with kappa11 = kappa22 = 0.
struct CoupledModeFit {
  double beta1 = 0.0;
  double beta2 = 0.0;
  double kappa12 = 0.0;
  double kappa21 = 0.0;
  double residual = 0.0;  // relative RMS misfit of (a, b)
  int evaluations = 0;
  bool degenerate = false;  // data carry no usable z-dynamics

  double kappa() const { return 0.5 * (kappa12 + kappa21); }
};

/// Least-squares fit of the coupled-mode equations to samples a(z), b(z) on a
/// uniform grid, predicting with the RK4 one-step map at the sample spacing.
///
/// The start point comes from the matrix logarithm of the least-squares
/// one-step propagator (directions the data never excite are taken to be
/// stationary). It is then refined by coordinate descent with shrinking steps
/// until every step falls below 1e-9 of the parameter scale or 1e4 objective
/// evaluations are spent.
CoupledModeFit fit_coupled_modes(std::span<const double> z, std::span<const cdouble> a,
                                 std::span<const cdouble> b);

struct CoupledModeOptions {
  double tol = 1e-6;              // accept when the fit residual is <= tol ...
  double kappa_threshold = 1e-6;  // ... and |kappa| exceeds this (rad/m)
};

struct CascadeOptions {
  double tol = 1e-3;
  double kappa_threshold = 1e-6;
};

struct FwmVertexOptions {
  double chi3 = 0.0;
  std::complex<double> e1{1.0, 0.0};
  std::complex<double> e2{1.0, 0.0};
  std::complex<double> e3{1.0, 0.0};
  double tol = 1e-6;
};

struct VertexVerdict {
  bool is_vertex = false;
  VertexCriterion criterion = VertexCriterion::CoupledMode;
  double residual = 0.0;  // the quantity compared against the tolerance
  bool degenerate = false;
  std::string note;
  std::vector<CoupledModeFit> stage_fits;  // one per coupled section
  std::optional<GainFit> gain;
};

/// The two traces are read as a(z) and b(z) of two coupled guides.
VertexVerdict detect_vertex_coupled_mode(const FieldTrace& trace_a, const FieldTrace& trace_b,
                                         const ZWindow& window,
                                         const CoupledModeOptions& opt = {});

/// Star of m >= 2 traces t_0 .. t_{m-1} around a candidate vertex, read as an
/// (m-1)-stage coupler cascade: arm 1 is t_0 throughout, arm 2 runs along
/// t_k in the k-th of m-1 equal sections of the window. Each section is
/// fitted as a coupler, the phase step of arm 2 between sections as a delay
/// line, and the resulting cascade must reproduce the measured output powers
/// stage by stage and end to end.
VertexVerdict detect_vertex_cascade(std::span<const FieldTrace> traces, const ZWindow& window,
                                    const CascadeOptions& opt = {});

/// Log-linear gain fit of |E_s| over the window; a vertex when the trace is
/// exponential within tolerance and the mixing process is active.
VertexVerdict detect_vertex_fwm(const FieldTrace& trace, const ZWindow& window,
                                const FwmVertexOptions& opt);

// Forward models producing the traces the vertex criteria consume.

/// a(z), b(z) from the coupled-mode integrator, one trace per ray (two rays).
std::vector<FieldTrace> synthesize_coupled_pair(const CoupledModeParams& p, cdouble a0,
                                                cdouble b0, std::span<const Ray> rays);

/// Star cascade for the layout read by detect_vertex_cascade. Section k uses
/// kappas[k] over samples_per_section grid steps; delay_phases[k] is the
/// phase lag of arm 2 between sections k and k+1.
struct StarCouplerSpec {
  std::vector<double> kappas;
  std::vector<double> delay_phases;
  double beta = 0.0;
  cdouble x1{1.0, 0.0};
  cdouble x2{0.0, 0.0};
  std::size_t samples_per_section = 64;
  double grid_step = 0.01;
};

/// Returns kappas.size() + 1 traces. Ray origins and directions are taken
/// from `rays`; their lengths and grid steps are overwritten.
std::vector<FieldTrace> synthesize_star_coupler(const StarCouplerSpec& spec,
                                                std::span<const Ray> rays,
                                                WaveKind kind = WaveKind::Em);

/// Samples of E_s(0) exp(g_s z) on the ray grid.
FieldTrace synthesize_gain_trace(const GainModel& m, const Ray& ray);

}  // namespace polyprobe
