#pragma once

#include <complex>
#include <vector>

namespace polyprobe {

/// Symmetric three-layer step-index slab: a core of thickness `thickness`
/// centred on x = 0 between two semi-infinite claddings.
struct SlabSpec {
  double n_core = 1.5;
  double n_clad = 1.0;
  double thickness = 1e-6;  // m
  double k0 = 0.0;          // rad/m, vacuum wavenumber
};

enum class Parity { Even, Odd };

struct GuidedMode {
  double beta = 0.0;     // rad/m
  double kappa_t = 0.0;  // rad/m, transverse wavenumber in the core
  double gamma = 0.0;    // 1/m, evanescent decay in the cladding
  Parity parity = Parity::Even;
  int order = 0;
  double residual = 0.0;  // normalised dispersion-relation residual at the root
};

/// cos(theta2) behind an interface for a TE wave arriving at `theta1`.
/// Beyond the critical angle the value is -i sqrt(n1^2 sin^2 theta1 / n2^2 - 1).
std::complex<double> tir_cos_theta2(double n1, double n2, double theta1);

/// Guided TE modes of the slab with order < max_modes, sorted by decreasing
/// beta. Roots are bracketed between consecutive multiples of pi/2 in
/// u = kappa_t d / 2 and refined by bisection.
std::vector<GuidedMode> solve_te_slab_modes(const SlabSpec& s, int max_modes);

/// Transverse profile E_y(x) with unit amplitude in the core:
/// cos(kappa_t x) or sin(kappa_t x) inside, continuous exponential tail outside.
double mode_profile(const GuidedMode& m, const SlabSpec& s, double x);

}  // namespace polyprobe
