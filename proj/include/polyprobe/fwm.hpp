#pragma once

#include <complex>
#include <span>
#include <vector>

namespace polyprobe {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s, exact
/// mu0 * eps0 = 1 / c^2.
inline constexpr double kMu0Eps0 = 1.0 / (kSpeedOfLight * kSpeedOfLight);

/// Degenerate four-wave mixing with undepleted, constant pumps.
struct FwmParams {
  double omega_s = 0.0;  // rad/s
  double k_s = 0.0;      // rad/m
  double chi3_eff = 0.0; // m^2/V^2
  std::complex<double> e1{};
  std::complex<double> e2{};
  std::complex<double> e3{};
  double delta_k_z = 0.0;  // rad/m, projection of the phase mismatch on z
};

struct SignalSample {
  double z;
  std::complex<double> field;
};

/// E_s(z) = E_s(0) exp(g_s z).
struct GainModel {
  std::complex<double> es0{1.0, 0.0};
  double g_s = 0.0;  // 1/m
};

struct GainFit {
  GainModel model;
  double residual = 0.0;  // RMS misfit of ln|E_s| against the fitted line
};

/// Coupling prefactor omega_s^2 mu0 eps0 chi3 E1 E2 E3 / (2 k_s).
std::complex<double> fwm_drive(const FwmParams& p);

/// Integrates dE_s/dz = -i drive exp(-i dk z) from E_s(0) = 0 with
/// Simpson quadrature on a uniform grid (last panel shortened to reach z_max).
std::vector<SignalSample> integrate_signal(const FwmParams& p, double z_max, double step);

/// drive / dk * [sin(dk z / 2) / (dk z / 2)]^2, the squared-sinc closed form.
/// Differs from the integral of the ODE, whose magnitude is
/// |drive| |sin(dk z / 2) / (dk / 2)|.
std::complex<double> signal_field_sinc_squared(const FwmParams& p, double z);

std::complex<double> degenerate_gain(const GainModel& m, double z);

/// Least-squares line through (z, ln|E_s|). Needs >= 3 samples with strictly
/// increasing z and nonzero amplitude.
GainFit fit_gain(std::span<const SignalSample> trace);

}  // namespace polyprobe
