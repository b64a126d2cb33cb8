#pragma once

#include <complex>
#include <optional>

namespace polyprobe {

/// Lossless fluid. If a density is given, impedance must equal density * c.
struct AcousticMedium {
  double impedance = 0.0;    // Pa s/m
  double sound_speed = 0.0;  // m/s
  std::optional<double> density;  // kg/m^3
};

void validate(const AcousticMedium& m);

/// Forward and backward pressure amplitudes on a transmission line at
/// generalised (Laplace) frequency s.
struct LineState {
  std::complex<double> p_plus{};
  std::complex<double> p_minus{};
  std::complex<double> s{};
};

struct PressureVelocity {
  double p;  // Pa
  double u;  // m/s
};

/// p = Re[(p+ e^{-sx/c} + p- e^{sx/c}) e^{st}],
/// u = Re[(p+ e^{-sx/c} - p- e^{sx/c}) e^{st}] / Z.
PressureVelocity line_state(const LineState& st, const AcousticMedium& m, double x, double t);

/// Which denominator the intensity transmission uses.
///   EnergyConserving: T = 4 (Z2/Z1) / (Z2/Z1 + 1)^2, so T + R = 1.
///   Printed:          T = 4 (Z2/Z1) / (Z2/Z1 - 1)^2, singular at Z1 == Z2.
enum class TransmissionVariant { EnergyConserving, Printed };

struct IntensityCoefficients {
  double t_i;
  double r_i;
};

/// R = ((Z2/Z1 - 1) / (Z2/Z1 + 1))^2 in both variants.
IntensityCoefficients intensity_coefficients(
    double z1, double z2, TransmissionVariant v = TransmissionVariant::EnergyConserving);

struct IntensitySplit {
  double transmitted;
  double reflected;
};

IntensitySplit apply_acoustic_interface(double intensity, double z1, double z2);

}  // namespace polyprobe
