#pragma once

#include <complex>
#include <optional>

namespace polyprobe {

/// Isotropic, non-absorbing dielectric. Only the refractive index enters the
/// normal-incidence coefficients; permittivity and permeability are kept for
/// reference.
struct EmMedium {
  double index = 1.0;
  std::optional<double> permittivity;  // F/m
  std::optional<double> permeability;  // H/m
  std::optional<double> chi3;          // m^2/V^2, nonlinear media only
};

/// Amplitude ratios at a planar interface: t = E_transmitted / E_incident,
/// r = E_reflected / E_incident.
struct InterfaceCoefficients {
  double r = 0.0;
  double t = 1.0;
};

/// Normal-incidence coefficients, identical for TE and TM:
///   r = (n1 - n2) / (n1 + n2),  t = 2 n1 / (n1 + n2).
/// t is formed as 1 + r so field continuity holds bit-for-bit.
InterfaceCoefficients amplitude_coefficients_normal(double n1, double n2);

struct InterfaceFields {
  std::complex<double> transmitted;
  std::complex<double> reflected;
};

InterfaceFields apply_interface(std::complex<double> incident, double n1, double n2);

/// r^2 + (n2/n1) t^2 - 1. Zero up to rounding for physical coefficients.
double energy_residual(const InterfaceCoefficients& c, double n1, double n2);

void validate(const EmMedium& m);

}  // namespace polyprobe
