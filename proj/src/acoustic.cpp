#include "polyprobe/acoustic.hpp"

#include <cmath>

#include "polyprobe/error.hpp"

namespace polyprobe {

void validate(const AcousticMedium& m) {
  if (!(m.impedance > 0.0))
    throw Error(ErrorKind::NonPositiveImpedance, "characteristic impedance must be positive");
  if (!(m.sound_speed > 0.0))
    throw Error(ErrorKind::InvalidArgument, "sound speed must be positive");
  if (m.density) {
    const double rho_c = *m.density * m.sound_speed;
    if (!(*m.density > 0.0) || std::abs(rho_c - m.impedance) > 1e-9 * m.impedance)
      throw Error(ErrorKind::InvalidArgument, "impedance must equal density * sound speed");
  }
}

PressureVelocity line_state(const LineState& st, const AcousticMedium& m, double x, double t) {
  validate(m);
  const std::complex<double> fwd = st.p_plus * std::exp(-st.s * x / m.sound_speed);
  const std::complex<double> bwd = st.p_minus * std::exp(st.s * x / m.sound_speed);
  const std::complex<double> time = std::exp(st.s * t);
  return {((fwd + bwd) * time).real(), ((fwd - bwd) * time).real() / m.impedance};
}

IntensityCoefficients intensity_coefficients(double z1, double z2, TransmissionVariant v) {
  if (!(z1 > 0.0) || !(z2 > 0.0))
    throw Error(ErrorKind::NonPositiveImpedance, "impedances must be positive");
  // Multiplied through by Z1^2: symmetric in (Z1, Z2) in floating point too.
  const double sum = z1 + z2;
  const double diff = z2 - z1;
  const double refl = diff / sum;
  const double r_i = refl * refl;
  if (v == TransmissionVariant::Printed) {
    if (diff == 0.0)
      throw Error(ErrorKind::PaperExactSingularity,
                  "4(Z2/Z1)/((Z2/Z1)-1)^2 diverges for equal impedances");
    return {4.0 * z1 * z2 / (diff * diff), r_i};
  }
  return {4.0 * z1 * z2 / (sum * sum), r_i};
}

IntensitySplit apply_acoustic_interface(double intensity, double z1, double z2) {
  if (!(intensity >= 0.0))
    throw Error(ErrorKind::InvalidArgument, "incident intensity must be >= 0");
  const IntensityCoefficients c = intensity_coefficients(z1, z2);
  return {c.t_i * intensity, c.r_i * intensity};
}

}  // namespace polyprobe
