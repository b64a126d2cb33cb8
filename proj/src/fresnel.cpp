#include "polyprobe/fresnel.hpp"

#include <cmath>
#include <string>

#include "polyprobe/error.hpp"

namespace polyprobe {

namespace {

void require_positive_indices(double n1, double n2) {
  if (!(n1 > 0.0) || !(n2 > 0.0) || !std::isfinite(n1) || !std::isfinite(n2))
    throw Error(ErrorKind::NonPositiveIndex,
                "refractive indices must be positive, got " + std::to_string(n1) + " and " +
                    std::to_string(n2));
}

}  // namespace

InterfaceCoefficients amplitude_coefficients_normal(double n1, double n2) {
  require_positive_indices(n1, n2);
  const double r = (n1 - n2) / (n1 + n2);
  return {r, 1.0 + r};
}

InterfaceFields apply_interface(std::complex<double> incident, double n1, double n2) {
  const InterfaceCoefficients c = amplitude_coefficients_normal(n1, n2);
  return {c.t * incident, c.r * incident};
}

double energy_residual(const InterfaceCoefficients& c, double n1, double n2) {
  return c.r * c.r + (n2 / n1) * c.t * c.t - 1.0;
}

void validate(const EmMedium& m) {
  if (!(m.index > 0.0) || !std::isfinite(m.index))
    throw Error(ErrorKind::NonPositiveIndex, "refractive index must be positive");
  if ((m.permittivity && !(*m.permittivity > 0.0)) ||
      (m.permeability && !(*m.permeability > 0.0)))
    throw Error(ErrorKind::InvalidArgument, "permittivity and permeability must be positive");
  if (m.chi3 && !std::isfinite(*m.chi3))
    throw Error(ErrorKind::InvalidArgument, "chi3 must be finite");
}

}  // namespace polyprobe
