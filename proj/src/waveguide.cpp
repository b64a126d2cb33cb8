#include "polyprobe/waveguide.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "polyprobe/error.hpp"

namespace polyprobe {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

void validate(const SlabSpec& s) {
  if (!(s.n_core > 0.0) || !(s.n_clad > 0.0))
    throw Error(ErrorKind::NonPositiveIndex, "slab indices must be positive");
  if (!(s.thickness > 0.0) || !(s.k0 > 0.0))
    throw Error(ErrorKind::InvalidArgument, "slab thickness and k0 must be positive");
}

// Pole-free forms of tan(u) = w/u (even) and tan(u) = -u/w (odd), scaled by
// 1/V so the residual is dimensionless and O(1)-sensitive near every root.
double dispersion(Parity p, double u, double v) {
  const double w = std::sqrt(std::max(v * v - u * u, 0.0));
  const double f = p == Parity::Even ? u * std::sin(u) - w * std::cos(u)
                                     : u * std::cos(u) + w * std::sin(u);
  return f / v;
}

}  // namespace

std::complex<double> tir_cos_theta2(double n1, double n2, double theta1) {
  if (!(n1 > 0.0) || !(n2 > 0.0))
    throw Error(ErrorKind::NonPositiveIndex, "indices must be positive");
  if (!(theta1 >= 0.0) || !(theta1 < kHalfPi))
    throw Error(ErrorKind::AngleOutOfRange,
                "incidence angle must lie in [0, pi/2), got " + std::to_string(theta1));
  const double s = n1 * std::sin(theta1) / n2;
  const double s2 = s * s;
  if (s > 1.0) return {0.0, -std::sqrt(s2 - 1.0)};
  return {std::sqrt(1.0 - s2), 0.0};
}

std::vector<GuidedMode> solve_te_slab_modes(const SlabSpec& s, int max_modes) {
  validate(s);
  std::vector<GuidedMode> modes;
  if (s.n_core <= s.n_clad || max_modes <= 0) return modes;

  const double half_d = s.thickness / 2.0;
  const double na2 = s.n_core * s.n_core - s.n_clad * s.n_clad;
  const double v = s.k0 * half_d * std::sqrt(na2);

  // Mode of order m has u in [m pi/2, (m+1) pi/2); even orders are even modes.
  for (int order = 0; order < max_modes; ++order) {
    const double lo0 = order * kHalfPi;
    if (lo0 >= v) break;
    const Parity parity = order % 2 == 0 ? Parity::Even : Parity::Odd;
    double lo = lo0;
    double hi = std::min((order + 1) * kHalfPi, v);
    double f_lo = dispersion(parity, lo, v);
    if (f_lo == 0.0) continue;  // root exactly at cutoff, not guided
    while (true) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double f_mid = dispersion(parity, mid, v);
      if (f_mid == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((f_mid < 0.0) == (f_lo < 0.0)) {
        lo = mid;
        f_lo = f_mid;
      } else {
        hi = mid;
      }
    }
    const double f_left = std::abs(dispersion(parity, lo, v));
    const double f_right = std::abs(dispersion(parity, hi, v));
    const double u = f_left <= f_right ? lo : hi;
    const double w = std::sqrt(std::max(v * v - u * u, 0.0));
    if (!(u > 0.0) || !(w > 0.0)) continue;

    GuidedMode m;
    m.kappa_t = u / half_d;
    m.gamma = w / half_d;
    m.beta = std::sqrt(s.n_core * s.n_core * s.k0 * s.k0 - m.kappa_t * m.kappa_t);
    m.parity = parity;
    m.order = order;
    m.residual = std::abs(dispersion(parity, u, v));
    modes.push_back(m);
  }
  std::sort(modes.begin(), modes.end(),
            [](const GuidedMode& a, const GuidedMode& b) { return a.beta > b.beta; });
  return modes;
}

double mode_profile(const GuidedMode& m, const SlabSpec& s, double x) {
  validate(s);
  const double k2 = s.k0 * s.k0;
  const double expected = k2 * (s.n_core * s.n_core - s.n_clad * s.n_clad);
  const double got = m.kappa_t * m.kappa_t + m.gamma * m.gamma;
  const double beta_core = s.n_core * s.n_core * k2 - m.kappa_t * m.kappa_t;
  if (!(expected > 0.0) || std::abs(got - expected) > 1e-6 * expected ||
      std::abs(m.beta * m.beta - beta_core) > 1e-6 * s.n_core * s.n_core * k2)
    throw Error(ErrorKind::ModeSlabMismatch, "mode constants do not belong to this slab");

  const double half_d = s.thickness / 2.0;
  const double v = s.k0 * half_d * std::sqrt(s.n_core * s.n_core - s.n_clad * s.n_clad);
  if (std::abs(dispersion(m.parity, m.kappa_t * half_d, v)) > 1e-6)
    throw Error(ErrorKind::ModeSlabMismatch, "mode does not solve this slab's dispersion relation");
  const double ax = std::abs(x);
  const bool even = m.parity == Parity::Even;
  if (ax <= half_d) return even ? std::cos(m.kappa_t * x) : std::sin(m.kappa_t * x);
  const double edge = even ? std::cos(m.kappa_t * half_d) : std::sin(m.kappa_t * half_d);
  const double sign = (!even && x < 0.0) ? -1.0 : 1.0;
  return sign * edge * std::exp(-m.gamma * (ax - half_d));
}

}  // namespace polyprobe
