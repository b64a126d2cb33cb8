#include "polyprobe/fwm.hpp"

#include <cmath>
#include <string>

#include "polyprobe/error.hpp"

namespace polyprobe {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

void validate(const FwmParams& p) {
  if (!(p.omega_s > 0.0) || !(p.k_s > 0.0))
    throw Error(ErrorKind::InvalidArgument, "omega_s and k_s must be positive");
  if (!std::isfinite(p.chi3_eff) || !std::isfinite(p.delta_k_z))
    throw Error(ErrorKind::InvalidArgument, "chi3 and mismatch must be finite");
}

}  // namespace

std::complex<double> fwm_drive(const FwmParams& p) {
  validate(p);
  return p.omega_s * p.omega_s * kMu0Eps0 / (2.0 * p.k_s) * p.chi3_eff * p.e1 * p.e2 * p.e3;
}

std::vector<SignalSample> integrate_signal(const FwmParams& p, double z_max, double step) {
  if (!(step > 0.0)) throw Error(ErrorKind::NonPositiveStep, "step must be positive");
  if (!(z_max >= 0.0)) throw Error(ErrorKind::InvalidArgument, "z_max must be >= 0");
  const std::complex<double> drive = fwm_drive(p);
  auto slope = [&](double z) { return -kI * drive * std::exp(-kI * (p.delta_k_z * z)); };

  std::vector<double> grid;
  const auto n = static_cast<std::size_t>(std::floor(z_max / step + 1e-9));
  for (std::size_t j = 0; j <= n; ++j) grid.push_back(static_cast<double>(j) * step);
  if (z_max - grid.back() > 1e-9 * step)
    grid.push_back(z_max);
  else
    grid.back() = z_max;

  std::vector<SignalSample> out;
  out.reserve(grid.size());
  std::complex<double> es{};
  out.push_back({grid[0], es});
  for (std::size_t j = 1; j < grid.size(); ++j) {
    const double z0 = grid[j - 1];
    const double h = grid[j] - z0;
    es += h / 6.0 * (slope(z0) + 4.0 * slope(z0 + 0.5 * h) + slope(z0 + h));
    out.push_back({grid[j], es});
  }
  return out;
}

std::complex<double> signal_field_sinc_squared(const FwmParams& p, double z) {
  if (p.delta_k_z == 0.0)
    throw Error(ErrorKind::ZeroMismatch,
                "closed form is singular at zero mismatch; integrate the signal instead");
  const double x = 0.5 * p.delta_k_z * z;
  const double sinc = x == 0.0 ? 1.0 : std::sin(x) / x;
  return fwm_drive(p) / p.delta_k_z * (sinc * sinc);
}

std::complex<double> degenerate_gain(const GainModel& m, double z) {
  return m.es0 * std::exp(m.g_s * z);
}

GainFit fit_gain(std::span<const SignalSample> trace) {
  const std::size_t n = trace.size();
  if (n < 3)
    throw Error(ErrorKind::TooFewSamples,
                "gain fit needs at least 3 samples, got " + std::to_string(n));
  double z_mean = 0.0, y_mean = 0.0;
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double amp = std::abs(trace[i].field);
    if (!(amp > 0.0) || !std::isfinite(amp))
      throw Error(ErrorKind::NonPositiveAmplitude,
                  "sample " + std::to_string(i) + " has non-positive amplitude");
    if (i > 0 && !(trace[i].z > trace[i - 1].z))
      throw Error(ErrorKind::InvalidArgument, "z must be strictly increasing");
    y[i] = std::log(amp);
    z_mean += trace[i].z;
    y_mean += y[i];
  }
  z_mean /= static_cast<double>(n);
  y_mean /= static_cast<double>(n);

  double szz = 0.0, szy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dz = trace[i].z - z_mean;
    szz += dz * dz;
    szy += dz * (y[i] - y_mean);
  }
  const double slope = szy / szz;
  const double intercept = y_mean - slope * z_mean;

  double sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (intercept + slope * trace[i].z);
    sq += e * e;
  }
  GainFit fit;
  fit.model = {std::exp(intercept), slope};
  fit.residual = std::sqrt(sq / static_cast<double>(n));
  return fit;
}

}  // namespace polyprobe
