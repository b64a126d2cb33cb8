#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "polyprobe/error.hpp"
#include "polyprobe/fwm.hpp"

using namespace polyprobe;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

FwmParams params(double dk) {
  FwmParams p;
  p.omega_s = 2.0 * kPi * kSpeedOfLight / 1.55e-6;
  p.k_s = 1.5 * p.omega_s / kSpeedOfLight;
  p.chi3_eff = 2e-20;
  p.e1 = 1e6;
  p.e2 = {0.0, 1e6};
  p.e3 = 2e6;
  p.delta_k_z = dk;
  return p;
}

std::vector<SignalSample> gain_samples(double g, double amp, std::size_t n, double dz) {
  std::vector<SignalSample> s;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = static_cast<double>(i) * dz;
    s.push_back({z, degenerate_gain({amp, g}, z)});
  }
  return s;
}

}  // namespace

TEST_CASE("drive prefactor") {
  const auto p = params(0.0);
  const double pref = p.omega_s * p.omega_s / (kSpeedOfLight * kSpeedOfLight) / (2.0 * p.k_s);
  CHECK(std::abs(fwm_drive(p)) == Approx(pref * 2e-20 * 2e18).epsilon(1e-14));
  CHECK(kMu0Eps0 == Approx(4e-7 * kPi * 8.8541878128e-12).epsilon(1e-9));
}

TEST_CASE("no nonlinearity, no signal") {
  auto p = params(50.0);
  p.chi3_eff = 0.0;
  for (const auto& s : integrate_signal(p, 0.01, 1e-4)) CHECK(s.field == std::complex<double>{});
}

TEST_CASE("phase matched growth is linear") {
  const auto p = params(0.0);
  const double rate = std::abs(fwm_drive(p));
  for (const auto& s : integrate_signal(p, 0.02, 1e-4)) {
    if (s.z == 0.0) continue;
    CHECK(std::abs(std::abs(s.field) - rate * s.z) <= 1e-8 * rate * s.z);
  }
}

TEST_CASE("mismatched growth follows |sin(dk z/2)/(dk/2)|") {
  const double dk = 300.0;
  const auto p = params(dk);
  const double rate = std::abs(fwm_drive(p));
  const auto sig = integrate_signal(p, 4.0 * kPi / dk, 1e-5);
  for (const auto& s : sig) {
    const double expect = rate * std::abs(std::sin(dk * s.z / 2.0) / (dk / 2.0));
    CHECK(std::abs(std::abs(s.field) - expect) < 1e-9 * rate / dk);
  }
  // Back to zero after one period.
  const auto period = integrate_signal(p, 2.0 * kPi / dk, 1e-5);
  CHECK(std::abs(period.back().field) < 1e-9 * rate / dk);
  CHECK_THROWS_AS(integrate_signal(p, 1.0, 0.0), Error);
}

TEST_CASE("squared-sinc closed form") {
  const double dk = 100.0;
  auto p = params(dk);
  const auto d = fwm_drive(p);
  // Bracket tends to one as dk z -> 0 and vanishes at dk z = 2 pi.
  CHECK(std::abs(signal_field_sinc_squared(p, 1e-9) * dk / d - 1.0) < 1e-12);
  CHECK(std::abs(signal_field_sinc_squared(p, 2.0 * kPi / dk)) < 1e-15 * std::abs(d));

  auto p2 = p;
  p2.e1 *= 2.0;
  p2.e2 *= 2.0;
  p2.e3 *= 2.0;
  const double z = 0.013;
  CHECK(std::abs(signal_field_sinc_squared(p2, z) / signal_field_sinc_squared(p, z) - 8.0) < 1e-12);

  // At dk z = pi the squared-sinc form is 2/pi^2 of the integrated magnitude.
  const double zpi = kPi / dk;
  const auto sig = integrate_signal(p, zpi, zpi / 2000.0);
  const double ratio = std::abs(signal_field_sinc_squared(p, zpi)) / std::abs(sig.back().field);
  CHECK(ratio == Approx(2.0 / (kPi * kPi)).epsilon(1e-10));

  p.delta_k_z = 0.0;
  try {
    signal_field_sinc_squared(p, 1.0);
    FAIL("expected ZeroMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ZeroMismatch);
  }
}

TEST_CASE("degenerate_gain") {
  CHECK(degenerate_gain({{0.3, 0.4}, 0.0}, 17.0) == std::complex<double>(0.3, 0.4));
  CHECK(std::abs(degenerate_gain({1.0, 0.5}, 2.0)) == Approx(std::exp(1.0)));
  double prev = 2.0;
  for (double z = 0.1; z < 5.0; z += 0.1) {
    const double a = std::abs(degenerate_gain({2.0, -0.3}, z));
    CHECK(a < prev);
    prev = a;
  }
}

TEST_CASE("fit_gain") {
  auto fit = fit_gain(gain_samples(0.3, 1.7, 40, 0.05));
  CHECK(std::abs(fit.model.g_s - 0.3) < 1e-10);
  CHECK(fit.residual < 1e-10);
  CHECK(std::abs(fit.model.es0) == Approx(1.7).epsilon(1e-10));

  fit = fit_gain(gain_samples(0.0, 2.0, 10, 0.1));
  CHECK(std::abs(fit.model.g_s) < 1e-14);

  // Squared-sinc amplitudes are far from a line in ln|E|.
  const auto p = params(100.0);
  std::vector<SignalSample> s;
  for (int i = 1; i <= 50; ++i) {
    const double z = 0.001 * i;
    s.push_back({z, signal_field_sinc_squared(p, z)});
  }
  CHECK(fit_gain(s).residual > 0.1);
}

TEST_CASE("fit_gain input checks") {
  auto s = gain_samples(0.1, 1.0, 2, 0.1);
  try {
    fit_gain(s);
    FAIL("expected TooFewSamples");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TooFewSamples);
  }
  s = gain_samples(0.1, 1.0, 5, 0.1);
  s[2].field = 0.0;
  try {
    fit_gain(s);
    FAIL("expected NonPositiveAmplitude");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonPositiveAmplitude);
  }
}
