#include "polyprobe/coupled_mode.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "polyprobe/error.hpp"

namespace polyprobe {

namespace {

constexpr cdouble kI{0.0, 1.0};

void require_non_negative(double l, const char* what) {
  if (!(l >= 0.0)) throw Error(ErrorKind::NegativeLength, std::string(what) + " must be >= 0");
}

}  // namespace

ModeTrajectory integrate_coupled_modes(const CoupledModeParams& p, double z_max, double step,
                                       cdouble a0, cdouble b0) {
  if (!(step > 0.0)) throw Error(ErrorKind::NonPositiveStep, "step must be positive");
  if (!(z_max >= step))
    throw Error(ErrorKind::InvalidArgument, "z_max must be at least one step");

  const cdouble m11 = p.beta1 + p.kappa11;
  const cdouble m22 = p.beta2 + p.kappa22;
  auto rhs = [&](cdouble a, cdouble b) {
    return std::pair{-kI * (m11 * a + p.kappa12 * b), -kI * (m22 * b + p.kappa21 * a)};
  };

  // z_j = j * step, with the final node snapped to (or appended at) z_max.
  std::vector<double> grid;
  const auto full_steps = static_cast<std::size_t>(std::floor(z_max / step + 1e-9));
  grid.reserve(full_steps + 2);
  for (std::size_t j = 0; j <= full_steps; ++j) grid.push_back(static_cast<double>(j) * step);
  if (z_max - grid.back() > 1e-9 * step)
    grid.push_back(z_max);
  else
    grid.back() = z_max;

  ModeTrajectory out;
  out.z = grid;
  out.a.reserve(grid.size());
  out.b.reserve(grid.size());
  cdouble a = a0, b = b0;
  out.a.push_back(a);
  out.b.push_back(b);
  for (std::size_t j = 1; j < grid.size(); ++j) {
    const double h = grid[j] - grid[j - 1];
    const auto [ka1, kb1] = rhs(a, b);
    const auto [ka2, kb2] = rhs(a + 0.5 * h * ka1, b + 0.5 * h * kb1);
    const auto [ka3, kb3] = rhs(a + 0.5 * h * ka2, b + 0.5 * h * kb2);
    const auto [ka4, kb4] = rhs(a + h * ka3, b + h * kb3);
    a += h / 6.0 * (ka1 + 2.0 * ka2 + 2.0 * ka3 + ka4);
    b += h / 6.0 * (kb1 + 2.0 * kb2 + 2.0 * kb3 + kb4);
    out.a.push_back(a);
    out.b.push_back(b);
  }
  return out;
}

double default_step(const CoupledModeParams& p) {
  const double beta = std::max(std::abs(p.beta1), std::abs(p.beta2));
  if (!(beta > 0.0))
    throw Error(ErrorKind::InvalidArgument, "default step needs a nonzero propagation constant");
  return 1e-3 * (2.0 * std::numbers::pi / beta);
}

PowerSplit closed_form_power(double delta_beta, double kappa, double z) {
  if (delta_beta == 0.0 && kappa == 0.0)
    throw Error(ErrorKind::BothZero, "delta_beta and kappa are both zero");
  const double omega2 = 0.25 * delta_beta * delta_beta + kappa * kappa;
  const double s = std::sin(std::sqrt(omega2) * z);
  const double pb = kappa * kappa / omega2 * s * s;
  return {1.0 - pb, pb};
}

Eigen::Matrix2cd coupler_matrix(double kappa, double length) {
  require_non_negative(length, "coupler length");
  const double c = std::cos(kappa * length);
  const cdouble s = -kI * std::sin(kappa * length);
  Eigen::Matrix2cd t;
  t << c, s, s, c;
  return t;
}

Eigen::Matrix2cd delay_matrix(double beta, double l1, double l2) {
  require_non_negative(l1, "delay arm length L1");
  require_non_negative(l2, "delay arm length L2");
  Eigen::Matrix2cd t = Eigen::Matrix2cd::Zero();
  t(0, 0) = std::exp(-kI * (beta * l1));
  t(1, 1) = std::exp(-kI * (beta * l2));
  return t;
}

void validate(const CascadeSpec& spec) {
  if (spec.stages.empty()) throw Error(ErrorKind::MalformedSpec, "cascade has no stages");
  for (std::size_t i = 0; i < spec.stages.size(); ++i) {
    const bool want_coupler = i % 2 == 0;
    if (std::holds_alternative<CouplerStage>(spec.stages[i]) != want_coupler)
      throw Error(ErrorKind::MalformedSpec,
                  "stage " + std::to_string(i) + " should be a " +
                      (want_coupler ? "coupler" : "delay line"));
  }
  if (!std::holds_alternative<CouplerStage>(spec.stages.back()))
    throw Error(ErrorKind::MalformedSpec, "cascade must end with a coupler");
}

Eigen::Matrix2cd cascade_transfer(const CascadeSpec& spec) {
  validate(spec);
  Eigen::Matrix2cd t = Eigen::Matrix2cd::Identity();
  for (const CascadeStage& stage : spec.stages) {
    const Eigen::Matrix2cd m = std::visit(
        [](const auto& s) -> Eigen::Matrix2cd {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, CouplerStage>)
            return coupler_matrix(s.kappa, s.length);
          else
            return delay_matrix(s.beta, s.l1, s.l2);
        },
        stage);
    t = m * t;
  }
  return t;
}

}  // namespace polyprobe
