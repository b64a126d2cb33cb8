#pragma once

#include <complex>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace polyprobe {

using cdouble = std::complex<double>;

/// Coefficients of the coupled-mode equations
///   da/dz = -i (beta1 + kappa11) a - i kappa12 b
///   db/dz = -i (beta2 + kappa22) b - i kappa21 a
struct CoupledModeParams {
  double beta1 = 0.0;
  double beta2 = 0.0;
  cdouble kappa11{};
  cdouble kappa22{};
  cdouble kappa12{};
  cdouble kappa21{};
};

struct ModeTrajectory {
  std::vector<double> z;
  std::vector<cdouble> a;
  std::vector<cdouble> b;
};

/// Fixed-step classical RK4 from z = 0 to z_max. The last step is shortened
/// when z_max is not a multiple of `step`.
ModeTrajectory integrate_coupled_modes(const CoupledModeParams& p, double z_max, double step,
                                       cdouble a0, cdouble b0);

/// Default step: 1e-3 of the shortest beat length 2 pi / max|beta_i|.
double default_step(const CoupledModeParams& p);

struct PowerSplit {
  double pa;
  double pb;
};

/// Power exchange between two parallel guides with unit input in guide a:
///   Pb = kappa^2 / (dbeta^2/4 + kappa^2) sin^2(sqrt(dbeta^2/4 + kappa^2) z),
///   Pa = 1 - Pb.
PowerSplit closed_form_power(double delta_beta, double kappa, double z);

/// Lossless symmetric coupler [[cos kL, -i sin kL], [-i sin kL, cos kL]].
Eigen::Matrix2cd coupler_matrix(double kappa, double length);

/// Differential delay line diag(exp(-i beta L1), exp(-i beta L2)).
Eigen::Matrix2cd delay_matrix(double beta, double l1, double l2);

struct CouplerStage {
  double kappa = 0.0;
  double length = 0.0;
};

struct DelayStage {
  double beta = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
};

using CascadeStage = std::variant<CouplerStage, DelayStage>;

/// Stages in propagation order: coupler, delay, coupler, ..., coupler.
struct CascadeSpec {
  std::vector<CascadeStage> stages;
};

/// Throws MalformedSpec unless stages alternate and start and end on a coupler.
void validate(const CascadeSpec& spec);

/// T_c(L_{N+1}) ... T_MZ T_c(L_2) T_MZ T_c(L_1): the first stage acts first.
Eigen::Matrix2cd cascade_transfer(const CascadeSpec& spec);

}  // namespace polyprobe
