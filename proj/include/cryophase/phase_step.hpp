#pragma once

#include "cryophase/constitutive.hpp"
#include "cryophase/grid.hpp"

#include <cstddef>
#include <optional>

namespace cryophase {

/// Outcome of one implicit step of the constrained phase equation
///   mu (beta - beta_old)/dt - lap beta + xi = g,   xi in dI_[0,1](beta).
struct PhaseStepResult {
  Field beta_new;
  /// Selection of the subdifferential, recovered from the discrete equation.
  Field xi;
  std::size_t iterations = 0;
  /// max over nodes of min(beta, (-xi)^+) and min(1 - beta, xi^+).
  double complementarity_residual = 0.0;
  /// Max-norm violation of the discrete inclusion (Yosida path: of the
  /// regularized equation).
  double pde_residual = 0.0;
  /// Yosida path only: the iterate before clamping to [0,1].
  std::optional<Field> beta_unclamped;
};

struct PhaseSolverOptions {
  /// Max-norm target for pde_residual. Raised to the rounding floor
  /// 16 eps max(diag/w) of the system when set below it.
  double tol = 1e-10;
  std::size_t max_iter = 200000;
  /// Over-relaxation factor of the sweeps, in (0, 2); 1 is plain Gauss-Seidel.
  /// 0 picks the classical optimum from the Jacobi spectral radius of the
  /// unconstrained system, halved towards 1 whenever 1000 sweeps fail to halve
  /// the residual.
  double relaxation = 0.0;
};

/// Phase driving force (theta - theta_c)/theta_c evaluated nodewise.
Field phase_forcing(const Field &theta, const ModelParams &params);

/// Backward-Euler phase step with the temperature lagged, solved by projected
/// Gauss-Seidel in lexicographic node order.
PhaseStepResult phase_step_projected(const Field &beta_old, const Field &theta, double dt,
                                     const ModelParams &params, const PhaseSolverOptions &opts = {});

/// Same as phase_step_projected with the right-hand side g given directly.
PhaseStepResult phase_step_projected_forcing(const Field &beta_old, const Field &forcing, double dt,
                                             const ModelParams &params,
                                             const PhaseSolverOptions &opts = {});

/// Replaces dI_[0,1] by its Yosida approximation (beta - clamp(beta))/lambda
/// and solves the semilinear system with nonlinear Gauss-Seidel sweeps.
PhaseStepResult phase_step_yosida(const Field &beta_old, const Field &theta, double dt,
                                  const ModelParams &params, double lambda,
                                  const PhaseSolverOptions &opts = {});

PhaseStepResult phase_step_yosida_forcing(const Field &beta_old, const Field &forcing, double dt,
                                          const ModelParams &params, double lambda,
                                          const PhaseSolverOptions &opts = {});

/// Per-step discrete a priori estimate: testing the scheme with
/// beta_new - beta_old gives
///   mu dt ||v||^2 + ||grad beta_new||^2 <= ||grad beta_old||^2 + dt ||g||^2 / mu,
/// v = (beta_new - beta_old)/dt.
struct PhaseEstimate {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds(double slack) const { return lhs <= rhs + slack; }
};

PhaseEstimate phase_step_estimate(const Field &beta_old, const Field &beta_new,
                                  const Field &forcing, double dt, const ModelParams &params);

} // namespace cryophase
