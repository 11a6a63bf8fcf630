#pragma once

#include "cryophase/constitutive.hpp"
#include "cryophase/grid.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace cryophase {

struct HeatSolverOptions {
  double picard_tol = 1e-10;
  std::size_t max_picard = 200;
  /// Relative residual of each linear solve; tightened to 1e-2 picard_tol when
  /// looser, so that solver noise stays below the Picard target.
  double linear_tol = 1e-10;
  /// 0 selects 10 * node count.
  std::size_t linear_max_iter = 0;
};

struct HeatStepResult {
  Field theta_new;
  /// Face-normal heat flux evaluated at theta_new.
  VectorField flux;
  std::size_t picard_iterations = 0;
  /// ||theta^(m) - theta^(m-1)|| / (1 + ||theta^(m)||) at the last sweep.
  double picard_residual = 0.0;
  /// Total conjugate-gradient iterations over all sweeps.
  std::size_t linear_solver_iterations = 0;
  std::vector<double> picard_history;
  /// Whether picard_history decreased at every sweep (down to the noise floor).
  bool picard_monotone = true;
  std::vector<std::string> warnings;
};

/// Backward-Euler step of theta_t + beta_t - eps lap theta - div(kappa grad theta) = r
/// with beta frozen at beta_new and kappa = beta + (1 - beta) a_delta(grad theta)
/// lagged per Picard sweep. Each sweep solves an SPD system by Jacobi-preconditioned
/// conjugate gradients.
HeatStepResult heat_step(const Field &theta_old, const Field &beta_new, const Field &beta_old,
                         const Field &source, double dt, const ModelParams &params,
                         const HeatSolverOptions &opts = {});

/// Un-neglected energy balance:
///   theta_t + (theta_old/theta_c) beta_t - eps lap theta - div(kappa grad theta)
///     = r + |beta_t|^2.
/// Requires params.variant == FullEnergy and a positive theta_old. Positivity of
/// the result is monitored (a warning is attached), not enforced.
HeatStepResult heat_step_full_energy(const Field &theta_old, const Field &beta_new,
                                     const Field &beta_old, const Field &source, double dt,
                                     const ModelParams &params, const HeatSolverOptions &opts = {});

/// Per-step contributions to the temperature energy estimate, obtained by
/// testing the discrete equation with theta_new. Time integrals are already
/// multiplied by dt.
struct HeatEstimate {
  double half_theta_sq = 0.0;     ///< 1/2 ||theta_new||^2
  double half_theta_old_sq = 0.0; ///< 1/2 ||theta_old||^2
  double beta_grad_sq = 0.0;      ///< dt int beta |grad theta|^2
  double grad_p = 0.0;            ///< dt int |grad theta|^p
  double eps_grad_sq = 0.0;       ///< dt eps int |grad theta|^2
  double source_work = 0.0;       ///< dt int r theta (plus dt int |beta_t|^2 theta, full energy)
  double coupling_work = 0.0;     ///< dt int beta_t theta (times theta_old/theta_c, full energy)
  double beta_grad_p = 0.0;       ///< dt int beta |grad theta|^p

  /// 1/2 ||theta_new||^2 - 1/2 ||theta_old||^2 + eps, beta and p dissipation.
  double lhs() const {
    return half_theta_sq - half_theta_old_sq + eps_grad_sq + beta_grad_sq + grad_p;
  }
  /// Source work minus coupling work plus the beta-weighted p-term.
  double rhs() const { return source_work - coupling_work + beta_grad_p; }
};

/// The |grad theta|^p integrals use the face quadrature of the scheme,
/// sum_f a_delta(|G_f|^2) g_f^2 vol_f, which is sum_f |g_f|^p vol_f in 1D for delta = 0.
HeatEstimate apriori_monitor(const HeatStepResult &result, const Field &theta_old,
                             const Field &beta_new, const Field &beta_old, const Field &source,
                             double dt, const ModelParams &params);

/// Face coefficients eps + beta_f + (1 - beta_f) a_delta(|G_f(theta)|^2), beta_f the
/// clamped face average of beta.
std::vector<double> heat_face_coefficients(const Field &theta, const Field &beta,
                                           const ModelParams &params);

/// Result of a Jacobi-preconditioned conjugate-gradient solve.
struct LinearSolveReport {
  std::size_t iterations = 0;
  double relative_residual = 0.0;
};

/// Solves (diag(mass) + K_c) u = b in place (u holds the initial guess), where K_c
/// is the face stiffness with coefficients `face_coeff`.
LinearSolveReport solve_mass_stiffness(const Grid &grid, std::span<const double> mass,
                                       std::span<const double> face_coeff,
                                       std::span<const double> b, std::span<double> u,
                                       double rel_tol, std::size_t max_iter);

} // namespace cryophase
