#pragma once

#include <span>
#include <string>
#include <vector>

namespace cryophase {

enum class ModelVariant {
  Simplified, ///< theta_t + beta_t - div q = r
  FullEnergy  ///< theta_t + (theta/theta_c) beta_t - div q = |beta_t|^2 + r
};

std::string to_string(ModelVariant v);
ModelVariant model_variant_from_string(const std::string &name);

/// Physical and model constants. Defaults follow the normalized model:
/// every material constant is 1 and the transition sits at 2.17 K.
struct ModelParams {
  double theta_c = 2.17; ///< He I / He II transition temperature [K]
  double p = 1.5;        ///< power-law flux exponent, 1 < p < 2
  double epsilon = 0.0;  ///< artificial diffusion of the regularized equation
  double delta = 1e-8;   ///< smoothing of the degenerate flux coefficient
  double c_s = 1.0;      ///< heat capacity
  double ell = 1.0;      ///< latent heat
  double k = 1.0;        ///< interaction coefficient of the gradient energy
  double mu = 1.0;       ///< phase viscosity
  double d = 1.0;        ///< flux coefficient of the pseudo-potential
  ModelVariant variant = ModelVariant::Simplified;
};

/// Checks the parameter invariants and throws ValidationError on failure.
/// Returns non-fatal warnings. `space_dim` is the spatial dimension the
/// parameters are meant for; compactness of the epsilon -> 0 limit in three
/// dimensions needs p > 6/5, which is only reported, never enforced.
/// `allow_linear_flux` admits p == 2 (the linear Fourier limit used by
/// verification harnesses).
std::vector<std::string> validate(const ModelParams &params, int space_dim = 1,
                                  bool allow_linear_flux = false);

/// Psi(theta, beta, grad beta). Returns +infinity when beta lies outside
/// [0,1] (indicator term). Throws DomainError for theta <= 0.
double free_energy(double theta, double beta, std::span<const double> grad_beta,
                   const ModelParams &params);

/// s = -dPsi/dtheta = c_s (log theta + 1) + (ell/theta_c) beta.
double entropy(double theta, double beta, const ModelParams &params);

/// e = Psi + theta s = c_s theta + ell beta + k |grad beta|^2.
/// theta = 0 is accepted as the limit value; beta must lie in [0,1].
double internal_energy_density(double theta, double beta, std::span<const double> grad_beta,
                               const ModelParams &params);

/// a_delta(|g|^2) = (|g|^2 + delta^2)^((p-2)/2). For delta == 0 and g == 0 the
/// coefficient is reported as 0, which encodes the zero-flux convention.
double degenerate_coefficient(double grad_norm_sq, const ModelParams &params);

/// Scalar coefficient kappa with q = -kappa grad theta:
/// kappa = beta + (1 - beta) a_delta(|grad theta|^2).
double flux_coefficient(double grad_norm_sq, double beta, const ModelParams &params);

/// q = -beta grad theta - (1 - beta) a_delta(grad theta) grad theta.
std::vector<double> heat_flux(std::span<const double> theta_grad, double beta,
                              const ModelParams &params);

/// Right-hand side of the phase inclusion, (theta - theta_c) / theta_c.
double phase_driving_force(double theta, const ModelParams &params);

/// Phi = (mu/2)|beta_t|^2 + (d/theta)(|grad theta|^2 / 2 + (1 - beta)|grad theta|^p / p).
/// Diagnostic only; the solvers use the explicit flux form.
double pseudo_potential(double beta_t, std::span<const double> theta_grad, double theta,
                        double beta, const ModelParams &params);

} // namespace cryophase
