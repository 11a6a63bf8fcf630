#include "cryophase/constitutive.hpp"

#include "cryophase/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace cryophase {

namespace {

double norm_sq(std::span<const double> v) {
  double s = 0.0;
  for (double c : v)
    s += c * c;
  return s;
}

void require_positive_temperature(double theta, const char *where) {
  if (!(theta > 0.0)) {
    std::ostringstream msg;
    msg << where << ": temperature must be positive, got " << theta;
    throw DomainError(msg.str());
  }
}

void require_fraction(double beta, const char *where) {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    std::ostringstream msg;
    msg << where << ": volume fraction must lie in [0,1], got " << beta;
    throw DomainError(msg.str());
  }
}

} // namespace

std::string to_string(ModelVariant v) {
  return v == ModelVariant::Simplified ? "simplified" : "full_energy";
}

ModelVariant model_variant_from_string(const std::string &name) {
  if (name == "simplified")
    return ModelVariant::Simplified;
  if (name == "full_energy")
    return ModelVariant::FullEnergy;
  throw ValidationError("unknown model variant '" + name +
                        "' (expected \"simplified\" or \"full_energy\")");
}

std::vector<std::string> validate(const ModelParams &params, int space_dim,
                                  bool allow_linear_flux) {
  auto fail = [](const std::string &what) { throw ValidationError(what); };

  const bool p_ok = params.p > 1.0 && (params.p < 2.0 || (allow_linear_flux && params.p == 2.0));
  if (!p_ok) {
    std::ostringstream msg;
    msg << "model.p = " << params.p << " is outside the admissible range 1 < p < 2";
    fail(msg.str());
  }
  if (!(params.theta_c > 0.0) || !std::isfinite(params.theta_c))
    fail("model.theta_c must be positive");
  if (!(params.epsilon >= 0.0) || !std::isfinite(params.epsilon))
    fail("model.epsilon must be >= 0");
  if (!(params.delta >= 0.0) || !std::isfinite(params.delta))
    fail("model.delta must be >= 0");
  const std::pair<const char *, double> positive[] = {
      {"c_s", params.c_s}, {"ell", params.ell}, {"k", params.k}, {"mu", params.mu}, {"d", params.d}};
  for (const auto &[name, value] : positive)
    if (!(value > 0.0) || !std::isfinite(value))
      fail(std::string("model.") + name + " must be positive");
  if (space_dim < 1 || space_dim > 3)
    fail("spatial dimension must be 1, 2 or 3");

  std::vector<std::string> warnings;
  if (space_dim == 3 && params.p <= 6.0 / 5.0)
    warnings.emplace_back("p <= 6/5 in three dimensions: strong compactness of the "
                          "epsilon -> 0 limit is not guaranteed");
  if (params.delta == 0.0)
    warnings.emplace_back("delta = 0: the flux coefficient is unbounded near zero gradients");
  return warnings;
}

double free_energy(double theta, double beta, std::span<const double> grad_beta,
                   const ModelParams &params) {
  require_positive_temperature(theta, "free_energy");
  if (!(beta >= 0.0 && beta <= 1.0))
    return std::numeric_limits<double>::infinity();
  return -params.c_s * theta * std::log(theta) -
         params.ell / params.theta_c * (theta - params.theta_c) * beta +
         params.k * norm_sq(grad_beta);
}

double entropy(double theta, double beta, const ModelParams &params) {
  require_positive_temperature(theta, "entropy");
  return params.c_s * (std::log(theta) + 1.0) + params.ell / params.theta_c * beta;
}

double internal_energy_density(double theta, double beta, std::span<const double> grad_beta,
                               const ModelParams &params) {
  if (!(theta >= 0.0))
    throw DomainError("internal_energy_density: temperature must be nonnegative");
  require_fraction(beta, "internal_energy_density");
  return params.c_s * theta + params.ell * beta + params.k * norm_sq(grad_beta);
}

double degenerate_coefficient(double grad_norm_sq, const ModelParams &params) {
  const double s = grad_norm_sq + params.delta * params.delta;
  if (s == 0.0)
    return 0.0;
  return std::pow(s, 0.5 * (params.p - 2.0));
}

double flux_coefficient(double grad_norm_sq, double beta, const ModelParams &params) {
  return beta + (1.0 - beta) * degenerate_coefficient(grad_norm_sq, params);
}

std::vector<double> heat_flux(std::span<const double> theta_grad, double beta,
                              const ModelParams &params) {
  const double kappa = flux_coefficient(norm_sq(theta_grad), beta, params);
  std::vector<double> q(theta_grad.size());
  for (std::size_t i = 0; i < q.size(); ++i)
    q[i] = -kappa * theta_grad[i];
  return q;
}

double phase_driving_force(double theta, const ModelParams &params) {
  return (theta - params.theta_c) / params.theta_c;
}

double pseudo_potential(double beta_t, std::span<const double> theta_grad, double theta,
                        double beta, const ModelParams &params) {
  require_positive_temperature(theta, "pseudo_potential");
  require_fraction(beta, "pseudo_potential");
  const double g2 = norm_sq(theta_grad);
  const double gp = g2 > 0.0 ? std::pow(g2, 0.5 * params.p) : 0.0;
  return 0.5 * params.mu * beta_t * beta_t +
         params.d / theta * (0.5 * g2 + (1.0 - beta) * gp / params.p);
}

} // namespace cryophase
