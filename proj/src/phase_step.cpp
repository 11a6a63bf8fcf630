#include "cryophase/phase_step.hpp"

#include "cryophase/errors.hpp"
#include "cryophase/grid_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cryophase {

namespace {

void check_inputs(const Field &beta_old, const Field &forcing, double dt,
                  const PhaseSolverOptions &opts) {
  if (!(beta_old.grid() == forcing.grid()))
    throw ValidationError("phase step: beta_old and forcing live on different grids");
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw ValidationError("phase step: dt must be positive");
  if (!(opts.tol > 0.0))
    throw ValidationError("phase step: tol must be positive");
  if (!(opts.relaxation == 0.0 || (opts.relaxation > 0.0 && opts.relaxation < 2.0)))
    throw ValidationError("phase step: relaxation must lie in (0, 2), or be 0 for automatic");
  for (std::size_t n = 0; n < beta_old.size(); ++n) {
    if (!(beta_old[n] >= 0.0 && beta_old[n] <= 1.0)) {
      std::ostringstream msg;
      msg << "phase step: beta_old[" << n << "] = " << beta_old[n] << " is outside [0,1]";
      throw ValidationError(msg.str());
    }
    if (!std::isfinite(forcing[n]))
      throw ValidationError("phase step: forcing is not finite");
  }
}

/// Nodal operator data shared by both sweeps.
struct PhaseSystem {
  const Grid &grid;
  std::vector<std::vector<NodeLink>> links;
  std::vector<double> diag; // w mu/dt + sum c
  double rate;              // mu/dt
  double omega = 1.0;       // sweep relaxation
  // Residuals are resolved only down to a few ulps of beta times the largest
  // nodal coefficient; tolerances below that are raised to it.
  double floor = 0.0;

  PhaseSystem(const Grid &g, double dt, const ModelParams &params, double relaxation)
      : grid(g), links(node_links(g)), diag(g.node_count()), rate(params.mu / dt) {
    // The constant mode is the Perron vector of the Jacobi matrix, so its
    // eigenvalue sum(c)/diag bounds the spectral radius.
    double rho = 0.0;
    for (std::size_t n = 0; n < g.node_count(); ++n) {
      double s = 0.0;
      for (const NodeLink &l : links[n])
        s += l.conductance;
      diag[n] = g.node_weight(n) * rate + s;
      rho = std::max(rho, s / diag[n]);
      floor = std::max(floor, 16.0 * std::numeric_limits<double>::epsilon() * diag[n] /
                                  g.node_weight(n));
    }
    omega = relaxation > 0.0 ? relaxation : 2.0 / (1.0 + std::sqrt(1.0 - rho * rho));
  }

  /// Weighted residual w(mu(beta_old - beta)/dt + g) + sum c (beta_j - beta_i) at node n.
  double residual(std::size_t n, const Field &beta, const Field &beta_old,
                  const Field &forcing) const {
    double r = grid.node_weight(n) * (rate * (beta_old[n] - beta[n]) + forcing[n]);
    for (const NodeLink &l : links[n])
      r += l.conductance * (beta[l.neighbour] - beta[n]);
    return r;
  }
};

double complementarity(double beta, double xi) {
  const double lower = std::min(beta, std::max(0.0, -xi));
  const double upper = std::min(1.0 - beta, std::max(0.0, xi));
  return std::max(lower, upper);
}

double inclusion_violation(double beta, double xi) {
  if (beta <= 0.0)
    return std::max(0.0, xi);
  if (beta >= 1.0)
    return std::max(0.0, -xi);
  return std::abs(xi);
}

/// xi = g - mu (beta - beta_old)/dt + lap beta, and the residual summaries.
void recover_multiplier(const PhaseSystem &sys, const Field &beta, const Field &beta_old,
                        const Field &forcing, Field &xi, double &pde, double &comp) {
  pde = 0.0;
  comp = 0.0;
  for (std::size_t n = 0; n < beta.size(); ++n) {
    xi[n] = sys.residual(n, beta, beta_old, forcing) / sys.grid.node_weight(n);
    pde = std::max(pde, inclusion_violation(beta[n], xi[n]));
    comp = std::max(comp, complementarity(beta[n], xi[n]));
  }
}

double yosida(double beta, double lambda) { return (beta - std::clamp(beta, 0.0, 1.0)) / lambda; }

} // namespace

Field phase_forcing(const Field &theta, const ModelParams &params) {
  Field g(theta.grid());
  for (std::size_t n = 0; n < theta.size(); ++n)
    g[n] = phase_driving_force(theta[n], params);
  return g;
}

PhaseStepResult phase_step_projected(const Field &beta_old, const Field &theta, double dt,
                                     const ModelParams &params, const PhaseSolverOptions &opts) {
  return phase_step_projected_forcing(beta_old, phase_forcing(theta, params), dt, params, opts);
}

PhaseStepResult phase_step_projected_forcing(const Field &beta_old, const Field &forcing, double dt,
                                             const ModelParams &params,
                                             const PhaseSolverOptions &opts) {
  check_inputs(beta_old, forcing, dt, opts);
  const PhaseSystem sys(beta_old.grid(), dt, params, opts.relaxation);
  PhaseStepResult res{beta_old, Field(beta_old.grid()), 0, 0.0, 0.0, std::nullopt};
  Field &beta = res.beta_new;

  recover_multiplier(sys, beta, beta_old, forcing, res.xi, res.pde_residual,
                     res.complementarity_residual);
  const double target = std::max(opts.tol, sys.floor);
  // Strong over-relaxation can stall a little above the rounding floor once
  // the active set has settled; without progress over a window of sweeps the
  // factor is pulled back towards plain Gauss-Seidel.
  const std::size_t window = 1000;
  double omega = sys.omega;
  double window_start = res.pde_residual;
  while (res.pde_residual > target) {
    if (res.iterations == opts.max_iter)
      throw NonConvergence("projected Gauss-Seidel", res.iterations, res.pde_residual,
                           "reduce dt or relax phase_tol");
    for (std::size_t n = 0; n < beta.size(); ++n) {
      const double step = sys.residual(n, beta, beta_old, forcing) / sys.diag[n];
      beta[n] = std::clamp(beta[n] + omega * step, 0.0, 1.0);
    }
    ++res.iterations;
    if (opts.relaxation == 0.0 && res.iterations % window == 0) {
      if (res.pde_residual > 0.5 * window_start)
        omega = 1.0 + 0.5 * (omega - 1.0);
      window_start = res.pde_residual;
    }
    recover_multiplier(sys, beta, beta_old, forcing, res.xi, res.pde_residual,
                       res.complementarity_residual);
  }
  return res;
}

PhaseStepResult phase_step_yosida(const Field &beta_old, const Field &theta, double dt,
                                  const ModelParams &params, double lambda,
                                  const PhaseSolverOptions &opts) {
  return phase_step_yosida_forcing(beta_old, phase_forcing(theta, params), dt, params, lambda,
                                   opts);
}

PhaseStepResult phase_step_yosida_forcing(const Field &beta_old, const Field &forcing, double dt,
                                          const ModelParams &params, double lambda,
                                          const PhaseSolverOptions &opts) {
  check_inputs(beta_old, forcing, dt, opts);
  if (!(lambda > 0.0))
    throw ValidationError("phase step: Yosida parameter lambda must be positive");
  const PhaseSystem sys(beta_old.grid(), dt, params, opts.relaxation);
  const Grid &grid = beta_old.grid();
  Field y = beta_old;

  // Max-norm residual of mu(y - beta_old)/dt - lap y + xi_lambda(y) - g.
  auto residual = [&] {
    double r = 0.0;
    for (std::size_t n = 0; n < y.size(); ++n)
      r = std::max(r, std::abs(sys.residual(n, y, beta_old, forcing) / grid.node_weight(n) -
                               yosida(y[n], lambda)));
    return r;
  };

  std::size_t iterations = 0;
  const double target =
      std::max(opts.tol, sys.floor + 16.0 * std::numeric_limits<double>::epsilon() / lambda);
  double r = residual();
  const std::size_t window = 1000;
  double omega = sys.omega;
  double window_start = r;
  while (r > target) {
    if (iterations == opts.max_iter)
      throw NonConvergence("Yosida Gauss-Seidel", iterations, r, "reduce dt or relax phase_tol");
    for (std::size_t n = 0; n < y.size(); ++n) {
      // Exact solve of the monotone piecewise-linear scalar equation at node n.
      const double a = sys.diag[n];
      const double stiff = grid.node_weight(n) / lambda;
      const double free_value = y[n] + sys.residual(n, y, beta_old, forcing) / a;
      double solved = free_value;
      if (free_value < 0.0)
        solved = a * free_value / (a + stiff);
      else if (free_value > 1.0)
        solved = 1.0 + a * (free_value - 1.0) / (a + stiff);
      y[n] += omega * (solved - y[n]);
    }
    ++iterations;
    r = residual();
    if (opts.relaxation == 0.0 && iterations % window == 0) {
      if (r > 0.5 * window_start)
        omega = 1.0 + 0.5 * (omega - 1.0);
      window_start = r;
    }
  }

  PhaseStepResult res{Field(grid), Field(grid), iterations, 0.0, r, y};
  for (std::size_t n = 0; n < y.size(); ++n) {
    res.beta_new[n] = std::clamp(y[n], 0.0, 1.0);
    res.xi[n] = yosida(y[n], lambda);
    res.complementarity_residual =
        std::max(res.complementarity_residual, complementarity(res.beta_new[n], res.xi[n]));
  }
  return res;
}

PhaseEstimate phase_step_estimate(const Field &beta_old, const Field &beta_new,
                                  const Field &forcing, double dt, const ModelParams &params) {
  Field rate(beta_new.grid());
  for (std::size_t n = 0; n < rate.size(); ++n)
    rate[n] = (beta_new[n] - beta_old[n]) / dt;
  const double gn = norm_grad_L2(beta_new), go = norm_grad_L2(beta_old), f = norm_L2(forcing);
  const double v = norm_L2(rate);
  return {params.mu * dt * v * v + gn * gn, go * go + dt * f * f / params.mu};
}

} // namespace cryophase
