#include "cryophase/heat_step.hpp"

#include "cryophase/errors.hpp"
#include "cryophase/grid_ops.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cryophase {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += a[i] * b[i];
  return s;
}

void check_inputs(const Field &theta_old, const Field &beta_new, const Field &beta_old,
                  const Field &source, double dt, const ModelParams &params,
                  const HeatSolverOptions &opts) {
  const Grid &g = theta_old.grid();
  if (!(beta_new.grid() == g && beta_old.grid() == g && source.grid() == g))
    throw ValidationError("heat step: fields live on different grids");
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw ValidationError("heat step: dt must be positive");
  if (!(params.p > 1.0 && params.p <= 2.0))
    throw ValidationError("heat step: p must lie in (1, 2]");
  if (!(opts.picard_tol > 0.0) || !(opts.linear_tol > 0.0))
    throw ValidationError("heat step: tolerances must be positive");
  for (const Field *b : {&beta_new, &beta_old})
    for (double v : b->values())
      if (!(v >= 0.0 && v <= 1.0))
        throw ValidationError("heat step: beta must lie in [0,1]");
  if (!theta_old.all_finite() || !source.all_finite())
    throw ValidationError("heat step: non-finite theta_old or source");
}

/// Shared Picard driver. `rhs_source` is the nodal right-hand side per unit
/// volume excluding the time derivative of theta.
HeatStepResult picard_solve(const Field &theta_old, const Field &beta_new, const Field &rhs_source,
                            double dt, const ModelParams &params, const HeatSolverOptions &opts) {
  const Grid &grid = theta_old.grid();
  const std::size_t nn = grid.node_count();
  const std::size_t max_lin = opts.linear_max_iter ? opts.linear_max_iter : 10 * nn;
  // Linear solves looser than the Picard target leave noise in the Picard residual.
  const double linear_tol = std::max(std::min(opts.linear_tol, 1e-2 * opts.picard_tol), 1e-15);

  std::vector<double> mass(nn), src(nn);
  for (std::size_t n = 0; n < nn; ++n) {
    mass[n] = grid.node_weight(n) / dt;
    src[n] = grid.node_weight(n) * rhs_source[n];
  }

  HeatStepResult res{theta_old, VectorField(grid), 0, 0.0, 0, {}, true, {}};
  Field &theta = res.theta_new;
  // Unknown is the increment u = theta - theta_old; the right-hand side
  // W src - K theta_old is assembled in difference form so equilibria stay exact.
  std::vector<double> u(nn, 0.0), b(nn), k_theta(nn);

  while (true) {
    if (res.picard_iterations == opts.max_picard)
      throw NonConvergence("Picard iteration", res.picard_iterations, res.picard_residual,
                           "use a smaller dt or a larger delta");
    const std::vector<double> coeff = heat_face_coefficients(theta, beta_new, params);
    stiffness_apply(grid, coeff, theta_old.values(), k_theta);
    for (std::size_t n = 0; n < nn; ++n)
      b[n] = src[n] - k_theta[n];
    const LinearSolveReport lin =
        solve_mass_stiffness(grid, mass, coeff, b, u, linear_tol, max_lin);
    res.linear_solver_iterations += lin.iterations;
    ++res.picard_iterations;
    // K annihilates constants, so the exact increment carries the mass sum(b) dt.
    // Shifting by a constant restores it without touching the flux.
    double mass_u = 0.0, mass_b = 0.0, measure = 0.0;
    for (std::size_t n = 0; n < nn; ++n) {
      mass_u += mass[n] * u[n];
      mass_b += b[n];
      measure += mass[n];
    }
    const double shift = (mass_b - mass_u) / measure;
    for (std::size_t n = 0; n < nn; ++n)
      u[n] += shift;

    Field next(grid);
    for (std::size_t n = 0; n < nn; ++n)
      next[n] = theta_old[n] + u[n];
    Field change(grid);
    for (std::size_t n = 0; n < nn; ++n)
      change[n] = next[n] - theta[n];
    theta = std::move(next);
    res.picard_residual = norm_L2(change) / (1.0 + norm_L2(theta));
    if (!res.picard_history.empty() && res.picard_residual > res.picard_history.back() &&
        res.picard_residual > 10.0 * opts.picard_tol)
      res.picard_monotone = false;
    res.picard_history.push_back(res.picard_residual);
    if (res.picard_residual <= opts.picard_tol)
      break;
  }

  const VectorField grad = gradient(theta);
  const std::vector<double> g2 = face_gradient_norm_sq(theta);
  const VectorField beta_f = face_average(beta_new);
  for (std::size_t f = 0; f < grid.face_count(); ++f)
    res.flux[f] = -flux_coefficient(g2[f], std::clamp(beta_f[f], 0.0, 1.0), params) * grad[f];
  return res;
}

} // namespace

std::vector<double> heat_face_coefficients(const Field &theta, const Field &beta,
                                           const ModelParams &params) {
  const Grid &grid = theta.grid();
  const std::vector<double> g2 = face_gradient_norm_sq(theta);
  const VectorField beta_f = face_average(beta);
  std::vector<double> coeff(grid.face_count());
  for (std::size_t f = 0; f < coeff.size(); ++f)
    coeff[f] = params.epsilon + flux_coefficient(g2[f], std::clamp(beta_f[f], 0.0, 1.0), params);
  return coeff;
}

LinearSolveReport solve_mass_stiffness(const Grid &grid, std::span<const double> mass,
                                       std::span<const double> face_coeff,
                                       std::span<const double> b, std::span<double> u,
                                       double rel_tol, std::size_t max_iter) {
  const std::size_t nn = grid.node_count();
  std::vector<double> diag = stiffness_diagonal(grid, face_coeff);
  for (std::size_t n = 0; n < nn; ++n) {
    diag[n] += mass[n];
    if (!(diag[n] > 0.0) || !std::isfinite(diag[n]))
      throw LinearSolveFailure("heat system has a non-positive or non-finite diagonal");
  }
  auto apply = [&](std::span<const double> x, std::span<double> y) {
    stiffness_apply(grid, face_coeff, x, y);
    for (std::size_t n = 0; n < nn; ++n)
      y[n] += mass[n] * x[n];
  };

  const double b_norm = std::sqrt(dot(b, b));
  if (b_norm == 0.0) {
    std::fill(u.begin(), u.end(), 0.0);
    return {};
  }
  std::vector<double> r(nn), z(nn), p(nn), ap(nn);
  apply(u, ap);
  for (std::size_t n = 0; n < nn; ++n)
    r[n] = b[n] - ap[n];
  double r_norm = std::sqrt(dot(r, r));
  LinearSolveReport rep{0, r_norm / b_norm};
  if (rep.relative_residual <= rel_tol)
    return rep;

  for (std::size_t n = 0; n < nn; ++n)
    p[n] = z[n] = r[n] / diag[n];
  double rz = dot(r, z);
  while (rep.iterations < max_iter) {
    apply(p, ap);
    const double pap = dot(p, ap);
    if (!(pap > 0.0) || !std::isfinite(pap))
      throw LinearSolveFailure("conjugate gradient breakdown (p.Ap = " + std::to_string(pap) + ")");
    const double alpha = rz / pap;
    for (std::size_t n = 0; n < nn; ++n) {
      u[n] += alpha * p[n];
      r[n] -= alpha * ap[n];
    }
    ++rep.iterations;
    r_norm = std::sqrt(dot(r, r));
    rep.relative_residual = r_norm / b_norm;
    if (rep.relative_residual <= rel_tol)
      return rep;
    for (std::size_t n = 0; n < nn; ++n)
      z[n] = r[n] / diag[n];
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t n = 0; n < nn; ++n)
      p[n] = z[n] + beta * p[n];
  }
  std::ostringstream msg;
  msg << "conjugate gradient reached " << max_iter << " iterations at relative residual "
      << rep.relative_residual;
  throw LinearSolveFailure(msg.str());
}

HeatStepResult heat_step(const Field &theta_old, const Field &beta_new, const Field &beta_old,
                         const Field &source, double dt, const ModelParams &params,
                         const HeatSolverOptions &opts) {
  check_inputs(theta_old, beta_new, beta_old, source, dt, params, opts);
  Field rhs(theta_old.grid());
  for (std::size_t n = 0; n < rhs.size(); ++n)
    rhs[n] = source[n] - (beta_new[n] - beta_old[n]) / dt;
  return picard_solve(theta_old, beta_new, rhs, dt, params, opts);
}

HeatStepResult heat_step_full_energy(const Field &theta_old, const Field &beta_new,
                                     const Field &beta_old, const Field &source, double dt,
                                     const ModelParams &params, const HeatSolverOptions &opts) {
  if (params.variant != ModelVariant::FullEnergy)
    throw ValidationError("heat_step_full_energy requires the full_energy model variant");
  check_inputs(theta_old, beta_new, beta_old, source, dt, params, opts);
  for (double v : theta_old.values())
    if (!(v > 0.0))
      throw ValidationError("heat_step_full_energy: theta_old must be positive");
  Field rhs(theta_old.grid());
  for (std::size_t n = 0; n < rhs.size(); ++n) {
    const double rate = (beta_new[n] - beta_old[n]) / dt;
    rhs[n] = source[n] + rate * rate - theta_old[n] / params.theta_c * rate;
  }
  HeatStepResult res = picard_solve(theta_old, beta_new, rhs, dt, params, opts);
  const auto low = std::min_element(res.theta_new.values().begin(), res.theta_new.values().end());
  if (*low <= 0.0) {
    std::ostringstream msg;
    msg << "PositivityLoss: theta_new reached " << *low << " at node "
        << (low - res.theta_new.values().begin());
    res.warnings.push_back(msg.str());
  }
  return res;
}

HeatEstimate apriori_monitor(const HeatStepResult &result, const Field &theta_old,
                             const Field &beta_new, const Field &beta_old, const Field &source,
                             double dt, const ModelParams &params) {
  const Field &theta = result.theta_new;
  const Grid &grid = theta.grid();
  const VectorField grad = gradient(theta);
  const std::vector<double> g2 = face_gradient_norm_sq(theta);
  const VectorField beta_f = face_average(beta_new);

  HeatEstimate est;
  const double tn = norm_L2(theta), to = norm_L2(theta_old);
  est.half_theta_sq = 0.5 * tn * tn;
  est.half_theta_old_sq = 0.5 * to * to;
  double grad_sq = 0.0;
  for (std::size_t f = 0; f < grid.face_count(); ++f) {
    const double b = std::clamp(beta_f[f], 0.0, 1.0);
    const double vol = grid.face_volume(f);
    const double gg = grad[f] * grad[f] * vol;
    const double pp = degenerate_coefficient(g2[f], params) * gg;
    grad_sq += gg;
    est.beta_grad_sq += b * gg;
    est.grad_p += pp;
    est.beta_grad_p += b * pp;
  }
  est.beta_grad_sq *= dt;
  est.grad_p *= dt;
  est.beta_grad_p *= dt;
  est.eps_grad_sq = dt * params.epsilon * grad_sq;

  const bool full = params.variant == ModelVariant::FullEnergy;
  for (std::size_t n = 0; n < grid.node_count(); ++n) {
    const double w = grid.node_weight(n);
    const double rate = (beta_new[n] - beta_old[n]) / dt;
    const double src = source[n] + (full ? rate * rate : 0.0);
    const double factor = full ? theta_old[n] / params.theta_c : 1.0;
    est.source_work += w * src * theta[n];
    est.coupling_work += w * factor * rate * theta[n];
  }
  est.source_work *= dt;
  est.coupling_work *= dt;
  return est;
}

} // namespace cryophase
