#include "cryophase/simulator.hpp"

#include "cryophase/csv_io.hpp"
#include "cryophase/errors.hpp"
#include "cryophase/grid_ops.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <optional>
#include <sstream>

namespace cryophase {

std::vector<std::string> validate(const SimConfig &config) {
  std::vector<std::string> warnings =
      validate(config.model, config.grid.dim(), config.allow_linear_flux);
  if (!(config.dt > 0.0) || !std::isfinite(config.dt))
    throw ValidationError("time.dt must be positive");
  if (!(config.t_end > 0.0) || !std::isfinite(config.t_end))
    throw ValidationError("time.t_end must be positive");
  if (config.dt > config.t_end)
    throw ValidationError("time.dt must not exceed time.t_end");
  if (!(config.output_cadence >= 0.0))
    throw ValidationError("output.cadence must be >= 0");
  if (!(config.theta0.grid() == config.grid) || !(config.beta0.grid() == config.grid))
    throw ValidationError("initial fields do not match the grid");
  for (std::size_t n = 0; n < config.beta0.size(); ++n)
    if (!(config.beta0[n] >= 0.0 && config.beta0[n] <= 1.0)) {
      std::ostringstream msg;
      msg << "initial beta0 = " << config.beta0[n] << " at node " << n << " is outside [0,1]";
      throw ValidationError(msg.str());
    }
  if (!config.theta0.all_finite())
    throw ValidationError("initial theta0 is not finite");
  if (config.model.variant == ModelVariant::FullEnergy)
    for (double v : config.theta0.values())
      if (!(v > 0.0))
        throw ValidationError("the full_energy variant needs a positive initial temperature");
  if (config.coupling.mode == CouplingMode::Iterated &&
      (config.coupling.max_outer == 0 || !(config.coupling.outer_tol > 0.0)))
    throw ValidationError("iterated coupling needs max_outer >= 1 and outer_tol > 0");
  if (config.mms_phase_source)
    warnings.emplace_back("manufactured phase source active: this is not the physical model");
  return warnings;
}

double EnergyLedger::total(double LedgerRow::*member) const {
  double s = 0.0;
  for (const LedgerRow &r : rows)
    s += r.*member;
  return s;
}

double EnergyLedger::max(double LedgerRow::*member) const {
  double s = 0.0;
  for (const LedgerRow &r : rows)
    s = std::max(s, r.*member);
  return s;
}

std::size_t step_count(double dt, double t_end) {
  return static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
}

double step_time(std::size_t k, double dt, double t_end) {
  return std::min(static_cast<double>(k) * dt, t_end);
}

namespace {

struct StepOutcome {
  PhaseStepResult phase;
  HeatStepResult heat;
  Field forcing;
  std::size_t outer = 1;
};

StepOutcome advance(const SimConfig &cfg, const Field &theta, const Field &beta, const Field &r,
                    double t_new, double dt) {
  const bool full = cfg.model.variant == ModelVariant::FullEnergy;
  auto forcing_for = [&](const Field &theta_lag) {
    Field g = phase_forcing(theta_lag, cfg.model);
    if (cfg.mms_phase_source) {
      const Field s = cfg.mms_phase_source(t_new);
      for (std::size_t n = 0; n < g.size(); ++n)
        g[n] += s[n];
    }
    return g;
  };
  auto heat = [&](const Field &beta_new) {
    return full ? heat_step_full_energy(theta, beta_new, beta, r, dt, cfg.model, cfg.solvers.heat)
                : heat_step(theta, beta_new, beta, r, dt, cfg.model, cfg.solvers.heat);
  };

  Field g = forcing_for(theta);
  PhaseStepResult ph = phase_step_projected_forcing(beta, g, dt, cfg.model, cfg.solvers.phase);
  HeatStepResult ht = heat(ph.beta_new);
  std::size_t outer = 1;
  if (cfg.coupling.mode == CouplingMode::Iterated) {
    while (true) {
      if (outer == cfg.coupling.max_outer)
        throw NonConvergence("outer coupling iteration", outer, 0.0,
                             "increase coupling.max_outer or use a smaller dt");
      g = forcing_for(ht.theta_new);
      PhaseStepResult ph_next =
          phase_step_projected_forcing(beta, g, dt, cfg.model, cfg.solvers.phase);
      HeatStepResult ht_next = heat(ph_next.beta_new);
      ++outer;
      Field diff(theta.grid());
      for (std::size_t n = 0; n < diff.size(); ++n)
        diff[n] = ht_next.theta_new[n] - ht.theta_new[n];
      ph = std::move(ph_next);
      ht = std::move(ht_next);
      if (norm_L2(diff) <= cfg.coupling.outer_tol)
        break;
    }
  }
  return {std::move(ph), std::move(ht), std::move(g), outer};
}

std::string dump_state(const SimConfig &cfg, std::size_t step, const Field &theta,
                       const Field &beta, const Field &xi) {
  if (cfg.dump_dir.empty())
    return {};
  try {
    std::filesystem::create_directories(cfg.dump_dir);
    std::ostringstream name;
    name << "failed_state_step_" << step << ".csv";
    const std::string path = (std::filesystem::path(cfg.dump_dir) / name.str()).string();
    write_snapshot_csv(path, theta, beta, xi);
    return path;
  } catch (const std::exception &) {
    return {};
  }
}

} // namespace

RunResult run(const SimConfig &config, const StepObserver &observer) {
  const auto wall_start = std::chrono::steady_clock::now();
  RunResult out{config.theta0, config.beta0, Field(config.grid), {}, {}, {}, validate(config)};
  const Grid &grid = config.grid;
  const std::size_t steps = step_count(config.dt, config.t_end);
  const Field zero(grid, 0.0);

  auto mass = [](const Field &theta, const Field &beta) { return integral(theta) + integral(beta); };
  out.ledger.initial_mass = mass(config.theta0, config.beta0);
  double source_mass = 0.0;

  if (config.keep_snapshots)
    out.snapshots.push_back({0.0, out.theta, out.beta, out.xi});
  std::size_t next_mark = 1;
  const double cadence = config.output_cadence;

  for (std::size_t k = 1; k <= steps; ++k) {
    const double t_prev = step_time(k - 1, config.dt, config.t_end);
    const double t_new = step_time(k, config.dt, config.t_end);
    const double dt = t_new - t_prev;
    const Field r = config.source ? config.source(t_new) : zero;

    std::optional<StepOutcome> attempt;
    try {
      attempt.emplace(advance(config, out.theta, out.beta, r, t_new, dt));
    } catch (const NonConvergence &e) {
      const std::string path = dump_state(config, k - 1, out.theta, out.beta, out.xi);
      std::ostringstream ctx;
      ctx << "step " << k << " (t = " << t_new << ")";
      if (!path.empty())
        ctx << ", last good state dumped to " << path;
      throw NonConvergence(e, ctx.str());
    } catch (const LinearSolveFailure &e) {
      const std::string path = dump_state(config, k - 1, out.theta, out.beta, out.xi);
      std::ostringstream ctx;
      ctx << "step " << k << " (t = " << t_new << "): " << e.what();
      if (!path.empty())
        ctx << ", last good state dumped to " << path;
      throw LinearSolveFailure(ctx.str());
    }
    StepOutcome &step = *attempt;

    const HeatEstimate est = apriori_monitor(step.heat, out.theta, step.phase.beta_new, out.beta,
                                             r, dt, config.model);
    const PhaseEstimate pest =
        phase_step_estimate(out.beta, step.phase.beta_new, step.forcing, dt, config.model);

    LedgerRow row;
    row.step = k;
    row.t = t_new;
    row.dt = dt;
    Field rate(grid);
    for (std::size_t n = 0; n < rate.size(); ++n)
      rate[n] = (step.phase.beta_new[n] - out.beta[n]) / dt;
    const double rate_l2 = norm_L2(rate);
    row.beta_t_sq_dt = dt * rate_l2 * rate_l2;
    row.grad_beta_l2 = norm_grad_L2(step.phase.beta_new);
    const double lap = norm_L2(laplacian_neumann(step.phase.beta_new));
    row.lap_beta_sq_dt = dt * lap * lap;
    row.theta_l2 = norm_L2(step.heat.theta_new);
    row.beta_grad_theta_sq_dt = est.beta_grad_sq;
    row.grad_theta_p_dt = est.grad_p;
    row.eps_grad_theta_sq_dt = est.eps_grad_sq;
    row.xi_l2 = norm_L2(step.phase.xi);
    source_mass += dt * integral(r);
    row.conservation_residual =
        std::abs(mass(step.heat.theta_new, step.phase.beta_new) - out.ledger.initial_mass -
                 source_mass);
    row.complementarity_residual = step.phase.complementarity_residual;
    row.energy_lhs = est.lhs();
    row.energy_rhs = est.rhs();
    row.phase_estimate_lhs = pest.lhs;
    row.phase_estimate_rhs = pest.rhs;
    row.phase_iterations = step.phase.iterations;
    row.picard_iterations = step.heat.picard_iterations;
    row.linear_iterations = step.heat.linear_solver_iterations;
    row.outer_iterations = step.outer;
    row.picard_monotone = step.heat.picard_monotone;
    out.ledger.rows.push_back(row);

    out.stats.phase_iterations += step.phase.iterations;
    out.stats.picard_iterations += step.heat.picard_iterations;
    out.stats.linear_iterations += step.heat.linear_solver_iterations;
    out.stats.outer_iterations += step.outer;
    for (const std::string &w : step.heat.warnings)
      out.warnings.push_back("step " + std::to_string(k) + ": " + w);

    out.theta = std::move(step.heat.theta_new);
    out.beta = std::move(step.phase.beta_new);
    out.xi = std::move(step.phase.xi);
    if (observer)
      observer(k, t_new, out.theta, out.beta);

    if (config.keep_snapshots) {
      bool record = false;
      if (cadence > 0.0)
        while (static_cast<double>(next_mark) * cadence <= t_new + 1e-9 * config.dt) {
          record = true;
          ++next_mark;
        }
      if (k == steps && out.snapshots.back().t != t_new)
        record = true;
      if (record)
        out.snapshots.push_back({t_new, out.theta, out.beta, out.xi});
    }
  }
  out.stats.steps = steps;
  out.stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  return out;
}

} // namespace cryophase
