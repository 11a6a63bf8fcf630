#pragma once

#include "cryophase/constitutive.hpp"
#include "cryophase/grid.hpp"
#include "cryophase/heat_step.hpp"
#include "cryophase/phase_step.hpp"

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace cryophase {

enum class CouplingMode {
  Staggered, ///< one phase solve then one heat solve per step
  Iterated   ///< repeat the pair until theta stops changing
};

struct Coupling {
  CouplingMode mode = CouplingMode::Staggered;
  std::size_t max_outer = 50;
  double outer_tol = 1e-10;
};

/// Nodal field generator for time-dependent sources, evaluated at the new time level.
using NodalSource = std::function<Field(double t)>;

struct SolverSettings {
  PhaseSolverOptions phase;
  HeatSolverOptions heat;
};

struct SimConfig {
  Grid grid = Grid::line(1.0, 101);
  ModelParams model;
  double dt = 1e-2;
  double t_end = 1.0;
  Coupling coupling;
  Field theta0{grid, 2.17};
  Field beta0{grid, 0.5};
  /// Heat source r; empty means r = 0.
  NodalSource source;
  /// Extra right-hand side of the phase equation. Only manufactured-solution
  /// runs set this: the physical model has no phase source.
  NodalSource mms_phase_source;
  /// Admit p = 2 (linear flux). Verification harnesses only.
  bool allow_linear_flux = false;
  SolverSettings solvers;
  /// Snapshot spacing in simulated time; 0 keeps only the initial and final states.
  double output_cadence = 0.0;
  /// Where to dump the last good state when a step fails; empty disables dumps.
  std::string dump_dir;
  bool keep_snapshots = true;
};

/// Throws ValidationError on an inconsistent config; returns warnings.
std::vector<std::string> validate(const SimConfig &config);

struct Snapshot {
  double t = 0.0;
  Field theta;
  Field beta;
  Field xi;
};

/// Per-step diagnostics. "_dt" quantities are time-integral increments.
struct LedgerRow {
  std::size_t step = 0;
  double t = 0.0;
  double dt = 0.0;
  double beta_t_sq_dt = 0.0;   ///< dt ||beta_t||^2
  double grad_beta_l2 = 0.0;   ///< ||grad beta||
  double lap_beta_sq_dt = 0.0; ///< dt ||lap_h beta||^2
  double theta_l2 = 0.0;       ///< ||theta||
  double beta_grad_theta_sq_dt = 0.0;
  double grad_theta_p_dt = 0.0;
  double eps_grad_theta_sq_dt = 0.0;
  double xi_l2 = 0.0;
  double conservation_residual = 0.0; ///< |int(theta+beta) - int(theta0+beta0) - int_0^t int r|
  double complementarity_residual = 0.0;
  double energy_lhs = 0.0;
  double energy_rhs = 0.0;
  double phase_estimate_lhs = 0.0;
  double phase_estimate_rhs = 0.0;
  std::size_t phase_iterations = 0;
  std::size_t picard_iterations = 0;
  std::size_t linear_iterations = 0;
  std::size_t outer_iterations = 0;
  bool picard_monotone = true;
};

struct EnergyLedger {
  std::vector<LedgerRow> rows;
  /// Mass int(theta0 + beta0), used to scale conservation checks.
  double initial_mass = 0.0;

  /// Sum of a per-step increment over all rows.
  double total(double LedgerRow::*member) const;
  /// Max of a per-step quantity over all rows.
  double max(double LedgerRow::*member) const;
};

struct RunStats {
  std::size_t steps = 0;
  std::size_t phase_iterations = 0;
  std::size_t picard_iterations = 0;
  std::size_t linear_iterations = 0;
  std::size_t outer_iterations = 0;
  double wall_seconds = 0.0;
};

struct RunResult {
  Field theta;
  Field beta;
  Field xi;
  std::vector<Snapshot> snapshots;
  EnergyLedger ledger;
  RunStats stats;
  std::vector<std::string> warnings;
};

/// Called after every accepted step with the new state.
using StepObserver =
    std::function<void(std::size_t step, double t, const Field &theta, const Field &beta)>;

/// Integrates the coupled system from 0 to t_end.
RunResult run(const SimConfig &config, const StepObserver &observer = {});

/// Number of steps and the time of step k (the last step may be shorter).
std::size_t step_count(double dt, double t_end);
double step_time(std::size_t k, double dt, double t_end);

} // namespace cryophase
