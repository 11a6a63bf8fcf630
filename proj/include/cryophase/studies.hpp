#pragma once

#include "cryophase/simulator.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace cryophase {

// ---------------------------------------------------------------------------
// Manufactured solutions
// ---------------------------------------------------------------------------

/// A smooth 1D manufactured pair (theta_m, beta_m) on [0, length] together with
/// the derivatives needed to build consistent sources. Neumann compatibility
/// (theta_x = beta_x = 0 at both ends) is the caller's responsibility and is
/// checked by mms_run.
struct ManufacturedSolution {
  std::string name;
  double length = 1.0;
  std::function<double(double x, double t)> theta, theta_t, theta_x;
  std::function<double(double x, double t)> beta, beta_t, beta_x;
};

enum class MmsPreset {
  Default, ///< theta_c + 0.5 cos(pi x) e^-t, 0.5 + 0.25 cos(pi x) e^-t
  Linear,  ///< p = 2 and beta_m = 0.5: the flux is linear
  Zero     ///< theta_m = theta_c, beta_m = 0.5: all sources vanish
};

std::string to_string(MmsPreset preset);
MmsPreset mms_preset_from_string(const std::string &name);

ManufacturedSolution manufactured_solution(MmsPreset preset, const ModelParams &params);

/// Tight solver tolerances so that discretization error dominates.
SolverSettings default_mms_solvers();

struct MmsSpec {
  MmsPreset preset = MmsPreset::Default;
  ModelParams params;
  double t_end = 0.1;
  std::size_t levels = 4;
  /// Spatial ladder: nodes = (base_nodes - 1) 2^k + 1 with dt = dt_factor h^2.
  std::size_t base_nodes = 11;
  double dt_factor = 0.5;
  /// Temporal ladder: fixed fine mesh, dt = t_end / (base_steps 2^k).
  std::size_t temporal_nodes = 801;
  std::size_t base_steps = 4;
  double spatial_threshold = 1.9;
  double temporal_threshold = 0.9;
  SolverSettings solvers = default_mms_solvers();
};

struct MmsLevel {
  std::size_t nodes = 0;
  double h = 0.0;
  double dt = 0.0;
  double error_theta = 0.0;
  double error_beta = 0.0;
  /// Order relative to the previous level; empty for the first level or when
  /// both errors vanish.
  std::optional<double> order_theta, order_beta;
};

struct MmsReport {
  std::vector<MmsLevel> spatial;
  std::vector<MmsLevel> temporal;
  /// Least-squares slopes of log error over log h (log dt); empty when exact.
  std::optional<double> spatial_order_theta, spatial_order_beta;
  std::optional<double> temporal_order_theta, temporal_order_beta;
  double spatial_threshold = 1.9;
  double temporal_threshold = 0.9;

  bool passed() const;
  std::string table() const;
};

/// Runs both refinement ladders and reports errors and observed orders.
MmsReport mms_run(const MmsSpec &spec);
/// mms_run followed by a threshold check; throws OrderRegression.
MmsReport mms_verify(const MmsSpec &spec);

/// Simulation config of a manufactured run (sources attached) on the given mesh.
SimConfig mms_config(const ManufacturedSolution &sol, const ModelParams &params,
                     std::size_t nodes, double dt, double t_end, const SolverSettings &solvers);

/// Least-squares slope of log(err) against log(scale).
std::optional<double> fitted_order(const std::vector<double> &scale, const std::vector<double> &err);

// ---------------------------------------------------------------------------
// epsilon sweep
// ---------------------------------------------------------------------------

struct SweepRow {
  double epsilon = 0.0;
  double gap_theta = 0.0; ///< max over steps of ||theta_eps - theta_0||
  double gap_beta = 0.0;  ///< max over steps of ||beta_eps - beta_0||
  std::string status = "ok";
};

struct SweepReport {
  std::vector<SweepRow> rows;
  std::string reference_status = "ok";
  bool monotone = true;

  bool complete() const;
};

/// Runs `config` at every epsilon of the strictly decreasing positive list and at
/// epsilon = 0, and compares the trajectories. Run failures are recorded in the
/// report rather than thrown. With `parallel` the member runs execute concurrently.
SweepReport sweep_epsilon(const SimConfig &config, const std::vector<double> &eps_list,
                          bool parallel = false);

// ---------------------------------------------------------------------------
// Self-convergence
// ---------------------------------------------------------------------------

struct ConvergenceLevel {
  std::size_t refinement = 1;
  std::size_t nodes = 0; ///< nodes along x
  double dt = 0.0;
  double error_theta = 0.0; ///< against the finest level, at final time
  double error_beta = 0.0;
  std::optional<double> rate_theta, rate_beta;
};

struct ConvergenceReport {
  std::vector<ConvergenceLevel> levels;
};

/// Rebuilds the grid-dependent parts of a config (initial fields, sources) after
/// its grid has been replaced by a refined one.
using GridDataFn = std::function<void(SimConfig &refined)>;

/// Runs `base` at every refinement factor (mesh spacing and dt divided by the
/// factor) and measures errors at the coarse nodes against the finest level.
/// Needs >= 3 strictly increasing factors, each dividing the next.
ConvergenceReport convergence_study(const SimConfig &base, const std::vector<std::size_t> &refinements,
                                    const GridDataFn &grid_data, bool parallel = false);

} // namespace cryophase
