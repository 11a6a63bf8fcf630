#pragma once

#include "cryophase/simulator.hpp"

#include <json.hpp>
#include <string>

namespace cryophase {

/// A parsed and validated JSON run configuration.
///
/// Sections: grid {dim, lengths, nodes}, model {theta_c, p, epsilon, delta, c_s,
/// ell, k, mu, d, variant}, time {dt, t_end}, coupling {mode, max_outer,
/// outer_tol}, initial {theta0, beta0}, source {r}, solvers {phase_tol,
/// phase_max_iter, picard_tol, picard_max, linear_tol}, output {dir, cadence}.
/// Missing entries take defaults; unknown keys are rejected.
struct ConfigFile {
  /// Fully expanded config (defaults filled in, CSV paths made absolute). Loading
  /// it again yields the same SimConfig.
  nlohmann::json effective;
  SimConfig sim;
  std::string output_dir;
  std::vector<std::string> warnings;
};

/// Reads and validates a config file. Errors are ValidationError with
/// "<file>:<line>:" prefixes where the offending key can be located.
ConfigFile load_config(const std::string &path);

/// Same as load_config for in-memory text. Relative CSV paths resolve against `base_dir`.
ConfigFile parse_config(const std::string &text, const std::string &origin = "<config>",
                        const std::string &base_dir = ".");

/// Re-evaluates initial data and sources of `cfg` on the grid already stored in
/// `sim` (used by refinement studies). CSV initial data cannot be regridded.
void apply_grid_data(const nlohmann::json &effective, SimConfig &sim);

} // namespace cryophase
