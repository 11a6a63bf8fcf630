#pragma once

#include "cryophase/simulator.hpp"
#include "cryophase/studies.hpp"

#include <string>
#include <vector>

namespace cryophase {

/// Built-in scenarios (1D, [0,1], r = 0):
///   steady_state  theta0 = theta_c, beta0 = 0.5; an exact equilibrium.
///   quench        theta0 = theta_c - 0.4 + 0.1 cos(pi x), beta0 = 1; the whole
///                 domain sits below the transition.
///   supercooling  theta0 = theta_c - 0.3 on [0, 1/2), theta_c + 0.3 on [1/2, 1],
///                 beta0 = 1; only the cold half transforms.
std::vector<std::string> scenario_names();

SimConfig make_scenario(const std::string &name, const ModelParams &params = {},
                        std::size_t nodes = 101, double dt = 1e-2, double t_end = 1.0);

/// Rebuilds a scenario's initial data on whatever grid the config carries.
GridDataFn scenario_grid_data(const std::string &name);

} // namespace cryophase
