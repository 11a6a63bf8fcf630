#include "cryophase/scenarios.hpp"

#include "cryophase/errors.hpp"

#include <cmath>
#include <numbers>

namespace cryophase {

std::vector<std::string> scenario_names() { return {"steady_state", "quench", "supercooling"}; }

GridDataFn scenario_grid_data(const std::string &name) {
  if (name == "steady_state")
    return [](SimConfig &c) {
      c.theta0 = Field(c.grid, c.model.theta_c);
      c.beta0 = Field(c.grid, 0.5);
    };
  if (name == "quench")
    return [](SimConfig &c) {
      const double tc = c.model.theta_c;
      c.theta0 = Field::from_function(
          c.grid, [tc](double x, double) { return tc - 0.4 + 0.1 * std::cos(std::numbers::pi * x); });
      c.beta0 = Field(c.grid, 1.0);
    };
  if (name == "supercooling")
    return [](SimConfig &c) {
      const double tc = c.model.theta_c;
      c.theta0 = Field::from_function(c.grid,
                                      [tc](double x, double) { return x < 0.5 ? tc - 0.3 : tc + 0.3; });
      c.beta0 = Field(c.grid, 1.0);
    };
  throw ValidationError("unknown scenario '" + name + "'");
}

SimConfig make_scenario(const std::string &name, const ModelParams &params, std::size_t nodes,
                        double dt, double t_end) {
  const GridDataFn fill = scenario_grid_data(name);
  SimConfig cfg;
  cfg.grid = Grid::line(1.0, nodes);
  cfg.model = params;
  cfg.dt = dt;
  cfg.t_end = t_end;
  cfg.output_cadence = 0.1 * t_end;
  fill(cfg);
  return cfg;
}

} // namespace cryophase
