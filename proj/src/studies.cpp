#include "cryophase/studies.hpp"

#include "cryophase/errors.hpp"
#include "cryophase/grid_ops.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace cryophase {

namespace {

constexpr double pi = std::numbers::pi;

double l2_error(const Field &h, const std::function<double(double)> &exact) {
  Field e(h.grid());
  for (std::size_t n = 0; n < e.size(); ++n)
    e[n] = h[n] - exact(h.grid().coord(n, 0));
  return norm_L2(e);
}

/// Runs `jobs` in order, or concurrently when `parallel`; results keep job order.
template <class R>
std::vector<R> run_all(const std::vector<std::function<R()>> &jobs, bool parallel) {
  std::vector<R> out;
  out.reserve(jobs.size());
  if (!parallel) {
    for (const auto &job : jobs)
      out.push_back(job());
    return out;
  }
  std::vector<std::future<R>> futures;
  for (const auto &job : jobs)
    futures.push_back(std::async(std::launch::async, job));
  for (auto &f : futures)
    out.push_back(f.get());
  return out;
}

std::optional<double> pair_order(double e_coarse, double e_fine, double ratio) {
  if (e_coarse == 0.0 && e_fine == 0.0)
    return std::nullopt;
  return std::log(e_coarse / e_fine) / std::log(ratio);
}

} // namespace

std::string to_string(MmsPreset preset) {
  switch (preset) {
  case MmsPreset::Default:
    return "default";
  case MmsPreset::Linear:
    return "linear";
  case MmsPreset::Zero:
    return "zero";
  }
  return "default";
}

MmsPreset mms_preset_from_string(const std::string &name) {
  if (name == "default")
    return MmsPreset::Default;
  if (name == "linear")
    return MmsPreset::Linear;
  if (name == "zero")
    return MmsPreset::Zero;
  throw ValidationError("unknown manufactured solution preset '" + name +
                        "' (expected default, linear or zero)");
}

ManufacturedSolution manufactured_solution(MmsPreset preset, const ModelParams &params) {
  const double tc = params.theta_c;
  ManufacturedSolution s;
  s.name = to_string(preset);
  if (preset == MmsPreset::Zero) {
    s.theta = [tc](double, double) { return tc; };
    s.theta_t = s.theta_x = [](double, double) { return 0.0; };
    s.beta = [](double, double) { return 0.5; };
    s.beta_t = s.beta_x = [](double, double) { return 0.0; };
    return s;
  }
  s.theta = [tc](double x, double t) { return tc + 0.5 * std::cos(pi * x) * std::exp(-t); };
  s.theta_t = [](double x, double t) { return -0.5 * std::cos(pi * x) * std::exp(-t); };
  s.theta_x = [](double x, double t) { return -0.5 * pi * std::sin(pi * x) * std::exp(-t); };
  if (preset == MmsPreset::Linear) {
    s.beta = [](double, double) { return 0.5; };
    s.beta_t = s.beta_x = [](double, double) { return 0.0; };
    return s;
  }
  s.beta = [](double x, double t) { return 0.5 + 0.25 * std::cos(pi * x) * std::exp(-t); };
  s.beta_t = [](double x, double t) { return -0.25 * std::cos(pi * x) * std::exp(-t); };
  s.beta_x = [](double x, double t) { return -0.25 * pi * std::sin(pi * x) * std::exp(-t); };
  return s;
}

SolverSettings default_mms_solvers() {
  SolverSettings s;
  s.phase.tol = 1e-12;
  s.heat.picard_tol = 1e-13;
  s.heat.linear_tol = 1e-13;
  return s;
}

SimConfig mms_config(const ManufacturedSolution &sol, const ModelParams &params,
                     std::size_t nodes, double dt, double t_end, const SolverSettings &solvers) {
  SimConfig cfg;
  cfg.grid = Grid::line(sol.length, nodes);
  cfg.model = params;
  cfg.dt = dt;
  cfg.t_end = t_end;
  cfg.solvers = solvers;
  cfg.keep_snapshots = false;
  cfg.allow_linear_flux = params.p == 2.0;
  cfg.theta0 = Field::from_function(cfg.grid, [&](double x, double) { return sol.theta(x, 0.0); });
  cfg.beta0 = Field::from_function(cfg.grid, [&](double x, double) { return sol.beta(x, 0.0); });

  const Grid grid = cfg.grid;
  const double h = grid.spacing(0), len = sol.length;
  auto face_x = [h, len](std::size_t n, int side) {
    // side -1: left control-volume edge, +1: right edge, clipped to the domain.
    const double x = static_cast<double>(n) * h + 0.5 * side * h;
    return std::clamp(x, 0.0, len);
  };
  const ModelParams mp = params;
  // Divergence terms enter as control-volume averages (flux differences) so the
  // sources stay bounded where the p-flux is singular in its derivative.
  cfg.source = [sol, mp, grid, face_x](double t) {
    Field r(grid);
    auto flux = [&](double x) {
      const double gx = sol.theta_x(x, t);
      const double b = sol.beta(x, t);
      return (flux_coefficient(gx * gx, b, mp) + mp.epsilon) * gx;
    };
    for (std::size_t n = 0; n < grid.node_count(); ++n) {
      const double x = grid.coord(n, 0);
      const double div = (flux(face_x(n, +1)) - flux(face_x(n, -1))) / grid.node_weight(n);
      r[n] = sol.theta_t(x, t) + sol.beta_t(x, t) - div;
    }
    return r;
  };
  cfg.mms_phase_source = [sol, mp, grid, face_x](double t) {
    Field s(grid);
    for (std::size_t n = 0; n < grid.node_count(); ++n) {
      const double x = grid.coord(n, 0);
      const double lap =
          (sol.beta_x(face_x(n, +1), t) - sol.beta_x(face_x(n, -1), t)) / grid.node_weight(n);
      s[n] = mp.mu * sol.beta_t(x, t) - lap - phase_driving_force(sol.theta(x, t), mp);
    }
    return s;
  };
  return cfg;
}

std::optional<double> fitted_order(const std::vector<double> &scale, const std::vector<double> &err) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < scale.size(); ++i)
    if (err[i] > 0.0) {
      lx.push_back(std::log(scale[i]));
      ly.push_back(std::log(err[i]));
    }
  if (lx.size() < 2)
    return std::nullopt;
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

bool MmsReport::passed() const {
  auto ok = [](const std::optional<double> &o, double thr) { return !o || *o >= thr; };
  return ok(spatial_order_theta, spatial_threshold) && ok(spatial_order_beta, spatial_threshold) &&
         ok(temporal_order_theta, temporal_threshold) && ok(temporal_order_beta, temporal_threshold);
}

std::string MmsReport::table() const {
  std::ostringstream os;
  auto order = [](const std::optional<double> &o) {
    std::ostringstream s;
    if (o)
      s << std::fixed << std::setprecision(3) << *o;
    else
      s << "exact";
    return s.str();
  };
  auto ladder = [&](const char *title, const std::vector<MmsLevel> &levels) {
    os << title << '\n';
    os << std::setw(7) << "nodes" << std::setw(13) << "h" << std::setw(13) << "dt" << std::setw(15)
       << "err_theta" << std::setw(10) << "order" << std::setw(15) << "err_beta" << std::setw(10)
       << "order" << '\n';
    for (std::size_t i = 0; i < levels.size(); ++i) {
      const MmsLevel &l = levels[i];
      os << std::setw(7) << l.nodes << std::scientific << std::setprecision(4) << std::setw(13)
         << l.h << std::setw(13) << l.dt << std::setw(15) << l.error_theta << std::setw(10)
         << (i == 0 ? "-" : order(l.order_theta)) << std::setw(15) << l.error_beta
         << std::setw(10) << (i == 0 ? "-" : order(l.order_beta)) << std::defaultfloat << '\n';
    }
  };
  ladder("spatial ladder (dt ~ h^2)", spatial);
  os << "fitted spatial order: theta " << order(spatial_order_theta) << ", beta "
     << order(spatial_order_beta) << " (threshold " << spatial_threshold << ")\n";
  ladder("temporal ladder (fixed fine mesh)", temporal);
  os << "fitted temporal order: theta " << order(temporal_order_theta) << ", beta "
     << order(temporal_order_beta) << " (threshold " << temporal_threshold << ")\n";
  return os.str();
}

MmsReport mms_run(const MmsSpec &spec) {
  if (spec.levels < 3)
    throw ValidationError("manufactured-solution study needs at least 3 levels");
  if (!(spec.t_end > 0.0) || spec.base_nodes < 3 || spec.base_steps < 1 ||
      spec.temporal_nodes < 3 || !(spec.dt_factor > 0.0))
    throw ValidationError("invalid manufactured-solution ladder settings");
  validate(spec.params, 1, /*allow_linear_flux=*/true);
  if (spec.params.variant != ModelVariant::Simplified)
    throw ValidationError("manufactured solutions are provided for the simplified model only");

  ModelParams params = spec.params;
  if (spec.preset == MmsPreset::Linear)
    params.p = 2.0;
  const ManufacturedSolution sol = manufactured_solution(spec.preset, params);
  for (double x : {0.0, sol.length})
    if (std::abs(sol.theta_x(x, 0.0)) > 1e-12 || std::abs(sol.beta_x(x, 0.0)) > 1e-12)
      throw ValidationError("manufactured solution is not Neumann compatible");

  auto level = [&](std::size_t nodes, std::size_t steps) {
    const double dt = spec.t_end / static_cast<double>(steps);
    const SimConfig cfg = mms_config(sol, params, nodes, dt, spec.t_end, spec.solvers);
    const RunResult res = run(cfg);
    MmsLevel l;
    l.nodes = nodes;
    l.h = cfg.grid.spacing(0);
    l.dt = dt;
    l.error_theta = l2_error(res.theta, [&](double x) { return sol.theta(x, spec.t_end); });
    l.error_beta = l2_error(res.beta, [&](double x) { return sol.beta(x, spec.t_end); });
    return l;
  };

  MmsReport rep;
  rep.spatial_threshold = spec.spatial_threshold;
  rep.temporal_threshold = spec.temporal_threshold;
  for (std::size_t k = 0; k < spec.levels; ++k) {
    const std::size_t nodes = (spec.base_nodes - 1) * (std::size_t{1} << k) + 1;
    const double h = sol.length / static_cast<double>(nodes - 1);
    const auto steps =
        static_cast<std::size_t>(std::ceil(spec.t_end / (spec.dt_factor * h * h) - 1e-9));
    rep.spatial.push_back(level(nodes, std::max<std::size_t>(steps, 1)));
  }
  for (std::size_t k = 0; k < spec.levels; ++k)
    rep.temporal.push_back(level(spec.temporal_nodes, spec.base_steps * (std::size_t{1} << k)));

  auto fill_orders = [](std::vector<MmsLevel> &ls, bool by_h) {
    for (std::size_t i = 1; i < ls.size(); ++i) {
      const double ratio = by_h ? ls[i - 1].h / ls[i].h : ls[i - 1].dt / ls[i].dt;
      ls[i].order_theta = pair_order(ls[i - 1].error_theta, ls[i].error_theta, ratio);
      ls[i].order_beta = pair_order(ls[i - 1].error_beta, ls[i].error_beta, ratio);
    }
  };
  fill_orders(rep.spatial, true);
  fill_orders(rep.temporal, false);

  std::vector<double> hs, dts, est, esb, ett, etb;
  for (const MmsLevel &l : rep.spatial) {
    hs.push_back(l.h);
    est.push_back(l.error_theta);
    esb.push_back(l.error_beta);
  }
  for (const MmsLevel &l : rep.temporal) {
    dts.push_back(l.dt);
    ett.push_back(l.error_theta);
    etb.push_back(l.error_beta);
  }
  rep.spatial_order_theta = fitted_order(hs, est);
  rep.spatial_order_beta = fitted_order(hs, esb);
  rep.temporal_order_theta = fitted_order(dts, ett);
  rep.temporal_order_beta = fitted_order(dts, etb);
  return rep;
}

MmsReport mms_verify(const MmsSpec &spec) {
  MmsReport rep = mms_run(spec);
  if (!rep.passed())
    throw OrderRegression("observed order below threshold\n" + rep.table());
  return rep;
}

bool SweepReport::complete() const {
  if (reference_status != "ok")
    return false;
  for (const SweepRow &r : rows)
    if (r.status != "ok")
      return false;
  return true;
}

SweepReport sweep_epsilon(const SimConfig &config, const std::vector<double> &eps_list,
                          bool parallel) {
  if (eps_list.empty())
    throw ValidationError("epsilon list is empty");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0) || !std::isfinite(eps_list[i]))
      throw ValidationError("epsilon values must be positive and finite");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
      throw ValidationError("epsilon list must be strictly decreasing");
  }
  validate(config);

  struct Trajectory {
    std::vector<Field> theta, beta;
    std::string status = "ok";
  };
  std::vector<std::function<Trajectory()>> jobs;
  std::vector<double> all_eps = eps_list;
  all_eps.push_back(0.0);
  for (double eps : all_eps)
    jobs.push_back([&config, eps] {
      SimConfig cfg = config;
      cfg.model.epsilon = eps;
      cfg.keep_snapshots = false;
      Trajectory tr;
      tr.theta.push_back(cfg.theta0);
      tr.beta.push_back(cfg.beta0);
      try {
        run(cfg, [&](std::size_t, double, const Field &th, const Field &be) {
          tr.theta.push_back(th);
          tr.beta.push_back(be);
        });
      } catch (const std::exception &e) {
        tr.status = e.what();
      }
      return tr;
    });
  const std::vector<Trajectory> trs = run_all(jobs, parallel);

  SweepReport rep;
  const Trajectory &ref = trs.back();
  rep.reference_status = ref.status;
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    SweepRow row;
    row.epsilon = eps_list[i];
    row.status = trs[i].status;
    if (row.status == "ok" && ref.status == "ok") {
      for (std::size_t k = 0; k < ref.theta.size(); ++k) {
        Field dth(config.grid), dbe(config.grid);
        for (std::size_t n = 0; n < dth.size(); ++n) {
          dth[n] = trs[i].theta[k][n] - ref.theta[k][n];
          dbe[n] = trs[i].beta[k][n] - ref.beta[k][n];
        }
        row.gap_theta = std::max(row.gap_theta, norm_L2(dth));
        row.gap_beta = std::max(row.gap_beta, norm_L2(dbe));
      }
    } else if (row.status == "ok") {
      row.status = "reference run failed";
    }
    rep.rows.push_back(row);
  }
  for (std::size_t i = 1; i < rep.rows.size(); ++i)
    if (rep.rows[i].status == "ok" && rep.rows[i - 1].status == "ok" &&
        rep.rows[i].gap_theta > rep.rows[i - 1].gap_theta)
      rep.monotone = false;
  return rep;
}

ConvergenceReport convergence_study(const SimConfig &base, const std::vector<std::size_t> &refinements,
                                    const GridDataFn &grid_data, bool parallel) {
  if (refinements.size() < 3)
    throw ValidationError("convergence study needs at least 3 levels");
  for (std::size_t i = 0; i < refinements.size(); ++i) {
    if (refinements[i] == 0)
      throw ValidationError("refinement factors must be positive");
    if (i > 0 && (refinements[i] <= refinements[i - 1] || refinements[i] % refinements[i - 1] != 0))
      throw ValidationError("refinement levels are not nested: each factor must be a proper "
                            "multiple of the previous one");
  }
  if (!grid_data)
    throw ValidationError("convergence study needs a grid-data callback");
  validate(base);

  const Grid &g0 = base.grid;
  std::vector<SimConfig> configs;
  for (std::size_t r : refinements) {
    SimConfig cfg = base;
    cfg.keep_snapshots = false;
    cfg.dump_dir.clear();
    const std::size_t nx = (g0.nodes(0) - 1) * r + 1;
    cfg.grid = g0.dim() == 2 ? Grid::rect(g0.length(0), g0.length(1), nx, (g0.nodes(1) - 1) * r + 1)
                             : Grid::line(g0.length(0), nx);
    cfg.dt = base.dt / static_cast<double>(r);
    cfg.theta0 = Field(cfg.grid);
    cfg.beta0 = Field(cfg.grid);
    grid_data(cfg);
    configs.push_back(std::move(cfg));
  }
  std::vector<std::function<RunResult()>> jobs;
  for (const SimConfig &cfg : configs)
    jobs.push_back([&cfg] { return run(cfg); });
  const std::vector<RunResult> results = run_all(jobs, parallel);

  ConvergenceReport rep;
  const RunResult &fine = results.back();
  const std::size_t rf = refinements.back();
  for (std::size_t k = 0; k < refinements.size(); ++k) {
    ConvergenceLevel lvl;
    lvl.refinement = refinements[k];
    lvl.nodes = configs[k].grid.nodes(0);
    lvl.dt = configs[k].dt;
    if (k + 1 < refinements.size()) {
      const Grid &gc = configs[k].grid;
      const std::size_t stride = rf / refinements[k];
      Field eth(gc), ebe(gc);
      for (std::size_t n = 0; n < gc.node_count(); ++n) {
        const auto [i, j] = gc.ij(n);
        const std::size_t m = fine.theta.grid().index(i * stride, j * stride);
        eth[n] = results[k].theta[n] - fine.theta[m];
        ebe[n] = results[k].beta[n] - fine.beta[m];
      }
      lvl.error_theta = norm_L2(eth);
      lvl.error_beta = norm_L2(ebe);
    }
    rep.levels.push_back(lvl);
  }
  for (std::size_t k = 1; k + 1 < rep.levels.size(); ++k) {
    const double ratio =
        static_cast<double>(rep.levels[k].refinement) / static_cast<double>(rep.levels[k - 1].refinement);
    rep.levels[k].rate_theta =
        pair_order(rep.levels[k - 1].error_theta, rep.levels[k].error_theta, ratio);
    rep.levels[k].rate_beta = pair_order(rep.levels[k - 1].error_beta, rep.levels[k].error_beta, ratio);
  }
  return rep;
}

} // namespace cryophase
