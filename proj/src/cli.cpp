#include "cryophase/cli.hpp"

#include "cryophase/config.hpp"
#include "cryophase/csv_io.hpp"
#include "cryophase/errors.hpp"
#include "cryophase/studies.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace cryophase {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char *kVersion = "0.1.0";

std::string output_dir_for(const std::string &flag, const ConfigFile &cfg) {
  if (!flag.empty())
    return flag;
  if (const char *env = std::getenv("CRYOPHASE_OUTPUT_DIR"); env && *env)
    return env;
  return cfg.output_dir;
}

std::string slurp(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string diagnostics_text(const EnergyLedger &ledger) {
  std::ostringstream os;
  write_diagnostics_csv(os, ledger);
  return os.str();
}

std::vector<double> parse_eps_list(const std::string &list) {
  std::vector<double> eps;
  std::stringstream ss(list);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const auto b = tok.find_first_not_of(" \t");
    const auto e = tok.find_last_not_of(" \t");
    if (b == std::string::npos)
      throw ValidationError("empty entry in --eps list '" + list + "'");
    try {
      eps.push_back(parse_double(tok.substr(b, e - b + 1)));
    } catch (const ValidationError &) {
      throw ValidationError("malformed --eps entry '" + tok + "'");
    }
  }
  if (eps.empty())
    throw ValidationError("--eps list is empty");
  return eps;
}

int simulate(const std::string &config_path, const std::string &out_flag, bool seed_check,
             bool quiet, std::ostream &out, std::ostream &err) {
  ConfigFile cfg = load_config(config_path);
  const fs::path dir = output_dir_for(out_flag, cfg);
  fs::create_directories(dir);
  cfg.sim.dump_dir = dir.string();
  for (const std::string &w : cfg.warnings)
    err << "warning: " << w << '\n';

  const auto t0 = std::chrono::steady_clock::now();
  const RunResult res = run(cfg.sim);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (const std::string &w : res.warnings)
    err << "warning: " << w << '\n';

  for (std::size_t i = 0; i < res.snapshots.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%04zu.csv", i);
    const Snapshot &s = res.snapshots[i];
    write_snapshot_csv((dir / name).string(), s.theta, s.beta, s.xi);
  }
  const std::string diag = diagnostics_text(res.ledger);
  {
    std::ofstream os(dir / "diagnostics.csv", std::ios::binary);
    os << diag;
    if (!os)
      throw std::runtime_error("cannot write " + (dir / "diagnostics.csv").string());
  }

  json snaps = json::array();
  for (std::size_t i = 0; i < res.snapshots.size(); ++i)
    snaps.push_back(res.snapshots[i].t);
  json manifest{{"effective_config", cfg.effective},
                {"versions",
                 {{"cryophase", kVersion},
                  {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                        std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                        std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                  {"cli11", CLI11_VERSION},
                  {"compiler", __VERSION__},
                  {"cxx_standard", static_cast<long>(__cplusplus)}}},
                {"config_path", config_path},
                {"snapshot_times", snaps},
                {"steps", res.stats.steps},
                {"wall_seconds", wall}};
  {
    std::ofstream os(dir / "run_manifest.json", std::ios::binary);
    os << manifest.dump(2) << '\n';
  }

  if (!quiet) {
    out << "steps " << res.stats.steps << ", phase iterations " << res.stats.phase_iterations
        << ", picard iterations " << res.stats.picard_iterations << ", wall " << wall << " s\n";
    out << "max conservation residual "
        << format_double(res.ledger.max(&LedgerRow::conservation_residual)) << '\n';
    out << "output in " << dir.string() << '\n';
  }

  if (seed_check) {
    const RunResult again = run(cfg.sim);
    if (diagnostics_text(again.ledger) != diag) {
      err << "error: determinism check failed, a second run produced different diagnostics\n";
      return kExitAssertion;
    }
    if (!quiet)
      out << "determinism check passed\n";
  }
  return kExitOk;
}

int mms(std::size_t levels, const std::string &preset, std::ostream &out, std::ostream &err) {
  MmsSpec spec;
  spec.preset = mms_preset_from_string(preset);
  spec.levels = levels;
  const MmsReport rep = mms_run(spec);
  out << rep.table();
  if (!rep.passed()) {
    err << "error: observed order below threshold\n";
    return kExitAssertion;
  }
  return kExitOk;
}

int sweep(const std::string &config_path, const std::string &eps_text, const std::string &out_flag,
          std::ostream &out, std::ostream &err) {
  const std::vector<double> eps = parse_eps_list(eps_text);
  ConfigFile cfg = load_config(config_path);
  const fs::path dir = output_dir_for(out_flag, cfg);
  fs::create_directories(dir);
  const SweepReport rep = sweep_epsilon(cfg.sim, eps, false);

  std::vector<std::vector<std::string>> rows;
  out << "epsilon                  gap_theta                gap_beta                 status\n";
  for (const SweepRow &r : rep.rows) {
    rows.push_back({format_double(r.epsilon), format_double(r.gap_theta), format_double(r.gap_beta),
                    r.status});
    out << rows.back()[0] << "  " << rows.back()[1] << "  " << rows.back()[2] << "  " << r.status
        << '\n';
  }
  write_csv((dir / "sweep_report.csv").string(), {"epsilon", "gap_theta", "gap_beta", "status"},
            rows);
  if (rep.reference_status != "ok") {
    err << "error: reference run (epsilon = 0) failed: " << rep.reference_status << '\n';
    return kExitSolver;
  }
  if (!rep.complete()) {
    err << "error: some sweep members failed\n";
    return kExitSolver;
  }
  if (!rep.monotone) {
    err << "error: gap is not monotone in epsilon\n";
    return kExitAssertion;
  }
  return kExitOk;
}

int convergence(const std::string &config_path, std::size_t levels, const std::string &out_flag,
                std::ostream &out, std::ostream &err) {
  if (levels < 3)
    throw ValidationError("--levels must be at least 3");
  if (levels > 12)
    throw ValidationError("--levels must be at most 12");
  ConfigFile cfg = load_config(config_path);
  const fs::path dir = output_dir_for(out_flag, cfg);
  fs::create_directories(dir);
  std::vector<std::size_t> refinements;
  for (std::size_t k = 0; k < levels; ++k)
    refinements.push_back(std::size_t{1} << k);
  const json eff = cfg.effective;
  const ConvergenceReport rep = convergence_study(
      cfg.sim, refinements, [&eff](SimConfig &c) { apply_grid_data(eff, c); }, false);

  auto opt = [](const std::optional<double> &v) { return v ? format_double(*v) : std::string("-"); };
  std::vector<std::vector<std::string>> rows;
  out << "refinement  nodes  dt  error_theta  rate_theta  error_beta  rate_beta\n";
  for (const ConvergenceLevel &l : rep.levels) {
    rows.push_back({std::to_string(l.refinement), std::to_string(l.nodes), format_double(l.dt),
                    format_double(l.error_theta), opt(l.rate_theta), format_double(l.error_beta),
                    opt(l.rate_beta)});
    for (const std::string &c : rows.back())
      out << c << "  ";
    out << '\n';
  }
  write_csv((dir / "convergence_report.csv").string(),
            {"refinement", "nodes", "dt", "error_theta", "rate_theta", "error_beta", "rate_beta"},
            rows);

  // Errors against the finest level must shrink overall.
  const ConvergenceLevel &first = rep.levels.front();
  const ConvergenceLevel &last = rep.levels[rep.levels.size() - 2];
  const bool shrinking = (last.error_theta <= first.error_theta) && (last.error_beta <= first.error_beta);
  if (!shrinking) {
    err << "error: self-convergence errors do not decrease under refinement\n";
    return kExitAssertion;
  }
  return kExitOk;
}

} // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Helium supercooling phase-transition simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::string config, out_dir, eps_text, preset = "default";
  bool seed_check = false, quiet = false;
  std::size_t mms_levels = 4, conv_levels = 4;

  CLI::App *sim = app.add_subcommand("simulate", "Run one simulation from a config file");
  sim->add_option("config", config, "JSON config or run_manifest.json")->required();
  sim->add_option("--output-dir", out_dir, "Output directory (default: $CRYOPHASE_OUTPUT_DIR, then output.dir)");
  sim->add_flag("--seed-check", seed_check, "Run twice and require bitwise-identical diagnostics");
  sim->add_flag("--quiet", quiet, "No summary on stdout");

  CLI::App *mm = app.add_subcommand("mms", "Manufactured-solution order verification");
  mm->add_option("--levels", mms_levels, "Refinement levels (>= 3)");
  mm->add_option("--solution", preset, "Preset: default, linear, zero");

  CLI::App *sw = app.add_subcommand("sweep-eps", "Vanishing-epsilon sweep");
  sw->add_option("config", config, "JSON config")->required();
  sw->add_option("--eps", eps_text, "Comma-separated, strictly decreasing positive list")->required();
  sw->add_option("--output-dir", out_dir, "Output directory");

  CLI::App *cv = app.add_subcommand("convergence", "Self-convergence study under refinement");
  cv->add_option("config", config, "JSON config")->required();
  cv->add_option("--levels", conv_levels, "Number of levels (>= 3), factors 1, 2, 4, ...");
  cv->add_option("--output-dir", out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion &) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    if (*sim)
      return simulate(config, out_dir, seed_check, quiet, out, err);
    if (*mm)
      return mms(mms_levels, preset, out, err);
    if (*sw)
      return sweep(config, eps_text, out_dir, out, err);
    return convergence(config, conv_levels, out_dir, out, err);
  } catch (const ValidationError &e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const DomainError &e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NonConvergence &e) {
    err << "error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const LinearSolveFailure &e) {
    err << "error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const OrderRegression &e) {
    err << "error: " << e.what() << '\n';
    return kExitAssertion;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return kExitInternal;
  }
}

} // namespace cryophase
