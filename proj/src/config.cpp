#include "cryophase/config.hpp"

#include "cryophase/csv_io.hpp"
#include "cryophase/errors.hpp"
#include "cryophase/expression.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace cryophase {

using nlohmann::json;

namespace {

/// 1-based line of `"key"` inside the object introduced by `"section"`, or 0.
std::size_t locate(const std::string &text, const std::string &section, const std::string &key) {
  std::size_t from = 0;
  if (!section.empty()) {
    from = text.find("\"" + section + "\"");
    if (from == std::string::npos)
      return 0;
  }
  std::size_t at = key.empty() ? from : text.find("\"" + key + "\"", from);
  if (at == std::string::npos)
    return 0;
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + at, '\n'));
}

struct Context {
  const std::string &text;
  const std::string &origin;

  [[noreturn]] void fail(const std::string &section, const std::string &key,
                         const std::string &what) const {
    const std::size_t line = locate(text, section, key);
    std::ostringstream msg;
    msg << origin;
    if (line)
      msg << ':' << line;
    msg << ": " << what;
    throw ValidationError(msg.str());
  }
};

const std::map<std::string, std::set<std::string>> &schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"grid", {"dim", "lengths", "nodes"}},
      {"model", {"theta_c", "p", "epsilon", "delta", "c_s", "ell", "k", "mu", "d", "variant"}},
      {"time", {"dt", "t_end"}},
      {"coupling", {"mode", "max_outer", "outer_tol"}},
      {"initial", {"theta0", "beta0"}},
      {"source", {"r"}},
      {"solvers", {"phase_tol", "phase_max_iter", "picard_tol", "picard_max", "linear_tol"}},
      {"output", {"dir", "cadence"}}};
  return s;
}

json defaults() {
  const ModelParams mp;
  const SolverSettings ss;
  const Coupling cp;
  return json{{"grid", {{"dim", 1}, {"lengths", {1.0}}, {"nodes", {101}}}},
              {"model",
               {{"theta_c", mp.theta_c},
                {"p", mp.p},
                {"epsilon", mp.epsilon},
                {"delta", mp.delta},
                {"c_s", mp.c_s},
                {"ell", mp.ell},
                {"k", mp.k},
                {"mu", mp.mu},
                {"d", mp.d},
                {"variant", to_string(mp.variant)}}},
              {"time", {{"dt", 0.01}, {"t_end", 1.0}}},
              {"coupling",
               {{"mode", "staggered"}, {"max_outer", cp.max_outer}, {"outer_tol", cp.outer_tol}}},
              {"initial", {{"theta0", "theta_c"}, {"beta0", "0.5"}}},
              {"source", {{"r", "zero"}}},
              {"solvers",
               {{"phase_tol", ss.phase.tol},
                {"phase_max_iter", ss.phase.max_iter},
                {"picard_tol", ss.heat.picard_tol},
                {"picard_max", ss.heat.max_picard},
                {"linear_tol", ss.heat.linear_tol}}},
              {"output", {{"dir", "output"}, {"cadence", 0.1}}}};
}

bool is_csv_path(const std::string &s) {
  return s.size() > 4 && s.compare(s.size() - 4, 4, ".csv") == 0;
}

Field initial_field(const std::string &spec, const char *column, const Grid &grid,
                    const ModelParams &mp) {
  if (is_csv_path(spec)) {
    const SnapshotFields snap = read_snapshot_csv(spec, grid);
    return std::string(column) == "theta" ? snap.theta : snap.beta;
  }
  const Expression e(spec, {"x", "y", "theta_c"});
  return Field::from_function(grid, [&](double x, double y) {
    return e({{"x", x}, {"y", y}, {"theta_c", mp.theta_c}});
  });
}

NodalSource source_term(const std::string &spec, const Grid &grid, const ModelParams &mp) {
  if (spec == "zero")
    return {};
  const Expression e(spec, {"x", "y", "t", "theta_c"});
  const double tc = mp.theta_c;
  return [e, grid, tc](double t) {
    return Field::from_function(grid, [&](double x, double y) {
      return e({{"x", x}, {"y", y}, {"t", t}, {"theta_c", tc}});
    });
  };
}

Grid make_grid(const json &g) {
  const int dim = g.at("dim").get<int>();
  const auto lengths = g.at("lengths").get<std::vector<double>>();
  const auto nodes = g.at("nodes").get<std::vector<std::size_t>>();
  if (dim != 1 && dim != 2)
    throw ValidationError("grid.dim must be 1 or 2");
  if (lengths.size() != static_cast<std::size_t>(dim) || nodes.size() != static_cast<std::size_t>(dim))
    throw ValidationError("grid.lengths and grid.nodes need one entry per dimension");
  return dim == 1 ? Grid::line(lengths[0], nodes[0])
                  : Grid::rect(lengths[0], lengths[1], nodes[0], nodes[1]);
}

} // namespace

void apply_grid_data(const json &effective, SimConfig &sim) {
  const json &init = effective.at("initial");
  for (const char *key : {"theta0", "beta0"})
    if (is_csv_path(init.at(key).get<std::string>()))
      throw ValidationError(std::string("initial.") + key +
                            " is a CSV file and cannot be regridded");
  sim.theta0 = initial_field(init.at("theta0").get<std::string>(), "theta", sim.grid, sim.model);
  sim.beta0 = initial_field(init.at("beta0").get<std::string>(), "beta", sim.grid, sim.model);
  sim.source = source_term(effective.at("source").at("r").get<std::string>(), sim.grid, sim.model);
}

ConfigFile parse_config(const std::string &text, const std::string &origin,
                        const std::string &base_dir) {
  const Context ctx{text, origin};
  json user;
  try {
    user = json::parse(text);
  } catch (const json::parse_error &e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n');
    throw ValidationError(origin + ":" + std::to_string(line) + ": invalid JSON (" + e.what() + ")");
  }
  if (!user.is_object())
    ctx.fail("", "", "config must be a JSON object");
  // A run manifest carries the effective config of the run it describes.
  if (user.contains("effective_config") && user.contains("versions"))
    user = json(user["effective_config"]);

  json eff = defaults();
  for (auto it = user.begin(); it != user.end(); ++it) {
    const auto sec = schema().find(it.key());
    if (sec == schema().end())
      ctx.fail("", it.key(), "unknown section '" + it.key() + "'");
    if (!it.value().is_object())
      ctx.fail("", it.key(), "section '" + it.key() + "' must be an object");
    for (auto kv = it.value().begin(); kv != it.value().end(); ++kv) {
      if (!sec->second.count(kv.key()))
        ctx.fail(it.key(), kv.key(), "unknown key '" + it.key() + "." + kv.key() + "'");
      eff[it.key()][kv.key()] = kv.value();
    }
  }

  ConfigFile cfg;
  SimConfig &sim = cfg.sim;
  // Any type or range problem is reported against the key being read.
  std::string cur_section, cur_key;
  auto get = [&](const char *section, const char *key) -> const json & {
    cur_section = section;
    cur_key = key;
    return eff.at(section).at(key);
  };
  try {
    ModelParams &mp = sim.model;
    mp.theta_c = get("model", "theta_c").get<double>();
    mp.p = get("model", "p").get<double>();
    mp.epsilon = get("model", "epsilon").get<double>();
    mp.delta = get("model", "delta").get<double>();
    mp.c_s = get("model", "c_s").get<double>();
    mp.ell = get("model", "ell").get<double>();
    mp.k = get("model", "k").get<double>();
    mp.mu = get("model", "mu").get<double>();
    mp.d = get("model", "d").get<double>();
    mp.variant = model_variant_from_string(get("model", "variant").get<std::string>());

    cur_section = "grid";
    cur_key = "";
    sim.grid = make_grid(eff.at("grid"));
    cfg.warnings = validate(mp, sim.grid.dim());

    sim.dt = get("time", "dt").get<double>();
    sim.t_end = get("time", "t_end").get<double>();

    const std::string mode = get("coupling", "mode").get<std::string>();
    if (mode == "staggered")
      sim.coupling.mode = CouplingMode::Staggered;
    else if (mode == "iterated")
      sim.coupling.mode = CouplingMode::Iterated;
    else
      throw ValidationError("coupling.mode must be \"staggered\" or \"iterated\"");
    sim.coupling.max_outer = get("coupling", "max_outer").get<std::size_t>();
    sim.coupling.outer_tol = get("coupling", "outer_tol").get<double>();

    for (const char *key : {"theta0", "beta0"}) {
      std::string spec = get("initial", key).get<std::string>();
      if (is_csv_path(spec)) {
        std::filesystem::path p(spec);
        if (p.is_relative())
          p = std::filesystem::absolute(std::filesystem::path(base_dir) / p);
        spec = p.lexically_normal().string();
        eff["initial"][key] = spec;
      }
      (std::string(key) == "theta0" ? sim.theta0 : sim.beta0) =
          initial_field(spec, key == std::string("theta0") ? "theta" : "beta", sim.grid, mp);
    }
    sim.source = source_term(get("source", "r").get<std::string>(), sim.grid, mp);

    sim.solvers.phase.tol = get("solvers", "phase_tol").get<double>();
    sim.solvers.phase.max_iter = get("solvers", "phase_max_iter").get<std::size_t>();
    sim.solvers.heat.picard_tol = get("solvers", "picard_tol").get<double>();
    sim.solvers.heat.max_picard = get("solvers", "picard_max").get<std::size_t>();
    sim.solvers.heat.linear_tol = get("solvers", "linear_tol").get<double>();
    for (const char *key : {"phase_tol", "picard_tol", "linear_tol"})
      if (!(eff["solvers"][key].get<double>() > 0.0)) {
        cur_key = key;
        throw ValidationError(std::string("solvers.") + key + " must be positive");
      }

    cfg.output_dir = get("output", "dir").get<std::string>();
    sim.output_cadence = get("output", "cadence").get<double>();

    cur_section = "time";
    cur_key = "dt";
    const auto more = validate(sim);
    (void)more;
  } catch (const json::exception &e) {
    ctx.fail(cur_section, cur_key,
             cur_section + (cur_key.empty() ? "" : "." + cur_key) + ": wrong type (" + e.what() + ")");
  } catch (const ValidationError &e) {
    // Attribute messages that name a key ("model.p = ...") to that key's line.
    const std::string what = e.what();
    std::string section = cur_section, key = cur_key;
    const auto dot = what.find('.');
    const auto space = what.find_first_of(" =");
    if (dot != std::string::npos && space != std::string::npos && dot < space &&
        schema().count(what.substr(0, dot))) {
      section = what.substr(0, dot);
      key = what.substr(dot + 1, space - dot - 1);
    }
    ctx.fail(section, key, what);
  }
  cfg.effective = std::move(eff);
  return cfg;
}

ConfigFile load_config(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is)
    throw ValidationError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  const std::string base = std::filesystem::path(path).parent_path().string();
  return parse_config(ss.str(), path, base.empty() ? "." : base);
}

} // namespace cryophase
