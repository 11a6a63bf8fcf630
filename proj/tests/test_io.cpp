#include "cryophase/config.hpp"
#include "cryophase/csv_io.hpp"
#include "cryophase/errors.hpp"
#include "cryophase/expression.hpp"
#include "cryophase/scenarios.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

using namespace cryophase;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

std::string message_of(const std::string &config_text) {
  try {
    parse_config(config_text, "case.json");
  } catch (const ValidationError &e) {
    return e.what();
  }
  return {};
}

} // namespace

TEST_SUITE("io") {

TEST_CASE("doubles survive a text round trip bit for bit") {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<std::uint64_t> bits;
  int checked = 0;
  while (checked < 20000) {
    const std::uint64_t b = bits(rng);
    double v;
    std::memcpy(&v, &b, sizeof v);
    if (!std::isfinite(v))
      continue;
    REQUIRE(same_bits(parse_double(format_double(v)), v));
    ++checked;
  }
  for (double v : {0.0, -0.0, 1.0 / 3.0, std::numeric_limits<double>::denorm_min(),
                   std::numeric_limits<double>::max(), 2.17})
    CHECK(same_bits(parse_double(format_double(v)), v));
  CHECK_THROWS_AS(parse_double("abc"), ValidationError);
  CHECK_THROWS_AS(parse_double("1.0x"), ValidationError);
  CHECK_THROWS_AS(parse_double(""), ValidationError);
}

TEST_CASE("snapshot CSV round trip") {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> u(0.0, 10.0);
  for (const Grid &g : {Grid::line(1.0, 17), Grid::rect(0.3, 0.7, 5, 6)}) {
    Field th(g), be(g), xi(g);
    for (std::size_t n = 0; n < g.node_count(); ++n) {
      th[n] = u(rng);
      be[n] = std::abs(std::sin(u(rng)));
      xi[n] = u(rng) * 1e-7;
    }
    std::ostringstream os;
    write_snapshot_csv(os, th, be, xi);
    const std::string text = os.str();
    CHECK(text.find('\r') == std::string::npos);
    CHECK(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) == g.node_count() + 1);
    CHECK(text.rfind(g.dim() == 2 ? "x,y,theta,beta,xi\n" : "x,theta,beta,xi\n", 0) == 0);
    std::istringstream is(text);
    const SnapshotFields back = read_snapshot_csv(is, g);
    CHECK(back.theta == th);
    CHECK(back.beta == be);
    CHECK(back.xi == xi);
  }
}

TEST_CASE("snapshot reader rejects mismatched input") {
  const Grid g = Grid::line(1.0, 5);
  std::ostringstream os;
  write_snapshot_csv(os, Field(g, 1.0), Field(g, 0.5), Field(g));
  std::istringstream wrong_grid(os.str());
  CHECK_THROWS_AS(read_snapshot_csv(wrong_grid, Grid::line(1.0, 6)), ValidationError);
  std::istringstream wrong_coords(os.str());
  CHECK_THROWS_AS(read_snapshot_csv(wrong_coords, Grid::line(2.0, 5)), ValidationError);
  std::istringstream bad_header("a,b,c\n");
  CHECK_THROWS_AS(read_snapshot_csv(bad_header, g), ValidationError);
  std::istringstream bad_value("x,theta,beta,xi\n0,1,zz,0\n");
  CHECK_THROWS_AS(read_snapshot_csv(bad_value, g), ValidationError);
}

TEST_CASE("diagnostics CSV has one row per step") {
  const RunResult r = run(make_scenario("quench", {}, 21, 0.1, 0.5));
  std::ostringstream os;
  write_diagnostics_csv(os, r.ledger);
  const std::string text = os.str();
  CHECK(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) == r.ledger.rows.size() + 1);
  const auto cols = diagnostics_columns();
  CHECK(cols.front() == "step");
  CHECK(std::find(cols.begin(), cols.end(), "conservation_residual") != cols.end());
  CHECK(std::find(cols.begin(), cols.end(), "complementarity_residual") != cols.end());
}

TEST_CASE("expressions") {
  const double pi = std::numbers::pi;
  const Expression e("theta_c - 0.4 + 0.1*cos(pi*x)", {"x", "theta_c"});
  CHECK(e({{"x", 0.0}, {"theta_c", 2.17}}) == doctest::Approx(2.17 - 0.3));
  CHECK(e({{"x", 1.0}, {"theta_c", 2.17}}) == doctest::Approx(2.17 - 0.5));
  CHECK(Expression("2^3^2", {})({}) == 512.0);
  CHECK(Expression("-2^2", {})({}) == -4.0);
  CHECK(Expression("step(x - 0.5)", {"x"})({{"x", 0.5}}) == 1.0);
  CHECK(Expression("step(x - 0.5)", {"x"})({{"x", 0.49}}) == 0.0);
  CHECK(Expression("max(1, min(2, 3)) + abs(-1) + sqrt(4) + exp(0) + log(1) + tanh(0) + sin(0)", {})({}) == 6.0);
  CHECK(Expression("1e-3 * 2", {})({}) == doctest::Approx(2e-3));
  CHECK(Expression("cos(pi)", {})({}) == doctest::Approx(std::cos(pi)));
  CHECK_THROWS_AS(Expression("1 +", {}), ValidationError);
  CHECK_THROWS_AS(Expression("foo(1)", {}), ValidationError);
  CHECK_THROWS_AS(Expression("z + 1", {"x"}), ValidationError);
  CHECK_THROWS_AS(Expression("(1 + 2", {}), ValidationError);
  CHECK_THROWS_AS(Expression("1 2", {}), ValidationError);
}

TEST_CASE("config defaults and scenario files") {
  const ConfigFile c = parse_config("{}");
  CHECK(c.sim.grid.node_count() == 101);
  CHECK(c.sim.model.p == 1.5);
  CHECK(c.effective["time"]["dt"].get<double>() == 0.01);
  for (const std::string &name : scenario_names()) {
    const ConfigFile f = load_config(std::string(CRYOPHASE_SCENARIO_DIR) + "/" + name + ".json");
    const SimConfig lib = make_scenario(name);
    for (std::size_t n = 0; n < lib.theta0.size(); ++n) {
      REQUIRE(f.sim.theta0[n] == doctest::Approx(lib.theta0[n]).epsilon(1e-15));
      REQUIRE(f.sim.beta0[n] == lib.beta0[n]);
    }
    CHECK(f.sim.dt == lib.dt);
    CHECK(f.sim.t_end == lib.t_end);
  }
}

TEST_CASE("config errors carry file and line") {
  const std::string p25 = "{\n  \"model\": {\n    \"p\": 2.5\n  }\n}\n";
  const std::string m = message_of(p25);
  CHECK(m.find("case.json:3:") == 0);
  CHECK(m.find("1 < p < 2") != std::string::npos);

  const std::string unknown = "{\n  \"time\": {\"dt\": 0.1},\n  \"grid\": {\n    \"nodez\": [5]\n  }\n}\n";
  const std::string u = message_of(unknown);
  CHECK(u.find("case.json:4:") == 0);
  CHECK(u.find("grid.nodez") != std::string::npos);

  CHECK(message_of("{\"bogus\": {}}").find("unknown section") != std::string::npos);
  CHECK(message_of("{\"time\": {\"dt\": 10.0, \"t_end\": 1.0}}").find("dt") != std::string::npos);
  CHECK(message_of("{\"time\": {\"dt\": \"fast\"}}").find("time.dt") != std::string::npos);
  CHECK_FALSE(message_of("{\"initial\": {\"beta0\": \"1.5\"}}").empty());
  CHECK_FALSE(message_of("{\"initial\": {\"theta0\": \"x +\"}}").empty());
  CHECK_FALSE(message_of("{\"coupling\": {\"mode\": \"sometimes\"}}").empty());
  CHECK_FALSE(message_of("{\"grid\": {\"dim\": 2, \"lengths\": [1], \"nodes\": [5]}}").empty());
  CHECK(message_of("{\n\n  \"time\": [1,,]\n}").find("case.json:3:") == 0);
}

TEST_CASE("config with sources, 2D grid and CSV initial data") {
  const auto dir = std::filesystem::temp_directory_path() / "cryophase_config_test";
  std::filesystem::create_directories(dir);
  const Grid g = Grid::rect(1.0, 2.0, 4, 5);
  Field th = Field::from_function(g, [](double x, double y) { return 2.0 + x * y; });
  write_snapshot_csv((dir / "init.csv").string(), th, Field(g, 0.25), Field(g));
  const std::string text = R"({
    "grid": {"dim": 2, "lengths": [1.0, 2.0], "nodes": [4, 5]},
    "time": {"dt": 0.05, "t_end": 0.1},
    "coupling": {"mode": "iterated"},
    "initial": {"theta0": "init.csv", "beta0": "init.csv"},
    "source": {"r": "sin(pi*t) * x"}
  })";
  const ConfigFile c = parse_config(text, "inline", dir.string());
  CHECK(c.sim.theta0 == th);
  CHECK(c.sim.beta0 == Field(g, 0.25));
  CHECK(c.sim.coupling.mode == CouplingMode::Iterated);
  const Field r = c.sim.source(0.5);
  CHECK(r[g.index(3, 0)] == doctest::Approx(1.0));
  CHECK(std::filesystem::path(c.effective["initial"]["theta0"].get<std::string>()).is_absolute());
  // The effective config reproduces the same SimConfig.
  const ConfigFile again = parse_config(c.effective.dump());
  CHECK(again.sim.theta0 == c.sim.theta0);
  SimConfig refined = c.sim;
  CHECK_THROWS_AS(apply_grid_data(c.effective, refined), ValidationError);
  std::filesystem::remove_all(dir);
}

}
