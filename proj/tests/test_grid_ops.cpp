#include "cryophase/errors.hpp"
#include "cryophase/grid_ops.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace cryophase;

namespace {

Field random_field(const Grid &g, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Field f(g);
  for (std::size_t n = 0; n < f.size(); ++n)
    f[n] = u(rng);
  return f;
}

VectorField random_vector_field(const Grid &g, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  VectorField v(g);
  for (std::size_t f = 0; f < v.size(); ++f)
    v[f] = u(rng);
  return v;
}

std::vector<Grid> sample_grids() {
  return {Grid::line(1.0, 3), Grid::line(1.0, 17), Grid::line(2.5, 40), Grid::rect(1.0, 1.0, 3, 3),
          Grid::rect(1.0, 0.5, 9, 5), Grid::rect(2.0, 3.0, 12, 7)};
}

} // namespace

TEST_SUITE("grid_ops") {

TEST_CASE("grid construction and layout") {
  const Grid g = Grid::rect(2.0, 1.0, 5, 3);
  CHECK(g.node_count() == 15);
  CHECK(g.face_count(0) == 12);
  CHECK(g.face_count(1) == 10);
  CHECK(g.spacing(0) == 0.5);
  CHECK(g.face_nodes(0) == std::pair<std::size_t, std::size_t>{0, 1});
  CHECK(g.face_nodes(12) == std::pair<std::size_t, std::size_t>{0, 5});
  double w = 0.0;
  for (std::size_t n = 0; n < g.node_count(); ++n)
    w += g.node_weight(n);
  CHECK(w == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS(Grid::line(1.0, 2), ValidationError);
  CHECK_THROWS_AS(Grid::line(-1.0, 5), ValidationError);
  CHECK(Grid::line(1.0, 21).nests(Grid::line(1.0, 11)));
  CHECK_FALSE(Grid::line(1.0, 31).nests(Grid::line(1.0, 21)));
}

TEST_CASE("gradient of constant, linear and quadratic fields") {
  const Grid g = Grid::line(1.0, 11);
  const VectorField c = gradient(Field(g, 3.7));
  for (std::size_t f = 0; f < c.size(); ++f)
    CHECK(c[f] == 0.0);
  const VectorField lin = gradient(Field::from_function(g, [](double x, double) { return x; }));
  for (std::size_t f = 0; f < lin.size(); ++f)
    CHECK(lin[f] == doctest::Approx(1.0).epsilon(1e-12));
  const Field sq = Field::from_function(g, [](double x, double) { return x * x; });
  const VectorField gs = gradient(sq);
  for (std::size_t f = 0; f < gs.size(); ++f) {
    const double xi = 0.1 * static_cast<double>(f), xj = 0.1 * static_cast<double>(f + 1);
    CHECK(gs[f] == doctest::Approx(xi + xj).epsilon(1e-12));
  }
}

TEST_CASE("divergence of a face field on five nodes") {
  const Grid g = Grid::line(1.0, 5);
  VectorField v(g);
  for (std::size_t f = 0; f < v.size(); ++f)
    v[f] = g.face_center(f)[0];
  const Field d = divergence_neumann(v);
  // Interior: (v_R - v_L)/h = 0.25/0.25. Ends: one face over the half cell h/2.
  CHECK(d[0] == doctest::Approx(0.125 / 0.125));
  CHECK(d[1] == doctest::Approx(1.0));
  CHECK(d[2] == doctest::Approx(1.0));
  CHECK(d[3] == doctest::Approx(1.0));
  CHECK(d[4] == doctest::Approx(-0.875 / 0.125));
  const Field z = divergence_neumann(VectorField(g));
  for (double x : z.values())
    CHECK(x == 0.0);
}

TEST_CASE("discrete divergence theorem") {
  std::mt19937_64 rng(1);
  for (const Grid &g : sample_grids()) {
    for (int k = 0; k < 20; ++k) {
      const VectorField v = random_vector_field(g, rng);
      double scale = 0.0;
      for (double x : v.values())
        scale += std::abs(x);
      REQUIRE(std::abs(integral(divergence_neumann(v))) <= 1e-13 * std::max(1.0, scale));
    }
  }
}

TEST_CASE("summation by parts") {
  std::mt19937_64 rng(2);
  for (const Grid &g : sample_grids()) {
    for (int k = 0; k < 20; ++k) {
      const Field f = random_field(g, rng);
      const VectorField v = random_vector_field(g, rng);
      const double lhs = inner(f, divergence_neumann(v));
      const double rhs = -face_inner(gradient(f), v);
      REQUIRE(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }
}

TEST_CASE("laplacian is symmetric and negative semidefinite") {
  std::mt19937_64 rng(3);
  for (const Grid &g : sample_grids()) {
    for (int k = 0; k < 20; ++k) {
      const Field f = random_field(g, rng), h = random_field(g, rng);
      REQUIRE(inner(f, laplacian_neumann(h)) ==
              doctest::Approx(inner(h, laplacian_neumann(f))).epsilon(1e-12));
      REQUIRE(inner(f, laplacian_neumann(f)) <= 1e-14);
    }
  }
}

TEST_CASE("laplacian of constant and linear fields") {
  const Grid g = Grid::line(1.0, 5);
  const Field flat = laplacian_neumann(Field(g, -2.5));
  for (double x : flat.values())
    CHECK(std::abs(x) <= 1e-15);
  const Field lap = laplacian_neumann(Field::from_function(g, [](double x, double) { return x; }));
  // Unit slope leaves through the ends: +-1 over the half cell 0.125.
  CHECK(lap[0] == doctest::Approx(8.0));
  CHECK(std::abs(lap[1]) <= 1e-13);
  CHECK(std::abs(lap[2]) <= 1e-13);
  CHECK(std::abs(lap[3]) <= 1e-13);
  CHECK(lap[4] == doctest::Approx(-8.0));
}

TEST_CASE("laplacian of cos(pi x) converges at second order") {
  const double pi = std::numbers::pi;
  std::vector<double> err, h;
  for (std::size_t n : {21u, 41u, 81u, 161u}) {
    const Grid g = Grid::line(1.0, n);
    const Field lap = laplacian_neumann(Field::from_function(g, [&](double x, double) { return std::cos(pi * x); }));
    Field e(g);
    for (std::size_t i = 0; i < n; ++i)
      e[i] = lap[i] + pi * pi * std::cos(pi * g.coord(i, 0));
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      m = std::max(m, std::abs(e[i]));
    err.push_back(m);
    h.push_back(g.spacing(0));
  }
  for (std::size_t i = 1; i < err.size(); ++i)
    CHECK(std::log(err[i - 1] / err[i]) / std::log(h[i - 1] / h[i]) >= 1.9);
}

TEST_CASE("two-dimensional laplacian converges at second order") {
  const double pi = std::numbers::pi;
  std::vector<double> err;
  for (std::size_t n : {11u, 21u, 41u}) {
    const Grid g = Grid::rect(1.0, 1.0, n, n);
    const Field f = Field::from_function(g, [&](double x, double y) { return std::cos(pi * x) * std::cos(pi * y); });
    const Field lap = laplacian_neumann(f);
    double m = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k)
      m = std::max(m, std::abs(lap[k] + 2.0 * pi * pi * f[k]));
    err.push_back(m);
  }
  for (std::size_t i = 1; i < err.size(); ++i)
    CHECK(std::log2(err[i - 1] / err[i]) >= 1.9);
}

TEST_CASE("norms and integrals") {
  const Grid g = Grid::line(1.0, 11);
  const Field one(g, 1.0);
  CHECK(integral(one) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(norm_L2(one) == doctest::Approx(1.0).epsilon(1e-15));
  const Field x = Field::from_function(g, [](double s, double) { return s; });
  CHECK(norm_Lp_grad(x, 1.5) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(norm_grad_L2(x) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(norm_H1(x) * norm_H1(x) == doctest::Approx(norm_L2(x) * norm_L2(x) + 1.0).epsilon(1e-13));
  const Grid g101 = Grid::line(1.0, 101);
  const Field s = Field::from_function(g101, [](double t, double) { return std::sin(std::numbers::pi * t); });
  CHECK(std::abs(norm_L2(s) - std::sqrt(0.5)) <= 1e-3);
  const Grid r = Grid::rect(2.0, 3.0, 5, 4);
  CHECK(integral(Field(r, 1.0)) == doctest::Approx(6.0).epsilon(1e-15));
}

TEST_CASE("stiffness operator agrees with the laplacian") {
  std::mt19937_64 rng(4);
  for (const Grid &g : sample_grids()) {
    const Field f = random_field(g, rng);
    std::vector<double> ones(g.face_count(), 1.0), kf(g.node_count());
    stiffness_apply(g, ones, f.values(), kf);
    const Field lap = laplacian_neumann(f);
    for (std::size_t n = 0; n < g.node_count(); ++n)
      REQUIRE(kf[n] == doctest::Approx(-g.node_weight(n) * lap[n]).epsilon(1e-12));
    const auto diag = stiffness_diagonal(g, ones);
    for (std::size_t n = 0; n < g.node_count(); ++n) {
      Field e(g);
      e[n] = 1.0;
      std::vector<double> ke(g.node_count());
      stiffness_apply(g, ones, e.values(), ke);
      REQUIRE(diag[n] == doctest::Approx(ke[n]).epsilon(1e-14));
    }
  }
}

TEST_CASE("face gradient magnitude in two dimensions") {
  const Grid g = Grid::rect(1.0, 1.0, 9, 9);
  const Field f = Field::from_function(g, [](double x, double y) { return 2.0 * x - 3.0 * y; });
  const auto g2 = face_gradient_norm_sq(f);
  for (std::size_t face = 0; face < g.face_count(); ++face) {
    const auto [lo, hi] = g.face_nodes(face);
    const auto [il, jl] = g.ij(lo);
    const auto [ih, jh] = g.ij(hi);
    // The tangential component is reconstructed away from the boundary rows only.
    const bool boundary_row =
        g.face_axis(face) == 0 ? (jl == 0 || jl == 8) : (il == 0 || il == 8);
    (void)ih;
    (void)jh;
    const double expect = boundary_row ? (g.face_axis(face) == 0 ? 4.0 : 9.0) : 13.0;
    REQUIRE(g2[face] == doctest::Approx(expect).epsilon(1e-12));
  }
}

}
