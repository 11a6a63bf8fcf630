#include "cryophase/grid_ops.hpp"

#include <cmath>

namespace cryophase {

VectorField gradient(const Field &f) {
  const Grid &g = f.grid();
  VectorField out(g);
  for (std::size_t face = 0; face < g.face_count(); ++face) {
    const auto [lo, hi] = g.face_nodes(face);
    out[face] = (f[hi] - f[lo]) / g.spacing(g.face_axis(face));
  }
  return out;
}

Field divergence_neumann(const VectorField &v) {
  const Grid &g = v.grid();
  Field out(g);
  for (std::size_t face = 0; face < g.face_count(); ++face) {
    const auto [lo, hi] = g.face_nodes(face);
    const double flow = v[face] * g.face_volume(face) / g.spacing(g.face_axis(face));
    out[lo] += flow;
    out[hi] -= flow;
  }
  for (std::size_t n = 0; n < g.node_count(); ++n)
    out[n] /= g.node_weight(n);
  return out;
}

Field laplacian_neumann(const Field &f) { return divergence_neumann(gradient(f)); }

std::vector<double> face_gradient_norm_sq(const Field &f) {
  const Grid &g = f.grid();
  std::vector<double> out(g.face_count());
  if (g.dim() == 1) {
    for (std::size_t face = 0; face < out.size(); ++face) {
      const auto [lo, hi] = g.face_nodes(face);
      const double d = (f[hi] - f[lo]) / g.spacing(0);
      out[face] = d * d;
    }
    return out;
  }
  const std::size_t nx = g.nodes(0), ny = g.nodes(1);
  // Central difference along `axis` at node (i, j) with even reflection.
  auto central = [&](std::size_t i, std::size_t j, int axis) {
    const std::size_t n = axis == 0 ? nx : ny;
    const std::size_t k = axis == 0 ? i : j;
    if (k == 0 || k + 1 == n)
      return 0.0;
    const std::size_t lo = axis == 0 ? g.index(i - 1, j) : g.index(i, j - 1);
    const std::size_t hi = axis == 0 ? g.index(i + 1, j) : g.index(i, j + 1);
    return (f[hi] - f[lo]) / (2.0 * g.spacing(axis));
  };
  for (std::size_t face = 0; face < out.size(); ++face) {
    const int axis = g.face_axis(face);
    const auto [lo, hi] = g.face_nodes(face);
    const double normal = (f[hi] - f[lo]) / g.spacing(axis);
    const auto [il, jl] = g.ij(lo);
    const auto [ih, jh] = g.ij(hi);
    const int other = 1 - axis;
    const double tangential = 0.5 * (central(il, jl, other) + central(ih, jh, other));
    out[face] = normal * normal + tangential * tangential;
  }
  return out;
}

VectorField face_average(const Field &f) {
  const Grid &g = f.grid();
  VectorField out(g);
  for (std::size_t face = 0; face < g.face_count(); ++face) {
    const auto [lo, hi] = g.face_nodes(face);
    out[face] = 0.5 * (f[lo] + f[hi]);
  }
  return out;
}

double integral(const Field &f) {
  const Grid &g = f.grid();
  double s = 0.0;
  for (std::size_t n = 0; n < g.node_count(); ++n)
    s += g.node_weight(n) * f[n];
  return s;
}

double inner(const Field &f, const Field &h) {
  const Grid &g = f.grid();
  double s = 0.0;
  for (std::size_t n = 0; n < g.node_count(); ++n)
    s += g.node_weight(n) * f[n] * h[n];
  return s;
}

double norm_L2(const Field &f) { return std::sqrt(inner(f, f)); }

double face_inner(const VectorField &v, const VectorField &w) {
  const Grid &g = v.grid();
  double s = 0.0;
  for (std::size_t face = 0; face < g.face_count(); ++face)
    s += v[face] * w[face] * g.face_volume(face);
  return s;
}

double norm_grad_L2(const Field &f) {
  const VectorField gr = gradient(f);
  return std::sqrt(face_inner(gr, gr));
}

double norm_Lp_grad(const Field &f, double p) {
  const Grid &g = f.grid();
  const VectorField gr = gradient(f);
  const std::vector<double> full = face_gradient_norm_sq(f);
  double s = 0.0;
  for (std::size_t face = 0; face < g.face_count(); ++face) {
    if (full[face] == 0.0)
      continue;
    s += std::pow(full[face], 0.5 * (p - 2.0)) * gr[face] * gr[face] * g.face_volume(face);
  }
  return std::pow(s, 1.0 / p);
}

double norm_H1(const Field &f) {
  const double l2 = norm_L2(f), gr = norm_grad_L2(f);
  return std::sqrt(l2 * l2 + gr * gr);
}

void stiffness_apply(const Grid &grid, std::span<const double> face_coeff,
                     std::span<const double> u, std::span<double> out) {
  for (std::size_t n = 0; n < out.size(); ++n)
    out[n] = 0.0;
  for (std::size_t face = 0; face < grid.face_count(); ++face) {
    const auto [lo, hi] = grid.face_nodes(face);
    const double h = grid.spacing(grid.face_axis(face));
    const double c = face_coeff[face] * grid.face_volume(face) / (h * h);
    const double flow = c * (u[lo] - u[hi]);
    out[lo] += flow;
    out[hi] -= flow;
  }
}

std::vector<double> stiffness_diagonal(const Grid &grid, std::span<const double> face_coeff) {
  std::vector<double> diag(grid.node_count(), 0.0);
  for (std::size_t face = 0; face < grid.face_count(); ++face) {
    const auto [lo, hi] = grid.face_nodes(face);
    const double h = grid.spacing(grid.face_axis(face));
    const double c = face_coeff[face] * grid.face_volume(face) / (h * h);
    diag[lo] += c;
    diag[hi] += c;
  }
  return diag;
}

std::vector<std::vector<NodeLink>> node_links(const Grid &grid) {
  std::vector<std::vector<NodeLink>> links(grid.node_count());
  for (std::size_t face = 0; face < grid.face_count(); ++face) {
    const auto [lo, hi] = grid.face_nodes(face);
    const double h = grid.spacing(grid.face_axis(face));
    const double c = grid.face_volume(face) / (h * h);
    links[lo].push_back({hi, face, c});
    links[hi].push_back({lo, face, c});
  }
  return links;
}

} // namespace cryophase
