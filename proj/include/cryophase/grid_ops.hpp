#pragma once

#include "cryophase/grid.hpp"

#include <span>
#include <vector>

namespace cryophase {

/// Face-normal difference quotients (u_hi - u_lo) / h.
VectorField gradient(const Field &f);

/// Nodal divergence with zero flux through the domain boundary:
/// (div v)_i = (1 / w_i) * sum over faces of +-v_f * vol_f / h_f.
/// The weighted nodal sum of the result vanishes identically.
Field divergence_neumann(const VectorField &v);

/// divergence_neumann(gradient(f)): 3-point / 5-point stencil with reflected
/// boundary closure.
Field laplacian_neumann(const Field &f);

/// Squared magnitude of the full gradient at every face. The normal part is
/// the face difference quotient; in 2D the tangential part is the mean of the
/// two adjacent nodal central differences (reflected at the boundary).
std::vector<double> face_gradient_norm_sq(const Field &f);

/// Arithmetic mean of the two nodal values at each face.
VectorField face_average(const Field &f);

double integral(const Field &f);
/// Trapezoidal-weighted inner product.
double inner(const Field &f, const Field &g);
double norm_L2(const Field &f);
/// sum_f v_f w_f vol_f.
double face_inner(const VectorField &v, const VectorField &w);
/// (sum_f |grad f|_f^2 vol_f)^(1/2).
double norm_grad_L2(const Field &f);
/// (sum_f |G_f|^(p-2) g_f^2 vol_f)^(1/p) with g_f the normal difference quotient
/// and G_f the full face gradient; in 1D this is (sum_f |g_f|^p vol_f)^(1/p).
double norm_Lp_grad(const Field &f, double p);
double norm_H1(const Field &f);

/// Symmetric stiffness action out_i = sum_f c_f vol_f / h_f (u_i - u_j) over the
/// faces touching node i. Written in difference form so constant vectors map to
/// exactly zero.
void stiffness_apply(const Grid &grid, std::span<const double> face_coeff,
                     std::span<const double> u, std::span<double> out);

/// Diagonal of the stiffness matrix: sum over faces touching i of c_f vol_f / h_f.
std::vector<double> stiffness_diagonal(const Grid &grid, std::span<const double> face_coeff);

/// Face-to-neighbour adjacency used by nodal sweeps.
struct NodeLink {
  std::size_t neighbour;
  std::size_t face;
  double conductance; ///< vol_f / h_f^2
};

/// For every node, its links in a fixed order (x-lower, x-upper, y-lower, y-upper).
std::vector<std::vector<NodeLink>> node_links(const Grid &grid);

} // namespace cryophase
