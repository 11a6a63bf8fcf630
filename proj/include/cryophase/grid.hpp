#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace cryophase {

/// Uniform vertex-centred box grid in one or two dimensions.
///
/// Nodes sit at x_i = i h_x (and y_j = j h_y); node (i, j) has linear index
/// j * nx + i, so x varies fastest. Fluxes live on faces, i.e. on the links
/// between neighbouring nodes: first all x-faces ((nx-1) * ny of them, face
/// (i+1/2, j) has index j * (nx-1) + i), then all y-faces (nx * (ny-1), face
/// (i, j+1/2) has index (nx-1) * ny + j * nx + i). Boundary faces of the
/// finite-volume picture carry zero flux and are therefore not stored.
class Grid {
public:
  /// 1D grid on [0, length] with `nodes` nodes.
  static Grid line(double length, std::size_t nodes);
  /// 2D grid on [0, lx] x [0, ly].
  static Grid rect(double lx, double ly, std::size_t nx, std::size_t ny);

  int dim() const noexcept { return dim_; }
  std::size_t nodes(int axis) const { return n_[axis]; }
  double length(int axis) const { return len_[axis]; }
  double spacing(int axis) const { return h_[axis]; }

  std::size_t node_count() const noexcept { return n_[0] * n_[1]; }
  std::size_t face_count(int axis) const;
  std::size_t face_count() const noexcept { return face_count(0) + face_count(1); }

  std::size_t index(std::size_t i, std::size_t j = 0) const noexcept { return j * n_[0] + i; }
  std::pair<std::size_t, std::size_t> ij(std::size_t node) const noexcept {
    return {node % n_[0], node / n_[0]};
  }
  double coord(std::size_t node, int axis) const;

  /// Trapezoidal quadrature weight (control-volume measure) of a node.
  double node_weight(std::size_t node) const;
  /// Axis of a face: 0 for x-faces, 1 for y-faces.
  int face_axis(std::size_t face) const noexcept { return face < face_count(0) ? 0 : 1; }
  /// Lower and upper node of a face along its axis.
  std::pair<std::size_t, std::size_t> face_nodes(std::size_t face) const;
  /// Measure associated with a face: h along the axis times the transverse
  /// trapezoidal weight.
  double face_volume(std::size_t face) const;
  /// Midpoint coordinates of a face.
  std::array<double, 2> face_center(std::size_t face) const;

  double measure() const noexcept { return len_[0] * len_[1]; }

  /// Whether every node of `coarse` coincides with a node of this grid.
  bool nests(const Grid &coarse) const;

  friend bool operator==(const Grid &, const Grid &) = default;

private:
  Grid(int dim, std::array<std::size_t, 2> n, std::array<double, 2> len);

  int dim_ = 1;
  std::array<std::size_t, 2> n_{1, 1};
  std::array<double, 2> len_{1.0, 1.0};
  std::array<double, 2> h_{1.0, 1.0};
};

/// Nodal scalar field.
class Field {
public:
  explicit Field(const Grid &grid, double value = 0.0);
  Field(const Grid &grid, std::vector<double> values);

  template <class F>
  static Field from_function(const Grid &grid, F &&f) {
    Field out(grid);
    for (std::size_t n = 0; n < grid.node_count(); ++n)
      out[n] = f(grid.coord(n, 0), grid.dim() == 2 ? grid.coord(n, 1) : 0.0);
    return out;
  }

  const Grid &grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  double &operator[](std::size_t n) { return values_[n]; }
  double operator[](std::size_t n) const { return values_[n]; }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  bool all_finite() const;

  friend bool operator==(const Field &, const Field &) = default;

private:
  Grid grid_;
  std::vector<double> values_;
};

/// Face-staggered vector field: one normal component per interior face.
class VectorField {
public:
  explicit VectorField(const Grid &grid, double value = 0.0);

  const Grid &grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  double &operator[](std::size_t f) { return values_[f]; }
  double operator[](std::size_t f) const { return values_[f]; }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  friend bool operator==(const VectorField &, const VectorField &) = default;

private:
  Grid grid_;
  std::vector<double> values_;
};

} // namespace cryophase
