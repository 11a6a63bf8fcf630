#include "cryophase/grid.hpp"

#include "cryophase/errors.hpp"

#include <cmath>
#include <sstream>

namespace cryophase {

Grid::Grid(int dim, std::array<std::size_t, 2> n, std::array<double, 2> len)
    : dim_(dim), n_(n), len_(len) {
  for (int a = 0; a < dim_; ++a) {
    if (n_[a] < 3) {
      std::ostringstream msg;
      msg << "grid axis " << a << " needs at least 3 nodes, got " << n_[a];
      throw ValidationError(msg.str());
    }
    if (!(len_[a] > 0.0) || !std::isfinite(len_[a])) {
      std::ostringstream msg;
      msg << "grid axis " << a << " needs a positive finite length, got " << len_[a];
      throw ValidationError(msg.str());
    }
    h_[a] = len_[a] / static_cast<double>(n_[a] - 1);
  }
}

Grid Grid::line(double length, std::size_t nodes) { return Grid(1, {nodes, 1}, {length, 1.0}); }

Grid Grid::rect(double lx, double ly, std::size_t nx, std::size_t ny) {
  return Grid(2, {nx, ny}, {lx, ly});
}

std::size_t Grid::face_count(int axis) const {
  if (axis == 0)
    return (n_[0] - 1) * n_[1];
  return dim_ == 2 ? n_[0] * (n_[1] - 1) : 0;
}

double Grid::coord(std::size_t node, int axis) const {
  const auto [i, j] = ij(node);
  return static_cast<double>(axis == 0 ? i : j) * h_[axis];
}

namespace {
double trapezoid_weight(std::size_t i, std::size_t n, double h) {
  return (i == 0 || i + 1 == n) ? 0.5 * h : h;
}
} // namespace

double Grid::node_weight(std::size_t node) const {
  const auto [i, j] = ij(node);
  double w = trapezoid_weight(i, n_[0], h_[0]);
  if (dim_ == 2)
    w *= trapezoid_weight(j, n_[1], h_[1]);
  return w;
}

std::pair<std::size_t, std::size_t> Grid::face_nodes(std::size_t face) const {
  const std::size_t nfx = face_count(0);
  if (face < nfx) {
    const std::size_t i = face % (n_[0] - 1), j = face / (n_[0] - 1);
    return {index(i, j), index(i + 1, j)};
  }
  const std::size_t f = face - nfx;
  const std::size_t i = f % n_[0], j = f / n_[0];
  return {index(i, j), index(i, j + 1)};
}

double Grid::face_volume(std::size_t face) const {
  const std::size_t nfx = face_count(0);
  if (dim_ == 1)
    return h_[0];
  if (face < nfx) {
    const std::size_t j = face / (n_[0] - 1);
    return h_[0] * trapezoid_weight(j, n_[1], h_[1]);
  }
  const std::size_t i = (face - nfx) % n_[0];
  return h_[1] * trapezoid_weight(i, n_[0], h_[0]);
}

std::array<double, 2> Grid::face_center(std::size_t face) const {
  const auto [lo, hi] = face_nodes(face);
  std::array<double, 2> c{0.5 * (coord(lo, 0) + coord(hi, 0)), 0.0};
  if (dim_ == 2)
    c[1] = 0.5 * (coord(lo, 1) + coord(hi, 1));
  return c;
}

bool Grid::nests(const Grid &coarse) const {
  if (coarse.dim_ != dim_)
    return false;
  for (int a = 0; a < dim_; ++a) {
    if (coarse.len_[a] != len_[a])
      return false;
    const std::size_t cm = coarse.n_[a] - 1, fm = n_[a] - 1;
    if (fm < cm || fm % cm != 0)
      return false;
  }
  return true;
}

Field::Field(const Grid &grid, double value) : grid_(grid), values_(grid.node_count(), value) {}

Field::Field(const Grid &grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.node_count()) {
    std::ostringstream msg;
    msg << "field has " << values_.size() << " values but the grid has " << grid_.node_count()
        << " nodes";
    throw ValidationError(msg.str());
  }
}

bool Field::all_finite() const {
  for (double v : values_)
    if (!std::isfinite(v))
      return false;
  return true;
}

VectorField::VectorField(const Grid &grid, double value)
    : grid_(grid), values_(grid.face_count(), value) {}

} // namespace cryophase
