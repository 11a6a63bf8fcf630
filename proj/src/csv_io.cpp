#include "cryophase/csv_io.hpp"

#include "cryophase/errors.hpp"
#include "cryophase/simulator.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cryophase {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string &token) {
  double v = 0.0;
  const char *first = token.data(), *last = token.data() + token.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last)
    throw ValidationError("not a number: '" + token + "'");
  return v;
}

namespace {

std::ofstream open_out(const std::string &path) {
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw Error("cannot open '" + path + "' for writing");
  return os;
}

std::vector<std::string> split(const std::string &line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ','))
    out.push_back(cell);
  if (!line.empty() && line.back() == ',')
    out.emplace_back();
  return out;
}

} // namespace

void write_snapshot_csv(std::ostream &os, const Field &theta, const Field &beta, const Field &xi) {
  const Grid &g = theta.grid();
  os << (g.dim() == 2 ? "x,y,theta,beta,xi\n" : "x,theta,beta,xi\n");
  for (std::size_t n = 0; n < g.node_count(); ++n) {
    os << format_double(g.coord(n, 0)) << ',';
    if (g.dim() == 2)
      os << format_double(g.coord(n, 1)) << ',';
    os << format_double(theta[n]) << ',' << format_double(beta[n]) << ',' << format_double(xi[n])
       << '\n';
  }
}

void write_snapshot_csv(const std::string &path, const Field &theta, const Field &beta,
                        const Field &xi) {
  std::ofstream os = open_out(path);
  write_snapshot_csv(os, theta, beta, xi);
}

SnapshotFields read_snapshot_csv(std::istream &is, const Grid &grid) {
  const std::string expected = grid.dim() == 2 ? "x,y,theta,beta,xi" : "x,theta,beta,xi";
  std::string line;
  if (!std::getline(is, line) || line != expected)
    throw ValidationError("snapshot header must be '" + expected + "'");
  SnapshotFields out{Field(grid), Field(grid), Field(grid)};
  const std::size_t ncoord = static_cast<std::size_t>(grid.dim());
  std::size_t n = 0;
  while (std::getline(is, line)) {
    if (line.empty())
      continue;
    const auto cells = split(line);
    if (cells.size() != ncoord + 3)
      throw ValidationError("snapshot row " + std::to_string(n + 2) + " has " +
                            std::to_string(cells.size()) + " columns");
    if (n >= grid.node_count())
      throw ValidationError("snapshot has more rows than the grid has nodes");
    for (std::size_t a = 0; a < ncoord; ++a) {
      const double c = parse_double(cells[a]);
      if (std::abs(c - grid.coord(n, static_cast<int>(a))) > 1e-9 * grid.length(static_cast<int>(a)))
        throw ValidationError("snapshot row " + std::to_string(n + 2) +
                              " does not match the grid coordinates");
    }
    out.theta[n] = parse_double(cells[ncoord]);
    out.beta[n] = parse_double(cells[ncoord + 1]);
    out.xi[n] = parse_double(cells[ncoord + 2]);
    ++n;
  }
  if (n != grid.node_count())
    throw ValidationError("snapshot has " + std::to_string(n) + " rows, grid has " +
                          std::to_string(grid.node_count()) + " nodes");
  return out;
}

SnapshotFields read_snapshot_csv(const std::string &path, const Grid &grid) {
  std::ifstream is(path, std::ios::binary);
  if (!is)
    throw ValidationError("cannot open snapshot '" + path + "'");
  return read_snapshot_csv(is, grid);
}

std::vector<std::string> diagnostics_columns() {
  return {"step",
          "t",
          "dt",
          "beta_t_sq_dt",
          "grad_beta_l2",
          "lap_beta_sq_dt",
          "theta_l2",
          "beta_grad_theta_sq_dt",
          "grad_theta_p_dt",
          "eps_grad_theta_sq_dt",
          "xi_l2",
          "conservation_residual",
          "complementarity_residual",
          "energy_lhs",
          "energy_rhs",
          "phase_estimate_lhs",
          "phase_estimate_rhs",
          "phase_iterations",
          "picard_iterations",
          "linear_iterations",
          "outer_iterations",
          "picard_monotone"};
}

void write_diagnostics_csv(std::ostream &os, const EnergyLedger &ledger) {
  const auto cols = diagnostics_columns();
  for (std::size_t c = 0; c < cols.size(); ++c)
    os << (c ? "," : "") << cols[c];
  os << '\n';
  for (const LedgerRow &r : ledger.rows) {
    os << r.step << ',' << format_double(r.t) << ',' << format_double(r.dt) << ','
       << format_double(r.beta_t_sq_dt) << ',' << format_double(r.grad_beta_l2) << ','
       << format_double(r.lap_beta_sq_dt) << ',' << format_double(r.theta_l2) << ','
       << format_double(r.beta_grad_theta_sq_dt) << ',' << format_double(r.grad_theta_p_dt) << ','
       << format_double(r.eps_grad_theta_sq_dt) << ',' << format_double(r.xi_l2) << ','
       << format_double(r.conservation_residual) << ','
       << format_double(r.complementarity_residual) << ',' << format_double(r.energy_lhs) << ','
       << format_double(r.energy_rhs) << ',' << format_double(r.phase_estimate_lhs) << ','
       << format_double(r.phase_estimate_rhs) << ',' << r.phase_iterations << ','
       << r.picard_iterations << ',' << r.linear_iterations << ',' << r.outer_iterations << ','
       << (r.picard_monotone ? 1 : 0) << '\n';
  }
}

void write_diagnostics_csv(const std::string &path, const EnergyLedger &ledger) {
  std::ofstream os = open_out(path);
  write_diagnostics_csv(os, ledger);
}

void write_csv(const std::string &path, const std::vector<std::string> &header,
               const std::vector<std::vector<std::string>> &rows) {
  std::ofstream os = open_out(path);
  for (std::size_t c = 0; c < header.size(); ++c)
    os << (c ? "," : "") << header[c];
  os << '\n';
  for (const auto &row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c)
      os << (c ? "," : "") << row[c];
    os << '\n';
  }
}

} // namespace cryophase
