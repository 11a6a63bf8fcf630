#pragma once

#include "cryophase/grid.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace cryophase {

struct EnergyLedger;

/// Shortest-safe decimal form with 17 significant digits; parses back bitwise.
std::string format_double(double v);
/// Strict parse of a full token; throws ValidationError on garbage.
double parse_double(const std::string &token);

struct SnapshotFields {
  Field theta;
  Field beta;
  Field xi;
};

/// Header "x[,y],theta,beta,xi", one row per node in index order, LF endings.
void write_snapshot_csv(std::ostream &os, const Field &theta, const Field &beta, const Field &xi);
void write_snapshot_csv(const std::string &path, const Field &theta, const Field &beta,
                        const Field &xi);
/// Reads a snapshot written for `grid`; node coordinates are checked against it.
SnapshotFields read_snapshot_csv(std::istream &is, const Grid &grid);
SnapshotFields read_snapshot_csv(const std::string &path, const Grid &grid);

/// Column names of diagnostics.csv, in order.
std::vector<std::string> diagnostics_columns();
void write_diagnostics_csv(std::ostream &os, const EnergyLedger &ledger);
void write_diagnostics_csv(const std::string &path, const EnergyLedger &ledger);

/// Small helper for report tables.
void write_csv(const std::string &path, const std::vector<std::string> &header,
               const std::vector<std::vector<std::string>> &rows);

} // namespace cryophase
