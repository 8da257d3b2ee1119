#pragma once

#include <string>

#include "landau/grid.hpp"

namespace landau {

// Snapshot file: one JSON header line {d, n, half_width, time, schema_version}
// terminated by '\n', then n^d raw little-endian doubles, row-major.
inline constexpr int kSnapshotSchemaVersion = 1;

void write_snapshot(const std::string& path, const ScalarField& f, double time);

struct Snapshot {
  ScalarField field;
  double time = 0.0;
};

Snapshot read_snapshot(const std::string& path);

// Formats a double with 17 significant digits (round-trip exact).
std::string format_g17(double x);

}  // namespace landau
