#pragma once

#include <string>

#include "maxpot/grid.hpp"

namespace maxpot {

/// Field file: one JSON header line {version, n, dims, h, origin, m,
/// encoding} followed by little-endian 64-bit float samples,
/// component-major then row-major nodes.
void write_field(const Field& f, const std::string& path);
Field read_field(const std::string& path);

/// CSV export: columns x1..xn, v1..vm, one node per row.
void write_field_csv(const Field& f, const std::string& path);

/// Shortest-width decimal that round-trips a double; shared by every CSV
/// writer so outputs stay byte-stable.
std::string format_double(double v);

}  // namespace maxpot
