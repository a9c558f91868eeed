#pragma once

#include <string>

#include "vlab/grid.hpp"

namespace vlab {

// Flat little-endian field snapshot: {u32 N, f64 L, f64 t, f64 nu} followed
// by N^2 float64 row-major values.
struct Snapshot {
  double t = 0.0;
  double nu = 0.0;
  ScalarField field;
};

void write_snapshot(const std::string& path, const Snapshot& s);
Snapshot read_snapshot(const std::string& path);

}  // namespace vlab
