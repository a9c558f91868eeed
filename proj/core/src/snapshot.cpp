#include "vlab/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace vlab {

static_assert(std::endian::native == std::endian::little,
              "snapshot format is little-endian; byte swapping not implemented");

void write_snapshot(const std::string& path, const Snapshot& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_snapshot: cannot open " + path);
  const std::uint32_t n = static_cast<std::uint32_t>(s.field.grid.N);
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(&s.field.grid.L), sizeof(double));
  out.write(reinterpret_cast<const char*>(&s.t), sizeof(double));
  out.write(reinterpret_cast<const char*>(&s.nu), sizeof(double));
  out.write(reinterpret_cast<const char*>(s.field.values.data()),
            static_cast<std::streamsize>(s.field.values.size() * sizeof(double)));
  if (!out) throw std::runtime_error("write_snapshot: short write to " + path);
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_snapshot: cannot open " + path);
  std::uint32_t n = 0;
  double L = 0.0;
  Snapshot s;
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  in.read(reinterpret_cast<char*>(&L), sizeof(double));
  in.read(reinterpret_cast<char*>(&s.t), sizeof(double));
  in.read(reinterpret_cast<char*>(&s.nu), sizeof(double));
  if (!in) throw std::runtime_error("read_snapshot: truncated header in " + path);
  s.field = ScalarField(Grid2D(L, static_cast<int>(n)));
  in.read(reinterpret_cast<char*>(s.field.values.data()),
          static_cast<std::streamsize>(s.field.values.size() * sizeof(double)));
  if (!in) throw std::runtime_error("read_snapshot: truncated payload in " + path);
  return s;
}

}  // namespace vlab
