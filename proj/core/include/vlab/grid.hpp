#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace vlab {

using Point = std::array<double, 2>;

inline Point operator+(Point a, Point b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Point operator-(Point a, Point b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Point operator*(double c, Point a) { return {c * a[0], c * a[1]}; }
inline double dot(Point a, Point b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm(Point a);

// Uniform cell-centered N x N grid on [-L/2, L/2)^2.  N must be a power of
// two (>= 16) so every spectral transform in the project sees an FFT-friendly
// size.
struct Grid2D {
  double L = 0.0;
  int N = 0;
  double h = 0.0;

  Grid2D() = default;
  Grid2D(double extent, int resolution);

  double x(int i) const { return -0.5 * L + (i + 0.5) * h; }
  double y(int j) const { return -0.5 * L + (j + 0.5) * h; }
  Point node(int i, int j) const { return {x(i), y(j)}; }
  std::size_t size() const { return static_cast<std::size_t>(N) * N; }
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(j) * N + i; }

  bool operator==(const Grid2D& o) const { return L == o.L && N == o.N; }
  bool operator!=(const Grid2D& o) const { return !(*this == o); }
};

struct ScalarField {
  Grid2D grid;
  std::vector<double> values;  // row-major, values[j*N + i]

  ScalarField() = default;
  explicit ScalarField(const Grid2D& g) : grid(g), values(g.size(), 0.0) {}

  double& operator()(int i, int j) { return values[grid.idx(i, j)]; }
  double operator()(int i, int j) const { return values[grid.idx(i, j)]; }
};

struct VectorField {
  Grid2D grid;
  std::vector<double> ux;
  std::vector<double> uy;

  VectorField() = default;
  explicit VectorField(const Grid2D& g) : grid(g), ux(g.size(), 0.0), uy(g.size(), 0.0) {}
};

bool all_finite(const std::vector<double>& v);
void require_finite(const ScalarField& f, const char* what);

// Compensated (Kahan) sum; reductions in this project must not lose digits
// to naive accumulation at N^2 ~ 10^6 terms.
double ksum(const double* x, std::size_t n);
double ksum(const std::vector<double>& x);

inline double norm(Point a) { return std::sqrt(a[0] * a[0] + a[1] * a[1]); }

}  // namespace vlab
