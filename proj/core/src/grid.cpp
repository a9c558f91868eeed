#include "vlab/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace vlab {

namespace {
bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }
}

Grid2D::Grid2D(double extent, int resolution) : L(extent), N(resolution) {
  if (L <= 0.0) throw std::invalid_argument("Grid2D: extent L must be positive");
  if (!is_pow2(N) || N < 16)
    throw std::invalid_argument("Grid2D: N must be a power of two >= 16, got " + std::to_string(N));
  h = L / N;
}

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

void require_finite(const ScalarField& f, const char* what) {
  if (f.values.size() != f.grid.size())
    throw std::invalid_argument(std::string(what) + ": value count does not match grid");
  if (!all_finite(f.values)) throw std::invalid_argument(std::string(what) + ": non-finite values");
}

double ksum(const double* x, std::size_t n) {
  double s = 0.0, c = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double y = x[i] - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

double ksum(const std::vector<double>& x) { return ksum(x.data(), x.size()); }

}  // namespace vlab
