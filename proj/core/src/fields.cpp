#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "vlab/fft.hpp"
#include "vlab/grid.hpp"

namespace vlab {

double lp_norm(const ScalarField& f, double p) {
  require_finite(f, "lp_norm");
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
  }
  const double h2 = f.grid.h * f.grid.h;
  std::vector<double> terms(f.values.size());
  for (std::size_t i = 0; i < f.values.size(); ++i) terms[i] = std::pow(std::abs(f.values[i]), p);
  return std::pow(ksum(terms) * h2, 1.0 / p);
}

double lp_intersection_norm(const ScalarField& f) {
  return lp_norm(f, 4.0) + lp_norm(f, 4.0 / 3.0);
}

double mass(const ScalarField& f) {
  return ksum(f.values) * f.grid.h * f.grid.h;
}

}  // namespace vlab
