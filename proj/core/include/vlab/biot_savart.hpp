#pragma once

#include <memory>
#include <vector>

#include "vlab/fft.hpp"
#include "vlab/grid.hpp"

namespace vlab {

// K(x) = (1/2pi) x^perp / |x|^2 with a^perp = (a2, -a1).  Rejects x = 0.
Point biot_savart_kernel(Point x);

// Free-space inversion of grad^perp Laplace^{-1} on a domain-doubled grid.
// The doubled-domain kernel is synthesized once from the analytic Fourier
// transform of the truncated Green's function (Bessel form), so the
// convolution is exact for band-limited vorticity; plain point sampling of
// the singular kernel would cap accuracy at O(h^2).
class FreeSpacePoissonPlan {
 public:
  explicit FreeSpacePoissonPlan(const Grid2D& g);

  const Grid2D& grid() const { return grid_; }
  long solve_count() const { return solves_; }

  VectorField velocity(const ScalarField& omega) const;

  // Derivatives of the represented velocity, evaluated spectrally on the
  // doubled domain where it is a genuine Fourier series.  curl follows the
  // omega = d2 u1 - d1 u2 orientation used throughout.
  ScalarField velocity_divergence(const ScalarField& omega) const;
  ScalarField velocity_curl(const ScalarField& omega) const;

 private:
  Grid2D grid_;
  std::shared_ptr<Fft2D> fft2n_;
  std::vector<cplx> kernel_hat_;  // DFT_{2N}[k1 + i k2]
  mutable std::vector<cplx> buf_a_;
  mutable std::vector<cplx> buf_b_;
  mutable long solves_ = 0;
};

// Shared plan cache keyed by grid, so repeated solves on one grid reuse the
// precomputed kernel.
std::shared_ptr<const FreeSpacePoissonPlan> poisson_plan(const Grid2D& g);

// u = K * omega.  Preconditions: omega finite and supported at distance
// >= L/4 from the box boundary (checked against a 1e-12 threshold).
VectorField free_space_velocity(const ScalarField& omega, const FreeSpacePoissonPlan& plan);
VectorField free_space_velocity(const ScalarField& omega);

}  // namespace vlab
