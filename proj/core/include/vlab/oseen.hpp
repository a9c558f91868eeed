#pragma once

#include <complex>

#include "vlab/biot_savart.hpp"
#include "vlab/fft.hpp"
#include "vlab/grid.hpp"

namespace vlab {

// Lamb-Oseen profile G(xi) = (1/4pi) e^{-|xi|^2/4} and its velocity
// v^G(xi) = (1/2pi) xi^perp/|xi|^2 (1 - e^{-|xi|^2/4}), continuous at 0.
double oseen_gaussian(Point xi);
Point oseen_velocity(Point xi);
Point oseen_gaussian_gradient(Point xi);  // -(xi/2) G
ScalarField oseen_gaussian_field(const Grid2D& xi_grid);

// Operators of the self-similar frame on a xi-grid.  Fields must decay below
// threshold before the box boundary (checked); products are dealiased.
class XiOps {
 public:
  explicit XiOps(const Grid2D& xi_grid);

  const Grid2D& grid() const { return grid_; }
  const SpectralWorkspace& workspace() const { return ws_; }

  // L w = Lap w + (xi/2).grad w + w   (Fokker-Planck generator, L G = 0)
  ScalarField fokker_planck(const ScalarField& w) const;
  // Lambda w = v^G.grad w + (K*w).grad G   (linearized advection, skew in L^2_p)
  ScalarField linearized_advection(const ScalarField& w) const;

 private:
  void check_decay(const ScalarField& w, const char* what) const;

  Grid2D grid_;
  SpectralWorkspace ws_;
  std::shared_ptr<const FreeSpacePoissonPlan> plan_;
  std::vector<double> vgx_, vgy_;  // v^G at nodes
  std::vector<double> gx_, gy_;    // grad G at nodes
};

// Partial sum of the reflection series for 1/|z1+z2|^2 - 1/|z2|^2 using the
// Chebyshev recurrence for sin((n+1)psi)/sin(psi); requires |z1| < |z2|.
double series_inverse_square(std::complex<double> z1, std::complex<double> z2, int n_terms);

}  // namespace vlab
