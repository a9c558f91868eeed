#pragma once

#include <functional>
#include <map>
#include <vector>

#include "vlab/fft.hpp"
#include "vlab/grid.hpp"

namespace vlab {

// Joint state for spectral transport fields plus point ODEs carried in the
// same RK4 tableau (so point-vortex paths see no scheme bias).
struct FlowState {
  double t = 0.0;
  std::vector<std::vector<cplx>> fields;  // spectra, one per transported field
  std::vector<Point> points;
};

struct FlowDeriv {
  std::vector<std::vector<cplx>> fields;
  std::vector<Point> points;
};

using FlowRhs = std::function<void(const FlowState&, FlowDeriv&)>;

// Shared spectral machinery for the advection systems.
class TransportCore {
 public:
  explicit TransportCore(const Grid2D& g);

  const Grid2D& grid() const { return grid_; }
  const SpectralWorkspace& ws() const { return ws_; }

  // Conservative advection term -div(u w) in spectral space, dealiased.
  // Differentiating after the product transform pins the k = 0 mode of the
  // result to exactly zero, so transported mass is conserved bitwise.
  void flux_divergence(const std::vector<double>& ux, const std::vector<double>& uy,
                       const ScalarField& w, std::vector<cplx>& out) const;

  // Advances fields by integrating-factor RK4 (exact diffusion factors
  // e^{-nu |k|^2 dt}) and points by the matching classical RK4.
  void if_rk4_step(FlowState& state, double dt, const std::vector<double>& nu_fields,
                   const FlowRhs& rhs) const;

 private:
  const std::vector<double>& diffusion_table(double nu, double dt_half) const;

  Grid2D grid_;
  SpectralWorkspace ws_;
  mutable ScalarField fx_, fy_;
  mutable std::vector<cplx> sx_, sy_;
  mutable std::map<std::pair<double, double>, std::vector<double>> exp_cache_;
};

}  // namespace vlab
