#pragma once

#include <memory>
#include <vector>

#include "vlab/biot_savart.hpp"
#include "vlab/interpolate.hpp"
#include "vlab/transport.hpp"

namespace vlab {

// Inviscid vortex-wave state: point vortex z plus the regular vorticity
// omega_e transported by v^E + K(. - z).
struct VWState {
  double t = 0.0;
  Point z{0.0, 0.0};
  ScalarField omega_e;
};

struct VWParams {
  double cfl = 0.5;
  double r_mask_cells = 4.0;    // mask radius around z in units of h
  double eps_supp_rel = 1e-10;  // support threshold relative to max |omega_e|
  // Runtime T* detection threshold.  Dealiased transport leaves global
  // spectral ripples of order 1e-5..1e-3 relative, so the 1e-10 support
  // threshold would flag the whole box; T* instead watches the O(1)
  // vorticity region.
  double tstar_eps_rel = 5e-3;
};

// min over cells with |omega_e| > eps_supp of |x_cell - z|; +inf if empty.
double support_distance(const VWState& s, double eps_supp);
double support_distance(const VWState& s);  // threshold 1e-10 * max|omega_e|

// Point-vortex field K(x - z), exact outside the mask disc and smoothly
// capped inside (where the transported field vanishes identically).
void add_masked_point_vortex(VectorField& u, Point z, double r_mask);

// Scaled Oseen velocity (1/sqrt(nu t)) v^G((x - z)/sqrt(nu t)) with the same
// mask; its nu t -> 0 limit is the masked K(x - z).
void add_masked_oseen_velocity(VectorField& u, Point z, double nu_t, double r_mask);

class VWStepper {
 public:
  explicit VWStepper(const Grid2D& g, VWParams p = {});

  const Grid2D& grid() const { return grid_; }
  const VWParams& params() const { return params_; }
  double r_mask() const { return params_.r_mask_cells * grid_.h; }

  // One joint RK4 step of (omega_e, z).  frozen_field_hook advances only the
  // point ODE in the initial velocity field (integrator test mode).
  void step(VWState& s, double dt, bool frozen_field_hook = false) const;

  // Max advecting speed over the whole grid including the masked vortex
  // ring; RK4 stability of the flux needs the global bound, not just the
  // speed over supp omega_e.
  double advecting_speed(const VWState& s) const;

  std::vector<VWState> run(const VWState& s0, const std::vector<double>& snap_times) const;

  std::shared_ptr<TransportCore> core() const { return core_; }

 private:
  Grid2D grid_;
  VWParams params_;
  std::shared_ptr<TransportCore> core_;
  std::shared_ptr<const FreeSpacePoissonPlan> plan_;
};

}  // namespace vlab
