#pragma once

#include <memory>
#include <vector>

#include "vlab/vortex_wave.hpp"

namespace vlab {

// Approximate viscous vortex-wave state: the inviscid base (z, omega_e),
// the corrector w1a driven by Delta omega_e, and the shifted vortex ztilde
// moved by the velocity of omega_e + nu w1a.
struct ApproxVWState {
  VWState base;
  Point ztilde{0.0, 0.0};
  ScalarField w1a;
  double nu = 0.0;
  // Support-monitor threshold for w1a, relative to max |w1a|.  Calibrated at
  // init from the dealiasing ripple of Delta omega_e (the corrector source),
  // which sets the noise floor of the corrector away from its true support.
  double w1a_monitor_rel = 0.02;
};

class AVWStepper {
 public:
  explicit AVWStepper(const Grid2D& g, VWParams p = {});

  ApproxVWState init(const ScalarField& omega0_e, Point z0, double nu) const;

  // Joint RK4 step of (omega_e, w1a, z, ztilde); the base (omega_e, z)
  // tableau is identical to VWStepper's, and ztilde uses the same tableau
  // and interpolation as z so their difference carries no scheme bias.
  void step(ApproxVWState& s, double dt) const;

  std::vector<ApproxVWState> run(const ApproxVWState& s0,
                                 const std::vector<double>& snap_times) const;

  // omega_tilde = omega_e + nu w1a and its velocity (aliases omega_e at nu = 0)
  std::pair<ScalarField, VectorField> tilde_fields(const ApproxVWState& s) const;

  const Grid2D& grid() const { return grid_; }
  double r_mask() const { return params_.r_mask_cells * grid_.h; }

  // cells of the accumulated support union (updated by run())
  double support_measure(const ScalarField& f, double eps_abs) const;

 private:
  Grid2D grid_;
  VWParams params_;
  std::shared_ptr<TransportCore> core_;
  std::shared_ptr<const FreeSpacePoissonPlan> plan_;
};

}  // namespace vlab
