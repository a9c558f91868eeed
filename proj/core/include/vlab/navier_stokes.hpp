#pragma once

#include <memory>
#include <vector>

#include "vlab/biot_savart.hpp"
#include "vlab/transport.hpp"

namespace vlab {

// Two-component viscous vorticity state: regular part omega_e plus the
// irregular part omega_b carrying the unit point-vortex mass, both advected
// by the shared velocity K * (omega_e + omega_b).
struct NSState {
  double t = 0.0;
  double nu = 0.0;
  ScalarField omega_e;
  ScalarField omega_b;
};

struct NSStepOptions {
  double cfl = 0.5;
  bool zero_velocity_hook = false;  // test hook: forces u = 0 (pure heat flow)
};

class NSStepper {
 public:
  explicit NSStepper(const Grid2D& g);

  // Realizes the Dirac datum as the exact heat kernel at t0 > 0.
  // Preconditions: sqrt(4 nu t0) >= 4h and |omega0_e| < 1e-12 within rho0 of z0.
  NSState init(const ScalarField& omega0_e, Point z0, double nu, double t0,
               double rho0 = 1.0) const;

  void step(NSState& s, double dt, const NSStepOptions& opt = {}) const;

  // Snapshots at the requested times (strictly increasing, first >= s.t);
  // fixed nominal dt from the initial CFL, subdivided to land on each time.
  std::vector<NSState> run(const NSState& s0, const std::vector<double>& snap_times,
                           const NSStepOptions& opt = {}) const;

  long poisson_solves() const { return plan_->solve_count(); }
  const Grid2D& grid() const { return grid_; }

 private:
  Grid2D grid_;
  std::shared_ptr<TransportCore> core_;
  std::shared_ptr<const FreeSpacePoissonPlan> plan_;
};

ScalarField heat_kernel_field(const Grid2D& g, Point center, double four_nu_t);

// C-infinity bump A exp(-1/(1 - |x-c|^2/rho^2)) on |x-c| < rho.
ScalarField bump_field(const Grid2D& g, Point center, double amplitude, double rho);

double enstrophy(const NSState& s);  // L2 norm of omega_e + omega_b

}  // namespace vlab
