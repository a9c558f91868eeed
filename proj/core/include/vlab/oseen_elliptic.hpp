#pragma once

#include <vector>

#include "vlab/grid.hpp"
#include "vlab/interpolate.hpp"
#include "vlab/oseen.hpp"

namespace vlab {

// Radial coefficients of a fixed angular mode n: a(r) cos(n theta) + b(r) sin(n theta).
struct OseenModeProfile {
  int n = 0;
  std::vector<double> r;
  std::vector<double> a;
  std::vector<double> b;
};

// cos/sin n-theta moments of a vorticity field against 1/|ztilde - y|^n,
// n in {2, 3}.
struct MomentCoefficients {
  double alpha2 = 0.0;  // integral cos(2 arg(ztilde-y)) / |ztilde-y|^2 w(y) dy
  double beta2 = 0.0;   // same with sin
  double alpha3 = 0.0;
  double beta3 = 0.0;
};

MomentCoefficients compute_moments(const ScalarField& omega_tilde, Point ztilde, double d_min);

// Solves Lambda w + nu (1 - L) w = z per angular mode on a radial grid,
// with the Biot-Savart coupling expressed through the mode's stream
// function as a joint two-point boundary value problem.
class RadialOseenSolver {
 public:
  explicit RadialOseenSolver(double r_max = 16.0, int nodes = 16384);

  struct ModeSolution {
    int n = 0;
    std::vector<double> r;
    std::vector<double> a, b;  // vorticity coefficients
  };

  double r_max() const { return r_max_; }
  const std::vector<double>& nodes() const { return r_; }

  // rhs_a, rhs_b sampled on nodes(); n in {2, 3}
  ModeSolution solve_mode(int n, const std::vector<double>& rhs_a,
                          const std::vector<double>& rhs_b, double nu) const;

 private:
  double r_max_;
  int m_;
  std::vector<double> r_;
  std::vector<double> gcoef_;  // v^G_theta(r)/r
  std::vector<double> gauss_;  // G(r)
};

// Evaluate a mode profile at radius r by local cubic interpolation
// (zero beyond the last node, ~r^n regularity at the origin).
double eval_profile(const std::vector<double>& nodes, const std::vector<double>& coef, double rq,
                    int n_mode);

ScalarField assemble_modes(const Grid2D& xi_grid, const std::vector<OseenModeProfile>& modes);

OseenModeProfile resample_profile(const OseenModeProfile& p, const std::vector<double>& nodes);

// Contract-level elliptic solve: rhs restricted to modes {2,3}; returns the
// assembled solution field on the xi-grid.
ScalarField solve_elliptic(double nu, const std::vector<OseenModeProfile>& rhs,
                           const Grid2D& xi_grid, const RadialOseenSolver& solver);

// R1(xi) = (1/sqrt(nu t)) (v(ztilde + xi sqrt(nu t)) - v(ztilde)) . grad G
ScalarField build_reaction_term(const VectorSampler& v_tilde, Point ztilde, double nu_t,
                                const Grid2D& xi_grid, const Grid2D& physical_grid);

// Moment-collapsed leading order A0 of the reaction term.  Convention:
// psi = arg(ztilde - y) - arg(xi), validated against R1 (the expansion
// changes sign under the opposite orientation and the A0 comparison fails).
ScalarField build_moment_reaction(const MomentCoefficients& m, double nu_t,
                                  const Grid2D& xi_grid);
std::vector<OseenModeProfile> moment_reaction_profiles(const MomentCoefficients& m, double nu_t,
                                                       const std::vector<double>& nodes);

// Core corrector w2a: solves Lambda w + nu(1-L) w = -A0 and reports the
// fitted Gaussian decay rate of the mode profiles.
struct CoreCorrector {
  std::vector<RadialOseenSolver::ModeSolution> modes;
  double decay_rate = 0.0;  // fitted gamma in C e^{-gamma r^2/4}
};

CoreCorrector build_core_corrector(const MomentCoefficients& m, double nu, double t,
                                   const RadialOseenSolver& solver);
ScalarField corrector_field(const CoreCorrector& c, const Grid2D& xi_grid);
// Same corrector in physical coordinates x = ztilde + xi sqrt(nu t); this is
// the w2a term of omega_B = (1/nu t) G(xi) + w2a(xi) + ...
ScalarField corrector_on_physical(const CoreCorrector& c, const Grid2D& physical, Point ztilde,
                                  double nu_t);

// least-squares fit of log(mag) vs -r^2/4 over [r_lo, r_hi]
double fit_gaussian_decay(const std::vector<double>& r, const std::vector<double>& mag,
                          double r_lo, double r_hi);

}  // namespace vlab
