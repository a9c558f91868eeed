#pragma once

#include <string>
#include <utility>
#include <vector>

#include "vlab/grid.hpp"
#include "vlab/oseen_elliptic.hpp"

namespace vlab {

// Vorticity in the self-similar frame xi = (x - ztilde)/sqrt(nu t),
// w2(xi) = nu t omega_b(ztilde + xi sqrt(nu t)).
struct SelfSimilarField {
  Grid2D xi_grid;
  std::vector<double> values;
  double nu = 0.0;
  double t = 0.0;
  Point ztilde{0.0, 0.0};
};

SelfSimilarField rescale_to_core(const ScalarField& omega_b, Point ztilde, double nu, double t,
                                 const Grid2D& xi_grid);

// w2bar = (w2 - G - nu t w2a)/(nu t)
ScalarField core_remainder(const SelfSimilarField& w2, const ScalarField& w2a_on_xi);

// w1bar = (omega_e_nu - omega_tilde)/nu^{3/2}
ScalarField regular_remainder(const ScalarField& omega_e_nu, const ScalarField& omega_tilde,
                              double nu);

// Fourth-order centered gradient (periodic wrap).  For remainder fields
// sampled off simulation data this keeps differentiation noise local, where
// a spectral gradient would smear a global Gibbs floor into the
// Gaussian-weighted tail.
VectorField fd_gradient(const ScalarField& f);

// || w ||_{L^2_p} with p(xi) = e^{|xi|^2/4}, truncated at |xi| = r_cut.
// Pre: the weighted integrand must have decayed by the cut; the ring just
// past r_cut may contribute at most tail_tol of the inside integral,
// otherwise the truncated norm would be truncation-dominated and the call
// fails loudly.
double gaussian_weighted_l2_norm(const ScalarField& w_xi, double r_cut,
                                 double tail_tol = 1e-2);
double gaussian_weighted_inner(const ScalarField& a, const ScalarField& b, double r_cut);

// L1 distance between omega_b and the Oseen Gaussian centered at `center`.
double l1_distance_to_oseen(const ScalarField& omega_b, Point center, double nu, double t);

// G(t_k) = |w2bar(t_k)|^2_{L2p} + int_{t_0}^{t_k} s^{-1} (|w2bar|^2 + |grad w2bar|^2) ds
// by trapezoidal accumulation over the sample times.
std::vector<double> remainder_energy_monitor(const std::vector<double>& times,
                                             const std::vector<double>& w2bar_l2p,
                                             const std::vector<double>& grad_w2bar_l2p);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// least squares of log(err) against log(nu); needs >= 3 positive samples
RateFit fit_loglog_rate(const std::vector<std::pair<double, double>>& nu_err);

struct MetricSeries {
  double nu = 0.0;
  bool failed = false;
  std::string error;
  std::vector<double> t;
  std::vector<double> reg_err;        // |omega_e_nu - omega_e|_{L4 cap L4/3}
  std::vector<double> l1_oseen_rate;  // t^{-1} L1-to-Oseen at z(t)
  std::vector<double> l1_remainder_rate;  // t^{-1} L1 to the corrected core profile
  std::vector<double> w2bar_l2p;
  std::vector<double> grad_w2bar_l2p;
  std::vector<double> gee;
  std::vector<double> shift_rate;  // |ztilde - z|/(nu t)
  std::vector<double> w1bar_norm;  // |w1bar|_{L4 cap L4/3}
};

struct ConvergenceReport {
  std::vector<MetricSeries> runs;
  double t_common = 0.0;  // metrics compared on [t_common, T]

  // per-metric fits over sup_t values
  std::vector<std::pair<double, double>> reg_samples;  // (nu, sup_t reg_err)
  std::vector<std::pair<double, double>> l1_samples;
  std::vector<std::pair<double, double>> l1_remainder_samples;
  RateFit reg_fit, l1_fit, l1_remainder_fit;
  double shift_ratio_spread = 0.0;  // max/min over nu of sup_t |ztilde-z|/(nu t)
  double w2bar_spread = 0.0;
  double gee_spread = 0.0;
  bool pass_reg_rate = false;
  bool pass_l1_rate = false;
  bool pass_shift = false;
  bool pass_remainder = false;

  bool all_pass() const {
    return pass_reg_rate && pass_l1_rate && pass_shift && pass_remainder;
  }
};

}  // namespace vlab
