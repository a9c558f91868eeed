#include "vlab/oseen.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "vlab/threading.hpp"

namespace vlab {

namespace {
constexpr double kPi = std::numbers::pi;

// (1 - e^{-r2/4}) / r2, finite limit 1/4 at r2 = 0
double one_minus_exp_over(double r2) {
  if (r2 < 1e-6) {
    const double s = 0.25 * r2;
    return 0.25 * (1.0 - 0.5 * s + s * s / 6.0 - s * s * s / 24.0);
  }
  return (1.0 - std::exp(-0.25 * r2)) / r2;
}
}  // namespace

double oseen_gaussian(Point xi) {
  return std::exp(-0.25 * (xi[0] * xi[0] + xi[1] * xi[1])) / (4.0 * kPi);
}

Point oseen_velocity(Point xi) {
  const double r2 = xi[0] * xi[0] + xi[1] * xi[1];
  const double f = one_minus_exp_over(r2) / (2.0 * kPi);
  return {xi[1] * f, -xi[0] * f};
}

Point oseen_gaussian_gradient(Point xi) {
  const double g = oseen_gaussian(xi);
  return {-0.5 * xi[0] * g, -0.5 * xi[1] * g};
}

ScalarField oseen_gaussian_field(const Grid2D& g) {
  ScalarField f(g);
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i) f(i, j) = oseen_gaussian(g.node(i, j));
  return f;
}

XiOps::XiOps(const Grid2D& xi_grid)
    : grid_(xi_grid), ws_(xi_grid), plan_(poisson_plan(xi_grid)) {
  const std::size_t n = grid_.size();
  vgx_.resize(n);
  vgy_.resize(n);
  gx_.resize(n);
  gy_.resize(n);
  for (int j = 0; j < grid_.N; ++j)
    for (int i = 0; i < grid_.N; ++i) {
      const Point xi = grid_.node(i, j);
      const Point vg = oseen_velocity(xi);
      const Point dg = oseen_gaussian_gradient(xi);
      const std::size_t q = grid_.idx(i, j);
      vgx_[q] = vg[0];
      vgy_[q] = vg[1];
      gx_[q] = dg[0];
      gy_[q] = dg[1];
    }
}

void XiOps::check_decay(const ScalarField& w, const char* what) const {
  require_finite(w, what);
  double linf = 0.0;
  for (double v : w.values) linf = std::max(linf, std::abs(v));
  const double thr = 1e-12 * std::max(1.0, linf);
  const int N = grid_.N;
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      if (i > 1 && i < N - 2 && j > 1 && j < N - 2) continue;
      if (std::abs(w.values[grid_.idx(i, j)]) > thr)
        throw std::invalid_argument(std::string(what) +
                                    ": field does not decay before the xi-box boundary");
    }
}

ScalarField XiOps::fokker_planck(const ScalarField& w) const {
  check_decay(w, "fokker_planck");
  std::vector<cplx> spec, lap, dx, dy;
  ws_.to_spectrum(w, spec);
  ws_.laplacian_spectrum(spec, lap);
  ws_.gradient_spectra(spec, dx, dy);
  ScalarField lap_f(grid_), gx(grid_), gy(grid_);
  ws_.to_field(lap, lap_f);
  ws_.to_fields_packed(dx, dy, gx, gy);

  ScalarField out(grid_);
  for (int j = 0; j < grid_.N; ++j)
    for (int i = 0; i < grid_.N; ++i) {
      const Point xi = grid_.node(i, j);
      const std::size_t q = grid_.idx(i, j);
      out.values[q] = lap_f.values[q] + 0.5 * (xi[0] * gx.values[q] + xi[1] * gy.values[q]) +
                      w.values[q];
    }
  std::vector<cplx> s;
  ws_.to_spectrum(out, s);
  ws_.dealias(s);
  ws_.to_field(s, out);
  return out;
}

ScalarField XiOps::linearized_advection(const ScalarField& w) const {
  check_decay(w, "linearized_advection");
  std::vector<cplx> spec, dx, dy;
  ws_.to_spectrum(w, spec);
  ws_.gradient_spectra(spec, dx, dy);
  ScalarField gx(grid_), gy(grid_);
  ws_.to_fields_packed(dx, dy, gx, gy);
  // check_decay above covers the boundary; Gaussian-decaying xi-fields are
  // not compactly supported, so the physical-module L/4 support check does
  // not apply here
  VectorField v = plan_->velocity(w);

  ScalarField out(grid_);
  parallel_for(grid_.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t q = b; q < e; ++q)
      out.values[q] = vgx_[q] * gx.values[q] + vgy_[q] * gy.values[q] + v.ux[q] * gx_[q] +
                      v.uy[q] * gy_[q];
  });
  std::vector<cplx> s;
  ws_.to_spectrum(out, s);
  ws_.dealias(s);
  ws_.to_field(s, out);
  return out;
}

double series_inverse_square(std::complex<double> z1, std::complex<double> z2, int n_terms) {
  const double r1 = std::abs(z1), r2 = std::abs(z2);
  if (!(r1 < r2)) throw std::invalid_argument("series_inverse_square: requires |z1| < |z2|");
  if (r1 == 0.0) return 0.0;
  // U_n(cos psi) = sin((n+1) psi)/sin(psi) stays finite for every psi
  const double cos_psi = (z1.real() * z2.real() + z1.imag() * z2.imag()) / (r1 * r2);
  const double rho = r1 / r2;
  double u_prev = 1.0;               // U_0
  double u_cur = 2.0 * cos_psi;      // U_1
  double rho_n = rho;
  double acc = -rho_n * u_cur;       // n = 1 term: (-1)^1 rho U_1
  for (int n = 2; n <= n_terms; ++n) {
    const double u_next = 2.0 * cos_psi * u_cur - u_prev;
    u_prev = u_cur;
    u_cur = u_next;
    rho_n *= rho;
    const double term = rho_n * u_cur;
    acc += (n % 2 == 0) ? term : -term;
  }
  return acc / (r2 * r2);
}

}  // namespace vlab
