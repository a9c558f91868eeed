#include "vlab/navier_stokes.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "vlab/threading.hpp"

namespace vlab {

namespace {
constexpr double kPi = std::numbers::pi;
}

ScalarField heat_kernel_field(const Grid2D& g, Point center, double four_nu_t) {
  ScalarField f(g);
  const double amp = 1.0 / (kPi * four_nu_t);
  const double inv = 1.0 / four_nu_t;
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i) {
      const Point d = g.node(i, j) - center;
      f(i, j) = amp * std::exp(-(d[0] * d[0] + d[1] * d[1]) * inv);
    }
  return f;
}

ScalarField bump_field(const Grid2D& g, Point center, double amplitude, double rho) {
  ScalarField f(g);
  const double inv_rho2 = 1.0 / (rho * rho);
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i) {
      const Point d = g.node(i, j) - center;
      const double s = (d[0] * d[0] + d[1] * d[1]) * inv_rho2;
      f(i, j) = (s < 1.0) ? amplitude * std::exp(-1.0 / (1.0 - s)) : 0.0;
    }
  return f;
}

NSStepper::NSStepper(const Grid2D& g)
    : grid_(g), core_(std::make_shared<TransportCore>(g)), plan_(poisson_plan(g)) {}

NSState NSStepper::init(const ScalarField& omega0_e, Point z0, double nu, double t0,
                        double rho0) const {
  require_finite(omega0_e, "ns_init");
  if (omega0_e.grid != grid_) throw std::invalid_argument("ns_init: grid mismatch");
  if (nu <= 0.0) throw std::invalid_argument("ns_init: nu must be positive");
  if (t0 <= 0.0) throw std::invalid_argument("ns_init: t0 must be positive");
  const double core = std::sqrt(4.0 * nu * t0);
  if (core < 4.0 * grid_.h * (1.0 - 1e-12))
    throw std::invalid_argument("ns_init: under-resolved core, sqrt(4 nu t0) < 4h");
  for (int j = 0; j < grid_.N; ++j)
    for (int i = 0; i < grid_.N; ++i) {
      const Point d = grid_.node(i, j) - z0;
      if (d[0] * d[0] + d[1] * d[1] < rho0 * rho0 &&
          std::abs(omega0_e(i, j)) >= 1e-12)
        throw std::invalid_argument("ns_init: omega0_e does not vanish near z0");
    }

  NSState s;
  s.t = t0;
  s.nu = nu;
  s.omega_e = omega0_e;
  s.omega_b = heat_kernel_field(grid_, z0, 4.0 * nu * t0);
  const double mb = mass(s.omega_b);
  if (std::abs(mb - 1.0) > 1e-10)
    throw std::runtime_error("ns_init: heat-kernel mass deviates from 1 beyond 1e-10");
  return s;
}

void NSStepper::step(NSState& s, double dt, const NSStepOptions& opt) const {
  if (dt <= 0.0) throw std::invalid_argument("ns_step: dt must be positive");
  const auto& ws = core_->ws();

  FlowState fs;
  fs.t = s.t;
  fs.fields.resize(2);
  ws.from_fields_packed(s.omega_e, s.omega_b, fs.fields[0], fs.fields[1]);

  double max_u0 = -1.0;  // recorded on the first stage for the CFL check
  ScalarField we(grid_), wb(grid_), wtot(grid_);
  auto rhs = [&](const FlowState& st, FlowDeriv& d) {
    d.fields.resize(2);
    d.points.clear();
    core_->ws().to_fields_packed(st.fields[0], st.fields[1], we, wb);
    VectorField u(grid_);
    if (!opt.zero_velocity_hook) {
      parallel_for(grid_.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t q = b; q < e; ++q) wtot.values[q] = we.values[q] + wb.values[q];
      });
      u = plan_->velocity(wtot);
    }
    if (max_u0 < 0.0) {
      double m = 0.0;
      for (std::size_t q = 0; q < grid_.size(); ++q)
        m = std::max(m, std::hypot(u.ux[q], u.uy[q]));
      max_u0 = m;
    }
    core_->flux_divergence(u.ux, u.uy, we, d.fields[0]);
    core_->flux_divergence(u.ux, u.uy, wb, d.fields[1]);
  };

  core_->if_rk4_step(fs, dt, {s.nu, s.nu}, rhs);

  if (max_u0 > 0.0 && dt > opt.cfl * grid_.h / max_u0)
    throw std::runtime_error("ns_step: CFL violation, dt too large for current velocity");

  NSState out;
  out.t = fs.t;
  out.nu = s.nu;
  out.omega_e = ScalarField(grid_);
  out.omega_b = ScalarField(grid_);
  ws.to_fields_packed(fs.fields[0], fs.fields[1], out.omega_e, out.omega_b);
  if (!all_finite(out.omega_e.values) || !all_finite(out.omega_b.values))
    throw std::runtime_error("ns_step: non-finite values after step");
  s = std::move(out);
}

std::vector<NSState> NSStepper::run(const NSState& s0, const std::vector<double>& snap_times,
                                    const NSStepOptions& opt) const {
  std::vector<NSState> snaps;
  NSState s = s0;

  // nominal dt from the initial CFL
  ScalarField tot(grid_);
  for (std::size_t q = 0; q < grid_.size(); ++q)
    tot.values[q] = s.omega_e.values[q] + s.omega_b.values[q];
  double max_u = 0.0;
  if (!opt.zero_velocity_hook) {
    VectorField u = plan_->velocity(tot);
    for (std::size_t q = 0; q < grid_.size(); ++q)
      max_u = std::max(max_u, std::hypot(u.ux[q], u.uy[q]));
  }
  const double dt_nom = (max_u > 0.0) ? opt.cfl * grid_.h / max_u : 0.05;

  double e_prev = enstrophy(s);
  for (double target : snap_times) {
    if (target < s.t - 1e-12)
      throw std::invalid_argument("ns_run: snapshot times must be non-decreasing from t0");
    if (target > s.t + 1e-14) {
      const int steps = std::max(1, static_cast<int>(std::ceil((target - s.t) / dt_nom)));
      const double dt = (target - s.t) / steps;
      for (int k = 0; k < steps; ++k) {
        step(s, dt, opt);
        const double e_now = enstrophy(s);
        if (e_now > e_prev + 1e-10)
          throw std::runtime_error("ns_run: enstrophy increased beyond tolerance at t = " +
                                   std::to_string(s.t));
        e_prev = e_now;
      }
      s.t = target;  // absorb roundoff from repeated dt additions
    }
    snaps.push_back(s);
  }
  return snaps;
}

double enstrophy(const NSState& s) {
  ScalarField tot(s.omega_e.grid);
  for (std::size_t q = 0; q < tot.values.size(); ++q)
    tot.values[q] = s.omega_e.values[q] + s.omega_b.values[q];
  return lp_norm(tot, 2.0);
}

}  // namespace vlab
