#include "vlab/vortex_wave.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "vlab/threading.hpp"

namespace vlab {

namespace {
constexpr double kPi = std::numbers::pi;

double linf(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}
}  // namespace

double support_distance(const VWState& s, double eps_supp) {
  if (eps_supp <= 0.0) throw std::invalid_argument("support_distance: eps_supp must be positive");
  const Grid2D& g = s.omega_e.grid;
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i) {
      if (std::abs(s.omega_e(i, j)) <= eps_supp) continue;
      const Point d = g.node(i, j) - s.z;
      best = std::min(best, norm(d));
    }
  return best;
}

double support_distance(const VWState& s) {
  const double m = linf(s.omega_e.values);
  return support_distance(s, std::max(1e-300, 1e-10 * m));
}

void add_masked_point_vortex(VectorField& u, Point z, double r_mask) {
  const Grid2D& g = u.grid;
  const double inv2pi = 1.0 / (2.0 * kPi);
  const double inv_rm2 = 1.0 / (r_mask * r_mask);
  parallel_for(static_cast<std::size_t>(g.N), [&](std::size_t jb, std::size_t je) {
    for (std::size_t j = jb; j < je; ++j)
      for (int i = 0; i < g.N; ++i) {
        const Point d = g.node(i, static_cast<int>(j)) - z;
        const double s2 = d[0] * d[0] + d[1] * d[1];
        // q = g(s)/s with g the capped magnitude profile: 1/s outside the
        // mask, C^1 polynomial cap s (2 - (s/r)^2)/r^2 inside
        const double q = (s2 >= r_mask * r_mask)
                             ? 1.0 / s2
                             : inv_rm2 * (2.0 - s2 * inv_rm2);
        const std::size_t idx = g.idx(i, static_cast<int>(j));
        u.ux[idx] += inv2pi * d[1] * q;
        u.uy[idx] -= inv2pi * d[0] * q;
      }
  });
}

void add_masked_oseen_velocity(VectorField& u, Point z, double nu_t, double r_mask) {
  if (nu_t <= 0.0) {
    add_masked_point_vortex(u, z, r_mask);
    return;
  }
  const Grid2D& g = u.grid;
  const double inv2pi = 1.0 / (2.0 * kPi);
  auto profile = [&](double s2) {
    // (1 - e^{-s^2/(4 nu t)})/s^2, finite for s -> 0
    const double a = s2 / nu_t;
    if (a < 1e-6) return (0.25 - a / 32.0) / nu_t;
    return (1.0 - std::exp(-0.25 * a)) / s2;
  };
  const double rm2 = r_mask * r_mask;
  const double edge = profile(rm2);
  parallel_for(static_cast<std::size_t>(g.N), [&](std::size_t jb, std::size_t je) {
    for (std::size_t j = jb; j < je; ++j)
      for (int i = 0; i < g.N; ++i) {
        const Point d = g.node(i, static_cast<int>(j)) - z;
        const double s2 = d[0] * d[0] + d[1] * d[1];
        // same C^1 cap shape as the point-vortex mask, matched at r_mask
        const double q = (s2 >= rm2) ? profile(s2) : edge * (2.0 - s2 / rm2);
        const std::size_t idx = g.idx(i, static_cast<int>(j));
        u.ux[idx] += inv2pi * d[1] * q;
        u.uy[idx] -= inv2pi * d[0] * q;
      }
  });
}

VWStepper::VWStepper(const Grid2D& g, VWParams p)
    : grid_(g), params_(p), core_(std::make_shared<TransportCore>(g)), plan_(poisson_plan(g)) {}

double VWStepper::advecting_speed(const VWState& s) const {
  VectorField u = plan_->velocity(s.omega_e);
  add_masked_point_vortex(u, s.z, r_mask());
  double m = 0.0;
  for (std::size_t q = 0; q < grid_.size(); ++q)
    m = std::max(m, std::hypot(u.ux[q], u.uy[q]));
  return m;
}

void VWStepper::step(VWState& s, double dt, bool frozen_field_hook) const {
  if (dt <= 0.0) throw std::invalid_argument("vw_step: dt must be positive");
  const double dist = support_distance(s, std::max(1e-300, params_.tstar_eps_rel *
                                                               linf(s.omega_e.values)));
  if (dist < 2.0 * r_mask())
    throw std::runtime_error("vw_step: vortex reached the vorticity support (numerical T*)");

  const auto& ws = core_->ws();
  VectorSampler frozen_sampler;
  if (frozen_field_hook) frozen_sampler = VectorSampler(plan_->velocity(s.omega_e));

  FlowState fs;
  fs.t = s.t;
  fs.fields.resize(1);
  ws.to_spectrum(s.omega_e, fs.fields[0]);
  fs.points = {s.z};

  ScalarField we(grid_);
  auto rhs = [&](const FlowState& st, FlowDeriv& d) {
    d.fields.resize(1);
    d.points.resize(1);
    ws.to_field(st.fields[0], we);
    VectorField ve = plan_->velocity(we);
    const VectorSampler sample_ve(ve);
    d.points[0] = sample_ve(st.points[0]);
    add_masked_point_vortex(ve, st.points[0], r_mask());
    core_->flux_divergence(ve.ux, ve.uy, we, d.fields[0]);
  };
  auto rhs_frozen = [&](const FlowState& st, FlowDeriv& d) {
    d.fields.resize(1);
    d.fields[0].assign(st.fields[0].size(), cplx(0.0, 0.0));
    d.points.resize(1);
    d.points[0] = frozen_sampler(st.points[0]);
  };

  if (frozen_field_hook)
    core_->if_rk4_step(fs, dt, {0.0}, rhs_frozen);
  else
    core_->if_rk4_step(fs, dt, {0.0}, rhs);

  s.t = fs.t;
  s.z = fs.points[0];
  if (!frozen_field_hook) ws.to_field(fs.fields[0], s.omega_e);
  if (!all_finite(s.omega_e.values) || !std::isfinite(s.z[0]) || !std::isfinite(s.z[1]))
    throw std::runtime_error("vw_step: non-finite state after step");
}

std::vector<VWState> VWStepper::run(const VWState& s0,
                                    const std::vector<double>& snap_times) const {
  std::vector<VWState> snaps;
  VWState s = s0;
  const double u0 = advecting_speed(s);
  const double dt_nom = (u0 > 0.0) ? params_.cfl * grid_.h / u0 : 0.05;
  for (double target : snap_times) {
    if (target < s.t - 1e-12)
      throw std::invalid_argument("vw_run: snapshot times must be non-decreasing");
    if (target > s.t + 1e-14) {
      const int steps = std::max(1, static_cast<int>(std::ceil((target - s.t) / dt_nom)));
      const double dt = (target - s.t) / steps;
      for (int k = 0; k < steps; ++k) step(s, dt);
      s.t = target;
    }
    snaps.push_back(s);
  }
  return snaps;
}

}  // namespace vlab
