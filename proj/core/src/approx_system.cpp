#include "vlab/approx_system.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vlab/interpolate.hpp"
#include "vlab/threading.hpp"

namespace vlab {

namespace {
double linf(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}
}  // namespace

AVWStepper::AVWStepper(const Grid2D& g, VWParams p)
    : grid_(g), params_(p), core_(std::make_shared<TransportCore>(g)), plan_(poisson_plan(g)) {}

ApproxVWState AVWStepper::init(const ScalarField& omega0_e, Point z0, double nu) const {
  require_finite(omega0_e, "avw_init");
  if (omega0_e.grid != grid_) throw std::invalid_argument("avw_init: grid mismatch");
  if (nu < 0.0) throw std::invalid_argument("avw_init: nu must be non-negative");
  ApproxVWState s;
  s.base.t = 0.0;
  s.base.z = z0;
  s.base.omega_e = omega0_e;
  s.ztilde = z0;
  s.w1a = ScalarField(grid_);
  s.nu = nu;

  // calibrate the corrector support monitor against the source ripple near z0
  const auto& ws = core_->ws();
  std::vector<cplx> spec, lap;
  ws.to_spectrum(omega0_e, spec);
  ws.dealias(spec);
  ws.laplacian_spectrum(spec, lap);
  ScalarField src(grid_);
  ws.to_field(lap, src);
  double src_max = 0.0, src_near = 0.0;
  for (int j = 0; j < grid_.N; ++j)
    for (int i = 0; i < grid_.N; ++i) {
      const double v = std::abs(src(i, j));
      src_max = std::max(src_max, v);
      const Point d = grid_.node(i, j) - z0;
      if (norm(d) <= 4.0 * r_mask()) src_near = std::max(src_near, v);
    }
  if (src_max > 0.0)
    s.w1a_monitor_rel = std::clamp(4.0 * src_near / src_max, params_.tstar_eps_rel, 0.25);
  return s;
}

void AVWStepper::step(ApproxVWState& s, double dt) const {
  if (dt <= 0.0) throw std::invalid_argument("avw_step: dt must be positive");
  const double eps_e = std::max(1e-300, params_.tstar_eps_rel * linf(s.base.omega_e.values));
  if (support_distance(s.base, eps_e) < 2.0 * r_mask())
    throw std::runtime_error("avw_step: vortex reached the vorticity support (numerical T*)");
  // The corrector is sourced by Delta omega_e, whose dealiasing ripple floor
  // is k^2-amplified; its support monitor needs a correspondingly coarser
  // threshold.  The sharp T* detection is the omega_e check above (the
  // corrector support stays inside the union of the omega_e supports).
  const double w1a_max = linf(s.w1a.values);
  if (w1a_max > 0.0) {
    VWState probe{s.base.t, s.base.z, s.w1a};
    if (support_distance(probe, s.w1a_monitor_rel * w1a_max) < 2.0 * r_mask())
      throw std::runtime_error("avw_step: corrector support reached the vortex (numerical T*)");
  }

  const auto& ws = core_->ws();
  const double nu = s.nu;

  FlowState fs;
  fs.t = s.base.t;
  fs.fields.resize(2);
  ws.from_fields_packed(s.base.omega_e, s.w1a, fs.fields[0], fs.fields[1]);
  fs.points = {s.base.z, s.ztilde};

  ScalarField we(grid_), w1(grid_), gex(grid_), gey(grid_);
  std::vector<cplx> lap_spec, gx_spec, gy_spec, src_spec;
  auto rhs = [&](const FlowState& st, FlowDeriv& d) {
    d.fields.resize(2);
    d.points.resize(2);
    ws.to_fields_packed(st.fields[0], st.fields[1], we, w1);

    VectorField ve = plan_->velocity(we);
    VectorField v1a = plan_->velocity(w1);
    const VectorSampler sample_ve(ve);
    d.points[0] = sample_ve(st.points[0]);  // dz/dt = v^E(z)

    if (nu == 0.0) {
      d.points[1] = sample_ve(st.points[1]);  // identical path to z when ztilde(0)=z0
    } else {
      VectorField vt(grid_);
      parallel_for(grid_.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t q = b; q < e; ++q) {
          vt.ux[q] = ve.ux[q] + nu * v1a.ux[q];
          vt.uy[q] = ve.uy[q] + nu * v1a.uy[q];
        }
      });
      const VectorSampler sample_vt(vt);
      d.points[1] = sample_vt(st.points[1]);  // dztilde/dt = vtilde(ztilde)
    }

    // omega_e: transport by v^E + masked K(. - z)
    VectorField adv_e = ve;
    add_masked_point_vortex(adv_e, st.points[0], r_mask());
    core_->flux_divergence(adv_e.ux, adv_e.uy, we, d.fields[0]);

    // w1a: transport by v^E + scaled Oseen swirl, source Delta omega_e - v1a . grad omega_e
    VectorField adv_w = ve;
    add_masked_oseen_velocity(adv_w, st.points[0], nu * st.t, r_mask());
    core_->flux_divergence(adv_w.ux, adv_w.uy, w1, d.fields[1]);

    ws.laplacian_spectrum(st.fields[0], lap_spec);
    ws.gradient_spectra(st.fields[0], gx_spec, gy_spec);
    ws.to_fields_packed(gx_spec, gy_spec, gex, gey);
    ScalarField adv_term(grid_);
    parallel_for(grid_.size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t q = b; q < e; ++q)
        adv_term.values[q] = v1a.ux[q] * gex.values[q] + v1a.uy[q] * gey.values[q];
    });
    ws.to_spectrum(adv_term, src_spec);
    auto& dw1 = d.fields[1];
    const int N = grid_.N;
    parallel_for(static_cast<std::size_t>(N), [&](std::size_t jb, std::size_t je) {
      for (std::size_t j = jb; j < je; ++j)
        for (int i = 0; i < N; ++i) {
          const std::size_t q = j * N + i;
          if (!ws.keep_mode(i, static_cast<int>(j))) continue;
          dw1[q] += lap_spec[q] - src_spec[q];
        }
    });
  };

  core_->if_rk4_step(fs, dt, {0.0, 0.0}, rhs);

  s.base.t = fs.t;
  s.base.z = fs.points[0];
  s.ztilde = fs.points[1];
  ws.to_fields_packed(fs.fields[0], fs.fields[1], s.base.omega_e, s.w1a);
  if (!all_finite(s.base.omega_e.values) || !all_finite(s.w1a.values))
    throw std::runtime_error("avw_step: non-finite state after step");
}

std::vector<ApproxVWState> AVWStepper::run(const ApproxVWState& s0,
                                           const std::vector<double>& snap_times) const {
  std::vector<ApproxVWState> snaps;
  ApproxVWState s = s0;
  VWStepper probe(grid_, params_);
  const double u0 = probe.advecting_speed(s.base);
  const double dt_nom = (u0 > 0.0) ? params_.cfl * grid_.h / u0 : 0.05;
  for (double target : snap_times) {
    if (target < s.base.t - 1e-12)
      throw std::invalid_argument("avw_run: snapshot times must be non-decreasing");
    if (target > s.base.t + 1e-14) {
      const int steps = std::max(1, static_cast<int>(std::ceil((target - s.base.t) / dt_nom)));
      const double dt = (target - s.base.t) / steps;
      for (int k = 0; k < steps; ++k) step(s, dt);
      s.base.t = target;
    }
    snaps.push_back(s);
  }
  return snaps;
}

std::pair<ScalarField, VectorField> AVWStepper::tilde_fields(const ApproxVWState& s) const {
  if (s.nu == 0.0 || linf(s.w1a.values) == 0.0) {
    return {s.base.omega_e, plan_->velocity(s.base.omega_e)};
  }
  ScalarField wt(grid_);
  parallel_for(grid_.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t q = b; q < e; ++q)
      wt.values[q] = s.base.omega_e.values[q] + s.nu * s.w1a.values[q];
  });
  return {wt, plan_->velocity(wt)};
}

double AVWStepper::support_measure(const ScalarField& f, double eps_abs) const {
  std::size_t count = 0;
  for (double v : f.values)
    if (std::abs(v) > eps_abs) ++count;
  return static_cast<double>(count) * grid_.h * grid_.h;
}

}  // namespace vlab
