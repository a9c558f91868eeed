// Acceptance suite: one pass/fail line per criterion, exit 0 iff all pass.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>
#include <vector>

#include "vlab/approx_system.hpp"
#include "vlab/diagnostics.hpp"
#include "vlab/navier_stokes.hpp"
#include "vlab/oseen.hpp"
#include "vlab/oseen_elliptic.hpp"
#include "vlab/runners.hpp"
#include "vlab/study.hpp"
#include "vlab/threading.hpp"
#include "vlab/vortex_wave.hpp"

using namespace vlab;

namespace {
constexpr double kPi = std::numbers::pi;
int failures = 0;

void report_line(int id, const char* what, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", id, what, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double linf(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

ScalarField random_decaying_field(const Grid2D& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> off(-1.5, 1.5);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  std::uniform_int_distribution<int> deg(0, 2);
  ScalarField f(g);
  for (int b = 0; b < 3; ++b) {
    const double cx = off(rng), cy = off(rng), a = amp(rng);
    const int px = deg(rng), py = deg(rng);
    for (int j = 0; j < g.N; ++j)
      for (int i = 0; i < g.N; ++i) {
        const Point xi = g.node(i, j);
        const double dx = xi[0] - cx, dy = xi[1] - cy;
        f(i, j) += a * std::pow(xi[0], px) * std::pow(xi[1], py) *
                   std::exp(-0.3 * (dx * dx + dy * dy));
      }
  }
  return f;
}

void criteria_1_to_4() {
  RunConfig cfg;  // shipped defaults: N = 512, T = 0.5, four viscosities
  cfg.output_dir = "acceptance_study";
  cfg.threads = 2;
  std::filesystem::remove_all(cfg.output_dir);
  const auto t0 = std::chrono::steady_clock::now();
  ConvergenceReport r;
  try {
    r = run_convergence_study(cfg);
  } catch (const std::exception& e) {
    report_line(1, "regular-part rate >= 0.8", false, std::string("study failed: ") + e.what());
    report_line(2, "irregular-part rate >= 0.8", false, "study failed");
    report_line(3, "vortex-shift ratio spread < 2", false, "study failed");
    report_line(4, "remainder/monitor spreads < 2", false, "study failed");
    return;
  }
  const double mins =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / 60.0;

  char buf[256];
  std::snprintf(buf, sizeof buf, "slope %.3f over nu in [%g, %g], runtime %.1f min",
                r.reg_fit.slope, cfg.nu_list.back(), cfg.nu_list.front(), mins);
  report_line(1, "regular-part rate >= 0.8", r.pass_reg_rate && mins <= 30.0, buf);

  std::snprintf(buf, sizeof buf, "slope %.3f (remainder-form slope %.3f)", r.l1_fit.slope,
                r.l1_remainder_fit.slope);
  report_line(2, "irregular-part rate >= 0.8", r.pass_l1_rate, buf);

  std::snprintf(buf, sizeof buf, "sup_t |ztilde - z|/(nu t) spread %.3f", r.shift_ratio_spread);
  report_line(3, "vortex-shift ratio spread < 2", r.pass_shift, buf);

  std::snprintf(buf, sizeof buf, "w2bar spread %.3f, G spread %.3f", r.w2bar_spread,
                r.gee_spread);
  report_line(4, "remainder/monitor spreads < 2", r.pass_remainder, buf);
}

void criterion_5() {
  Grid2D g512(32.0, 512);
  XiOps ops(g512);
  const ScalarField G = oseen_gaussian_field(g512);
  const double lg = linf(ops.fokker_planck(G));
  const double ag = linf(ops.linearized_advection(G));

  Grid2D g(32.0, 256);
  XiOps small(g);
  double worst = 0.0;
  for (unsigned seed = 0; seed < 20; ++seed) {
    const ScalarField w = random_decaying_field(g, 500 + seed);
    const double wn2 = gaussian_weighted_inner(w, w, 12.0);
    const double skew = std::abs(gaussian_weighted_inner(small.linearized_advection(w), w, 12.0));
    worst = std::max(worst, skew / wn2);
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "max|LG| = %.2e, max|Lambda G| = %.2e, skew ratio %.2e", lg, ag,
                worst);
  report_line(5, "operator identities at 1e-8", lg < 1e-8 && ag < 1e-8 && worst < 1e-8, buf);
}

void criterion_6() {
  RadialOseenSolver solver(16.0, 131072);
  Grid2D xg(32.0, 256);
  XiOps ops(xg);
  std::vector<double> ra(solver.nodes().size()), zero(solver.nodes().size(), 0.0);
  for (std::size_t j = 0; j < ra.size(); ++j) {
    const double r = solver.nodes()[j];
    ra[j] = r * r * std::exp(-0.25 * r * r);
  }
  ScalarField z(xg);
  for (int j = 0; j < xg.N; ++j)
    for (int i = 0; i < xg.N; ++i) {
      const Point xi = xg.node(i, j);
      const double r = norm(xi);
      z(i, j) = r * r * std::exp(-0.25 * r * r) * std::cos(2.0 * std::atan2(xi[1], xi[0]));
    }
  const double zn = gaussian_weighted_l2_norm(z, 8.0, 1e12);

  bool pass = true;
  std::string detail;
  for (double nu : {1e-1, 1e-2, 1e-3}) {
    auto sol = solver.solve_mode(2, ra, zero, nu);
    ScalarField w = assemble_modes(xg, {{2, sol.r, sol.a, sol.b}});
    ScalarField lw = ops.fokker_planck(w);
    ScalarField aw = ops.linearized_advection(w);
    ScalarField resid(xg);
    for (std::size_t q = 0; q < xg.size(); ++q)
      resid.values[q] = aw.values[q] + nu * (w.values[q] - lw.values[q]) - z.values[q];
    const double rel = gaussian_weighted_l2_norm(resid, 8.0, 1e12) / zn;
    std::vector<double> mag(sol.r.size());
    for (std::size_t j = 0; j < mag.size(); ++j)
      mag[j] = std::abs(sol.a[j]) + std::abs(sol.b[j]);
    const double gamma = fit_gaussian_decay(sol.r, mag, 8.0, 12.0);
    char buf[96];
    std::snprintf(buf, sizeof buf, " nu=%g: resid %.1e gamma %.2f;", nu, rel, gamma);
    detail += buf;
    pass = pass && rel <= 1e-6 && gamma >= 0.9;
  }
  // linearity
  std::vector<double> rb(solver.nodes().size());
  for (std::size_t j = 0; j < rb.size(); ++j)
    rb[j] = solver.nodes()[j] * std::exp(-0.3 * solver.nodes()[j] * solver.nodes()[j]);
  auto s1 = solver.solve_mode(2, ra, zero, 0.1);
  auto s2 = solver.solve_mode(2, zero, rb, 0.1);
  auto s12 = solver.solve_mode(2, ra, rb, 0.1);
  double lerr = 0.0, lscale = 0.0;
  for (std::size_t j = 0; j < ra.size(); ++j) {
    lerr = std::max({lerr, std::abs(s12.a[j] - s1.a[j] - s2.a[j]),
                     std::abs(s12.b[j] - s1.b[j] - s2.b[j])});
    lscale = std::max({lscale, std::abs(s12.a[j]), std::abs(s12.b[j])});
  }
  pass = pass && lerr < 1e-8 * lscale;
  char buf[64];
  std::snprintf(buf, sizeof buf, " linearity %.1e", lerr / lscale);
  report_line(6, "elliptic solver: residual/decay/linearity", pass, detail + buf);
}

void criterion_7() {
  Grid2D phys(16.0, 512);
  const Point y0{2.0, 0.5};
  const Point zt{0.0, 0.0};
  VectorField v(phys);
  for (int j = 0; j < phys.N; ++j)
    for (int i = 0; i < phys.N; ++i) {
      const Point k = biot_savart_kernel(phys.node(i, j) - y0);
      v.ux[phys.idx(i, j)] = k[0];
      v.uy[phys.idx(i, j)] = k[1];
    }
  const VectorSampler vs(v);
  MomentCoefficients m;
  const double d = norm(zt - y0);
  const double beta0 = std::atan2(zt[1] - y0[1], zt[0] - y0[0]);
  m.alpha2 = std::cos(2 * beta0) / (d * d);
  m.beta2 = std::sin(2 * beta0) / (d * d);
  m.alpha3 = std::cos(3 * beta0) / (d * d * d);
  m.beta3 = std::sin(3 * beta0) / (d * d * d);
  Grid2D xg(24.0, 128);
  auto weighted_sup = [&](double nut) {
    const ScalarField r1 = build_reaction_term(vs, zt, nut, xg, phys);
    const ScalarField a0 = build_moment_reaction(m, nut, xg);
    double sup = 0.0;
    for (int j = 0; j < xg.N; ++j)
      for (int i = 0; i < xg.N; ++i) {
        const Point xi = xg.node(i, j);
        const double r2 = xi[0] * xi[0] + xi[1] * xi[1];
        if (r2 > 100.0) continue;
        sup = std::max(sup, std::abs(r1(i, j) - a0(i, j)) * std::exp(0.25 * r2) /
                                (nut * (1.0 + r2 * r2)));
      }
    return sup;
  };
  const double s1 = weighted_sup(0.004);
  const double s2 = weighted_sup(0.002);
  const double s3 = weighted_sup(0.001);
  const bool pass = std::isfinite(s1) && std::isfinite(s2) && std::isfinite(s3) &&
                    s1 / s2 < 2.0 && s2 / s1 < 2.0 && s2 / s3 < 2.0 && s3 / s2 < 2.0;
  char buf[128];
  std::snprintf(buf, sizeof buf, "weighted sup %.3e / %.3e / %.3e across nut halvings", s1, s2,
                s3);
  report_line(7, "reaction expansion |R1 - A0| = O(nu t)", pass, buf);
}

void criterion_8() {
  using zd = std::complex<double>;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  int done = 0;
  while (done < 100) {
    zd a(u(rng), u(rng)), b(u(rng), u(rng));
    if (std::abs(b) < 0.2 || std::abs(a) < 1e-12) continue;
    a *= 0.5 * std::abs(b) / std::abs(a);
    const double direct = 1.0 / std::norm(a + b) - 1.0 / std::norm(b);
    const double series = series_inverse_square(a, b, 60);
    worst = std::max(worst, std::abs(series - direct) / std::max(1e-300, std::abs(direct)));
    ++done;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  char buf[96];
  std::snprintf(buf, sizeof buf, "worst relative error %.2e, %.3f s", worst, secs);
  report_line(8, "reflection series identity at 1e-10", worst < 1e-10 && secs < 1.0, buf);
}

void criterion_9() {
  // Oseen closed form at N = 512
  Grid2D g(16.0, 512);
  const double s = 0.01;
  ScalarField w(g);
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i) {
      const Point x = g.node(i, j);
      w(i, j) = std::exp(-(x[0] * x[0] + x[1] * x[1]) / (4.0 * s)) / (4.0 * kPi * s);
    }
  const VectorField v = free_space_velocity(w);
  double worst = 0.0;
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i) {
      const Point x = g.node(i, j);
      const double r = norm(x);
      if (r < 0.5 || r > 4.0) continue;
      const double speed = std::hypot(v.ux[g.idx(i, j)], v.uy[g.idx(i, j)]);
      const double exact = (1.0 - std::exp(-r * r / (4.0 * s))) / (2.0 * kPi * r);
      worst = std::max(worst, std::abs(speed - exact) / exact);
    }

  // direct quadrature oracle on 64^2
  Grid2D gc(8.0, 64);
  ScalarField wc(gc);
  for (int j = 0; j < gc.N; ++j)
    for (int i = 0; i < gc.N; ++i) {
      const Point x = gc.node(i, j) - Point{0.1, 0.05};
      wc(i, j) = std::exp(-(x[0] * x[0] + x[1] * x[1]) / (4.0 * 0.025)) / (4.0 * kPi * 0.025);
    }
  const VectorField vc = free_space_velocity(wc);
  double vmax = 0.0;
  for (std::size_t q = 0; q < gc.size(); ++q)
    vmax = std::max(vmax, std::hypot(vc.ux[q], vc.uy[q]));
  double qworst = 0.0;
  for (int jt = 0; jt < gc.N; jt += 9)
    for (int it = 0; it < gc.N; it += 9) {
      double sx = 0.0, sy = 0.0;
      for (int j = 0; j < gc.N; ++j)
        for (int i = 0; i < gc.N; ++i) {
          if (i == it && j == jt) continue;
          const Point k = biot_savart_kernel(gc.node(it, jt) - gc.node(i, j));
          sx += k[0] * wc(i, j);
          sy += k[1] * wc(i, j);
        }
      sx *= gc.h * gc.h;
      sy *= gc.h * gc.h;
      const std::size_t q = gc.idx(it, jt);
      qworst = std::max({qworst, std::abs(sx - vc.ux[q]), std::abs(sy - vc.uy[q])});
    }

  // fitted velocity-bound constant across one refinement
  auto fitted = [](int n) {
    Grid2D gg(16.0, n);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> pos(-1.5, 1.5);
    std::uniform_real_distribution<double> wid(0.2, 0.32);
    std::uniform_real_distribution<double> amp(-2.0, 2.0);
    double cmax = 0.0;
    for (int rep = 0; rep < 5; ++rep) {
      ScalarField f(gg);
      for (int b = 0; b < 3; ++b) {
        const double cx = pos(rng), cy = pos(rng), sg = wid(rng), a = amp(rng);
        for (int j = 0; j < gg.N; ++j)
          for (int i = 0; i < gg.N; ++i) {
            const double dx = gg.x(i) - cx, dy = gg.y(j) - cy;
            f(i, j) += a * std::exp(-(dx * dx + dy * dy) / (2.0 * sg * sg));
          }
      }
      const VectorField vf = free_space_velocity(f);
      double fmax = 0.0;
      for (std::size_t q = 0; q < gg.size(); ++q)
        fmax = std::max(fmax, std::hypot(vf.ux[q], vf.uy[q]));
      cmax = std::max(cmax, fmax / lp_intersection_norm(f));
    }
    return cmax;
  };
  const double c64 = fitted(64);
  const double c128 = fitted(128);
  const bool stable = c128 / c64 < 2.0 && c64 / c128 < 2.0;

  char buf[160];
  std::snprintf(buf, sizeof buf, "oseen %.2e (tol 1e-6), quadrature %.2e (tol 1e-2 of %.2e), C %0.3f->%0.3f",
                worst, qworst, vmax, c64, c128);
  report_line(9, "Biot-Savart oracles", worst < 1e-6 && qworst < 1e-2 * vmax && stable, buf);
}

void criterion_10() {
  // mass / enstrophy on a coupled two-component run
  Grid2D g(16.0, 256);
  NSStepper ns(g);
  const double nu = 0.05, t0 = 0.32;
  NSState s = ns.init(bump_field(g, {2.5, 0.0}, 1.0, 1.0), {0.0, 0.0}, nu, t0, 1.0);
  double me = mass(s.omega_e), mb = mass(s.omega_b), ens = enstrophy(s);
  double mass_drift = 0.0, ens_violation = 0.0;
  for (int k = 0; k < 20; ++k) {
    ns.step(s, 0.005);
    const double me1 = mass(s.omega_e), mb1 = mass(s.omega_b), e1 = enstrophy(s);
    mass_drift = std::max({mass_drift, std::abs(me1 - me), std::abs(mb1 - mb)});
    ens_violation = std::max(ens_violation, e1 - ens);
    me = me1;
    mb = mb1;
    ens = e1;
  }

  // inviscid Lp conservation on a resolved blob
  Grid2D gl(16.0, 512);
  VWStepper vw(gl);
  VWState vs;
  vs.t = 0.0;
  vs.z = {0.0, 0.0};
  vs.omega_e = heat_kernel_field(gl, {2.5, 0.0}, 0.245);
  auto traj = vw.run(vs, {0.1, 0.6});
  double lp_drift = 0.0;
  for (double p : {1.0, 4.0 / 3.0, 4.0}) {
    const double n0 = lp_norm(traj[0].omega_e, p);
    const double n1 = lp_norm(traj[1].omega_e, p);
    lp_drift = std::max(lp_drift, std::abs(n1 - n0) / (0.5 * n0));
  }

  char buf[160];
  std::snprintf(buf, sizeof buf,
                "mass drift %.1e (tol 1e-12), Lp drift %.1e/unit (tol 1e-6), enstrophy rise %.1e",
                mass_drift, lp_drift, ens_violation);
  report_line(10, "conservation suite", mass_drift < 1e-12 && lp_drift < 1e-6 &&
                                            ens_violation <= 1e-10, buf);
}

}  // namespace

int main(int argc, char** argv) {
  bool quick = false;
  for (int i = 1; i < argc; ++i)
    if (std::string(argv[i]) == "--skip-study") quick = true;

  set_num_threads(1);
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  if (!quick) {
    criteria_1_to_4();
  } else {
    std::printf("criteria 1-4 skipped (--skip-study)\n");
  }
  std::printf("%s\n", failures == 0 ? "ACCEPTANCE: all criteria passed"
                                    : "ACCEPTANCE: some criteria FAILED");
  return failures == 0 ? 0 : 1;
}
