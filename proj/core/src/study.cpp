#include "vlab/study.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <stdexcept>

#include <json.hpp>

#include "vlab/interpolate.hpp"
#include "vlab/runners.hpp"
#include "vlab/threading.hpp"

namespace vlab {

using nlohmann::json;

namespace {

double sup_over(const std::vector<double>& t, const std::vector<double>& v, double t_min) {
  double m = 0.0;
  bool any = false;
  for (std::size_t k = 0; k < t.size(); ++k)
    if (t[k] >= t_min * (1.0 - 1e-12)) {
      m = std::max(m, v[k]);
      any = true;
    }
  if (!any) throw std::runtime_error("study: empty metric window");
  return m;
}

double spread(std::vector<double> vals) {
  double lo = vals[0], hi = vals[0];
  for (double v : vals) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

}  // namespace

ConvergenceReport run_convergence_study(const RunConfig& cfg) {
  validate_config(cfg);
  if (cfg.nu_list.size() < 3)
    throw std::invalid_argument("run_convergence_study: need at least 3 viscosities for a fit");
  set_num_threads(cfg.threads);
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);

  const Grid2D grid(cfg.L, cfg.N);
  const Grid2D xi_grid(cfg.xi_L, cfg.xi_N);
  const auto times = snapshot_times(cfg);
  VWParams params;
  params.cfl = cfg.cfl;
  params.r_mask_cells = cfg.r_mask_cells;
  params.eps_supp_rel = cfg.eps_supp_rel;

  // inviscid reference, computed once and reused across nu
  VWStepper vw(grid, params);
  VWState vw0;
  vw0.t = 0.0;
  vw0.z = cfg.z0;
  vw0.omega_e = initial_bump(cfg);
  const auto ref = vw.run(vw0, times);

  const RadialOseenSolver radial(cfg.radial_r_max, cfg.radial_nodes);

  ConvergenceReport report;

  // Every viscosity starts at the same snapshot time (the first one at which
  // the slowest core is resolved), so all runs share the metric window and
  // the same initialization protocol.
  double t0_max = 0.0;
  for (double nu : cfg.nu_list) t0_max = std::max(t0_max, cfg.t0_for(nu));
  std::size_t k0 = 0;
  while (k0 < times.size() && times[k0] < t0_max * (1.0 - 1e-12)) ++k0;
  if (k0 >= times.size())
    throw std::runtime_error("run_convergence_study: no snapshot times at or after t0 = " +
                             std::to_string(t0_max));
  const double t_common = times[k0];
  report.t_common = t_common;

  for (double nu : cfg.nu_list) {
    MetricSeries series;
    series.nu = nu;
    try {
      // approximate viscous system over the full window
      AVWStepper avw(grid, params);
      ApproxVWState a0 = avw.init(initial_bump(cfg), cfg.z0, nu);
      const auto avw_traj = avw.run(a0, times);

      // The Dirac datum is realized at t_common by the second-order core
      // profile (1/nu t) G + w2a centered at ztilde(t_common); the bare heat
      // kernel alone would inject an artificial core-deformation transient.
      NSStepper ns(grid);
      NSState s0 =
          ns.init(initial_bump(cfg), avw_traj[k0].ztilde, nu, t_common, cfg.clearance);
      {
        // regular part starts from the approximate viscous solution at
        // t_common, irregular part from the corrected core profile
        auto [wt0, vt0] = avw.tilde_fields(avw_traj[k0]);
        (void)vt0;
        s0.omega_e = wt0;
        const auto mom0 = compute_moments(wt0, avw_traj[k0].ztilde, cfg.d_min);
        const auto corr0 = build_core_corrector(mom0, nu, t_common, radial);
        const ScalarField w2a_phys =
            corrector_on_physical(corr0, grid, avw_traj[k0].ztilde, nu * t_common);
        for (std::size_t q = 0; q < grid.size(); ++q)
          s0.omega_b.values[q] += w2a_phys.values[q];
        // band-limit the prepared core so the first dealiased step does not
        // shed the marginal corrector tail as a global ripple
        SpectralWorkspace ws0(grid);
        std::vector<cplx> spec0;
        ws0.to_spectrum(s0.omega_b, spec0);
        ws0.dealias(spec0);
        ws0.to_field(spec0, s0.omega_b);
      }
      NSStepOptions opt;
      opt.cfl = cfg.cfl;
      std::vector<double> ns_times(times.begin() + k0, times.end());
      const auto ns_traj = ns.run(s0, ns_times, opt);

      for (std::size_t k = k0; k < times.size(); ++k) {
        const double t = times[k];
        const auto& st_ns = ns_traj[k - k0];
        const auto& st_vw = ref[k];
        const auto& st_avw = avw_traj[k];

        ScalarField diff(grid);
        for (std::size_t q = 0; q < grid.size(); ++q)
          diff.values[q] = st_ns.omega_e.values[q] - st_vw.omega_e.values[q];
        const double reg_err = lp_intersection_norm(diff);
        const double l1rate = l1_distance_to_oseen(st_ns.omega_b, st_vw.z, nu, t) / t;

        auto [omega_tilde, v_tilde] = avw.tilde_fields(st_avw);
        (void)v_tilde;
        const auto moments = compute_moments(omega_tilde, st_avw.ztilde, cfg.d_min);
        const auto corr = build_core_corrector(moments, nu, t, radial);
        const ScalarField w2a = corrector_field(corr, xi_grid);
        const auto w2 = rescale_to_core(st_ns.omega_b, st_avw.ztilde, nu, t, xi_grid);
        const ScalarField w2bar = core_remainder(w2, w2a);
        // the remainder hovers at the noise floor near t_common; its sup over
        // the window is set by later, genuine values, so norms stay computable
        const double w2bar_norm = gaussian_weighted_l2_norm(w2bar, cfg.r_cut, 100.0);
        VectorField gw = fd_gradient(w2bar);
        ScalarField gx(xi_grid), gy(xi_grid);
        gx.values = gw.ux;
        gy.values = gw.uy;
        const double gnorm = std::hypot(gaussian_weighted_l2_norm(gx, cfg.r_cut, 100.0),
                                        gaussian_weighted_l2_norm(gy, cfg.r_cut, 100.0));

        const Point shift_vec = st_avw.ztilde - st_vw.z;
        const double shift_rate = norm(shift_vec) / (nu * t);

        ScalarField w1bar = regular_remainder(st_ns.omega_e, omega_tilde, nu);
        const double w1bar_norm = lp_intersection_norm(w1bar);

        // nu |w2bar|_{L1 xi} = t^{-1} |omega_b - ((1/nu t)G + w2a)|_{L1 x}:
        // the remainder-form irregular metric
        std::vector<double> absv(w2bar.values.size());
        for (std::size_t q = 0; q < absv.size(); ++q) absv[q] = std::abs(w2bar.values[q]);
        const double l1rem = nu * ksum(absv) * xi_grid.h * xi_grid.h;

        series.t.push_back(t);
        series.reg_err.push_back(reg_err);
        series.l1_oseen_rate.push_back(l1rate);
        series.l1_remainder_rate.push_back(l1rem);
        series.w2bar_l2p.push_back(w2bar_norm);
        series.grad_w2bar_l2p.push_back(gnorm);
        series.shift_rate.push_back(shift_rate);
        series.w1bar_norm.push_back(w1bar_norm);
        series.gee =
            remainder_energy_monitor(series.t, series.w2bar_l2p, series.grad_w2bar_l2p);
      }
    } catch (const std::exception& e) {
      series.failed = true;
      series.error = std::string("after t = ") +
                     std::to_string(series.t.empty() ? 0.0 : series.t.back()) + ": " + e.what();
      const std::size_t n = series.t.size();
      auto fit_len = [n](std::vector<double>& v) { v.resize(n, 0.0); };
      fit_len(series.reg_err);
      fit_len(series.l1_oseen_rate);
      fit_len(series.l1_remainder_rate);
      fit_len(series.w2bar_l2p);
      fit_len(series.grad_w2bar_l2p);
      fit_len(series.gee);
      fit_len(series.shift_rate);
      fit_len(series.w1bar_norm);
    }
    report.runs.push_back(std::move(series));
  }

  std::vector<double> shift_sups, w2bar_sups, gee_sups;
  for (const auto& r : report.runs) {
    if (r.failed) continue;
    report.reg_samples.emplace_back(r.nu, sup_over(r.t, r.reg_err, t_common));
    report.l1_samples.emplace_back(r.nu, sup_over(r.t, r.l1_oseen_rate, t_common));
    report.l1_remainder_samples.emplace_back(r.nu, sup_over(r.t, r.l1_remainder_rate, t_common));
    shift_sups.push_back(sup_over(r.t, r.shift_rate, t_common));
    w2bar_sups.push_back(sup_over(r.t, r.w2bar_l2p, t_common));
    gee_sups.push_back(sup_over(r.t, r.gee, t_common));
  }
  if (report.reg_samples.size() >= 3) {
    report.reg_fit = fit_loglog_rate(report.reg_samples);
    report.l1_fit = fit_loglog_rate(report.l1_samples);
    report.l1_remainder_fit = fit_loglog_rate(report.l1_remainder_samples);
    report.shift_ratio_spread = spread(shift_sups);
    report.w2bar_spread = spread(w2bar_sups);
    report.gee_spread = spread(gee_sups);
    report.pass_reg_rate = report.reg_fit.slope >= 0.8;
    report.pass_l1_rate = report.l1_fit.slope >= 0.8;
    report.pass_shift = report.shift_ratio_spread < 2.0;
    report.pass_remainder = report.w2bar_spread < 2.0 && report.gee_spread < 2.0;
  }

  // per-run CSVs and the JSON report
  for (const auto& r : report.runs) {
    std::ostringstream name;
    name << cfg.output_dir << "/metrics_nu_" << format_double(r.nu) << ".csv";
    CsvWriter csv(name.str(), {"t", "reg_err", "l1_oseen_rate", "w2bar_l2p", "gee", "shift_rate",
                               "w1bar_norm", "grad_w2bar_l2p", "l1_remainder_rate"});
    for (std::size_t k = 0; k < r.t.size(); ++k)
      csv.row({r.t[k], r.reg_err[k], r.l1_oseen_rate[k], r.w2bar_l2p[k], r.gee[k],
               r.shift_rate[k], r.w1bar_norm[k], r.grad_w2bar_l2p[k], r.l1_remainder_rate[k]});
  }
  emit_report(report, cfg.output_dir + "/report.json");
  save_config(cfg, cfg.output_dir + "/config.json");
  return report;
}

namespace {
json series_to_json(const MetricSeries& r) {
  json j;
  j["nu"] = r.nu;
  j["failed"] = r.failed;
  j["error"] = r.error;
  j["t"] = r.t;
  j["reg_err"] = r.reg_err;
  j["l1_oseen_rate"] = r.l1_oseen_rate;
  j["l1_remainder_rate"] = r.l1_remainder_rate;
  j["w2bar_l2p"] = r.w2bar_l2p;
  j["grad_w2bar_l2p"] = r.grad_w2bar_l2p;
  j["gee"] = r.gee;
  j["shift_rate"] = r.shift_rate;
  j["w1bar_norm"] = r.w1bar_norm;
  return j;
}

MetricSeries series_from_json(const json& j) {
  MetricSeries r;
  r.nu = j.at("nu").get<double>();
  r.failed = j.at("failed").get<bool>();
  r.error = j.at("error").get<std::string>();
  r.t = j.at("t").get<std::vector<double>>();
  r.reg_err = j.at("reg_err").get<std::vector<double>>();
  r.l1_oseen_rate = j.at("l1_oseen_rate").get<std::vector<double>>();
  r.l1_remainder_rate = j.at("l1_remainder_rate").get<std::vector<double>>();
  r.w2bar_l2p = j.at("w2bar_l2p").get<std::vector<double>>();
  r.grad_w2bar_l2p = j.at("grad_w2bar_l2p").get<std::vector<double>>();
  r.gee = j.at("gee").get<std::vector<double>>();
  r.shift_rate = j.at("shift_rate").get<std::vector<double>>();
  r.w1bar_norm = j.at("w1bar_norm").get<std::vector<double>>();
  return r;
}
}  // namespace

void emit_report(const ConvergenceReport& report, const std::string& path) {
  json j;
  j["t_common"] = report.t_common;
  j["runs"] = json::array();
  for (const auto& r : report.runs) j["runs"].push_back(series_to_json(r));
  auto samples = [](const std::vector<std::pair<double, double>>& v) {
    json a = json::array();
    for (const auto& [nu, err] : v) a.push_back({{"nu", nu}, {"sup_err", err}});
    return a;
  };
  j["regular_part"] = {{"samples", samples(report.reg_samples)},
                       {"slope", report.reg_fit.slope},
                       {"intercept", report.reg_fit.intercept},
                       {"pass", report.pass_reg_rate}};
  j["irregular_part"] = {{"samples", samples(report.l1_samples)},
                         {"slope", report.l1_fit.slope},
                         {"intercept", report.l1_fit.intercept},
                         {"pass", report.pass_l1_rate}};
  j["irregular_part_remainder_form"] = {{"samples", samples(report.l1_remainder_samples)},
                                        {"slope", report.l1_remainder_fit.slope},
                                        {"intercept", report.l1_remainder_fit.intercept}};
  j["vortex_shift"] = {{"spread", report.shift_ratio_spread}, {"pass", report.pass_shift}};
  j["remainder"] = {{"w2bar_spread", report.w2bar_spread},
                    {"gee_spread", report.gee_spread},
                    {"pass", report.pass_remainder}};
  j["all_pass"] = report.all_pass();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("emit_report: cannot open " + path);
  out << j.dump(2) << "\n";
}

ConvergenceReport load_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_report: cannot open " + path);
  json j;
  in >> j;
  ConvergenceReport r;
  r.t_common = j.at("t_common").get<double>();
  for (const auto& rj : j.at("runs")) r.runs.push_back(series_from_json(rj));
  auto samples = [](const json& a) {
    std::vector<std::pair<double, double>> v;
    for (const auto& s : a) v.emplace_back(s.at("nu").get<double>(), s.at("sup_err").get<double>());
    return v;
  };
  r.reg_samples = samples(j.at("regular_part").at("samples"));
  r.l1_samples = samples(j.at("irregular_part").at("samples"));
  r.l1_remainder_samples = samples(j.at("irregular_part_remainder_form").at("samples"));
  r.l1_remainder_fit.slope = j.at("irregular_part_remainder_form").at("slope").get<double>();
  r.l1_remainder_fit.intercept =
      j.at("irregular_part_remainder_form").at("intercept").get<double>();
  r.reg_fit.slope = j.at("regular_part").at("slope").get<double>();
  r.reg_fit.intercept = j.at("regular_part").at("intercept").get<double>();
  r.l1_fit.slope = j.at("irregular_part").at("slope").get<double>();
  r.l1_fit.intercept = j.at("irregular_part").at("intercept").get<double>();
  r.pass_reg_rate = j.at("regular_part").at("pass").get<bool>();
  r.pass_l1_rate = j.at("irregular_part").at("pass").get<bool>();
  r.shift_ratio_spread = j.at("vortex_shift").at("spread").get<double>();
  r.pass_shift = j.at("vortex_shift").at("pass").get<bool>();
  r.w2bar_spread = j.at("remainder").at("w2bar_spread").get<double>();
  r.gee_spread = j.at("remainder").at("gee_spread").get<double>();
  r.pass_remainder = j.at("remainder").at("pass").get<bool>();
  return r;
}

bool report_equal(const ConvergenceReport& a, const ConvergenceReport& b) {
  auto series_eq = [](const MetricSeries& x, const MetricSeries& y) {
    return x.nu == y.nu && x.failed == y.failed && x.error == y.error && x.t == y.t &&
           x.reg_err == y.reg_err && x.l1_oseen_rate == y.l1_oseen_rate &&
           x.l1_remainder_rate == y.l1_remainder_rate &&
           x.w2bar_l2p == y.w2bar_l2p && x.grad_w2bar_l2p == y.grad_w2bar_l2p && x.gee == y.gee &&
           x.shift_rate == y.shift_rate && x.w1bar_norm == y.w1bar_norm;
  };
  if (a.runs.size() != b.runs.size()) return false;
  for (std::size_t i = 0; i < a.runs.size(); ++i)
    if (!series_eq(a.runs[i], b.runs[i])) return false;
  return a.t_common == b.t_common && a.reg_samples == b.reg_samples &&
         a.l1_samples == b.l1_samples && a.reg_fit.slope == b.reg_fit.slope &&
         a.reg_fit.intercept == b.reg_fit.intercept && a.l1_fit.slope == b.l1_fit.slope &&
         a.l1_fit.intercept == b.l1_fit.intercept &&
         a.shift_ratio_spread == b.shift_ratio_spread && a.w2bar_spread == b.w2bar_spread &&
         a.gee_spread == b.gee_spread && a.pass_reg_rate == b.pass_reg_rate &&
         a.pass_l1_rate == b.pass_l1_rate && a.pass_shift == b.pass_shift &&
         a.pass_remainder == b.pass_remainder;
}

ConvergenceReport refit_from_directory(const RunConfig& cfg, const std::string& dir) {
  ConvergenceReport report;
  double t_common = 0.0;
  for (double nu : cfg.nu_list) {
    std::ostringstream name;
    name << dir << "/metrics_nu_" << format_double(nu) << ".csv";
    std::ifstream in(name.str());
    if (!in) throw std::runtime_error("fit-report: cannot open " + name.str());
    MetricSeries series;
    series.nu = nu;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::stringstream ss(line);
      std::string cell;
      std::vector<double> vals;
      while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
      if (vals.size() != 9) throw std::runtime_error("fit-report: malformed row in " + name.str());
      series.t.push_back(vals[0]);
      series.reg_err.push_back(vals[1]);
      series.l1_oseen_rate.push_back(vals[2]);
      series.w2bar_l2p.push_back(vals[3]);
      series.gee.push_back(vals[4]);
      series.shift_rate.push_back(vals[5]);
      series.w1bar_norm.push_back(vals[6]);
      series.grad_w2bar_l2p.push_back(vals[7]);
      series.l1_remainder_rate.push_back(vals[8]);
    }
    if (!series.t.empty()) t_common = std::max(t_common, series.t.front());
    report.runs.push_back(std::move(series));
  }
  std::vector<double> shift_sups, w2bar_sups, gee_sups;
  for (const auto& r : report.runs) {
    if (r.failed || r.t.empty()) continue;
    report.reg_samples.emplace_back(r.nu, sup_over(r.t, r.reg_err, t_common));
    report.l1_samples.emplace_back(r.nu, sup_over(r.t, r.l1_oseen_rate, t_common));
    report.l1_remainder_samples.emplace_back(r.nu, sup_over(r.t, r.l1_remainder_rate, t_common));
    shift_sups.push_back(sup_over(r.t, r.shift_rate, t_common));
    w2bar_sups.push_back(sup_over(r.t, r.w2bar_l2p, t_common));
    gee_sups.push_back(sup_over(r.t, r.gee, t_common));
  }
  if (report.reg_samples.size() >= 3) {
    report.reg_fit = fit_loglog_rate(report.reg_samples);
    report.l1_fit = fit_loglog_rate(report.l1_samples);
    report.l1_remainder_fit = fit_loglog_rate(report.l1_remainder_samples);
    report.shift_ratio_spread = spread(shift_sups);
    report.w2bar_spread = spread(w2bar_sups);
    report.gee_spread = spread(gee_sups);
    report.pass_reg_rate = report.reg_fit.slope >= 0.8;
    report.pass_l1_rate = report.l1_fit.slope >= 0.8;
    report.pass_shift = report.shift_ratio_spread < 2.0;
    report.pass_remainder = report.w2bar_spread < 2.0 && report.gee_spread < 2.0;
  }
  return report;
}

}  // namespace vlab
