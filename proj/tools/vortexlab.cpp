#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "vlab/oseen_elliptic.hpp"
#include "vlab/runners.hpp"
#include "vlab/study.hpp"
#include "vlab/threading.hpp"

namespace {

vlab::RunConfig load_or_default(const std::string& path) {
  if (path.empty()) {
    vlab::RunConfig cfg;
    vlab::validate_config(cfg);
    return cfg;
  }
  return vlab::load_config(path);
}

void apply_overrides(vlab::RunConfig& cfg, const std::string& out, int threads) {
  if (!out.empty()) cfg.output_dir = out;
  if (threads > 0) cfg.threads = threads;
  vlab::set_num_threads(cfg.threads);
}

int run_oseen_solve(double nu, const std::string& rhs_path, const std::string& out_path) {
  std::ifstream in(rhs_path);
  if (!in) {
    std::cerr << "oseen-solve: cannot open " << rhs_path << "\n";
    return 1;
  }
  // CSV columns: r, a2, b2, a3, b3
  vlab::OseenModeProfile p2, p3;
  p2.n = 2;
  p3.n = 3;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    if (vals.size() != 5) {
      std::cerr << "oseen-solve: expected 5 columns (r, a2, b2, a3, b3)\n";
      return 1;
    }
    p2.r.push_back(vals[0]);
    p2.a.push_back(vals[1]);
    p2.b.push_back(vals[2]);
    p3.r.push_back(vals[0]);
    p3.a.push_back(vals[3]);
    p3.b.push_back(vals[4]);
  }
  const vlab::RadialOseenSolver solver;
  const auto rp2 = vlab::resample_profile(p2, solver.nodes());
  const auto rp3 = vlab::resample_profile(p3, solver.nodes());
  const auto s2 = solver.solve_mode(2, rp2.a, rp2.b, nu);
  const auto s3 = solver.solve_mode(3, rp3.a, rp3.b, nu);

  std::FILE* f = std::fopen(out_path.c_str(), "wb");
  if (!f) {
    std::cerr << "oseen-solve: cannot open " << out_path << "\n";
    return 1;
  }
  std::fputs("r,a2,b2,a3,b3\n", f);
  for (std::size_t j = 0; j < solver.nodes().size(); ++j) {
    std::fprintf(f, "%s,%s,%s,%s,%s\n", vlab::format_double(solver.nodes()[j]).c_str(),
                 vlab::format_double(s2.a[j]).c_str(), vlab::format_double(s2.b[j]).c_str(),
                 vlab::format_double(s3.a[j]).c_str(), vlab::format_double(s3.b[j]).c_str());
  }
  std::fclose(f);

  std::vector<double> mag(solver.nodes().size());
  for (std::size_t j = 0; j < mag.size(); ++j)
    mag[j] = std::abs(s2.a[j]) + std::abs(s2.b[j]) + std::abs(s3.a[j]) + std::abs(s3.b[j]);
  std::cout << "oseen-solve: wrote " << out_path << ", fitted decay gamma = "
            << vlab::fit_gaussian_decay(solver.nodes(), mag, 8.0, 12.0) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vortexlab: two-component Navier-Stokes vs the vortex-wave system"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int threads = 0;
  double nu = 0.0;
  bool write_snapshots = false;

  auto add_common = [&](CLI::App* sub, bool with_nu) {
    sub->add_option("--config", config_path, "JSON run configuration");
    sub->add_option("--out", out_dir, "output directory override");
    sub->add_option("--threads", threads, "worker threads (1 = reference mode)");
    if (with_nu) sub->add_option("--nu", nu, "viscosity override (default: first of nu_list)");
    sub->add_flag("--snapshots", write_snapshots, "write field snapshots");
  };

  auto* ns = app.add_subcommand("simulate-ns", "two-component viscous run");
  add_common(ns, true);
  auto* vw = app.add_subcommand("simulate-vw", "inviscid vortex-wave run");
  add_common(vw, false);
  auto* avw = app.add_subcommand("simulate-avw", "approximate viscous vortex-wave run");
  add_common(avw, true);
  auto* study = app.add_subcommand("convergence-study", "full inviscid-limit study");
  add_common(study, false);
  auto* fit = app.add_subcommand("fit-report", "refit slopes from an existing study directory");
  add_common(fit, false);
  std::string fit_dir;
  fit->add_option("--in", fit_dir, "study directory with metrics_nu_*.csv")->required();

  auto* oseen = app.add_subcommand("oseen-solve", "per-mode elliptic solve");
  double onu = 0.1;
  std::string rhs_path, sol_path = "oseen_solution.csv";
  oseen->add_option("--nu", onu, "viscosity")->required();
  oseen->add_option("--rhs", rhs_path, "CSV profile (r, a2, b2, a3, b3)")->required();
  oseen->add_option("--out", sol_path, "solution CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (oseen->parsed()) return run_oseen_solve(onu, rhs_path, sol_path);

    vlab::RunConfig cfg = load_or_default(config_path);
    apply_overrides(cfg, out_dir, threads);
    const double nu_run = (nu > 0.0) ? nu : cfg.nu_list.at(0);

    if (ns->parsed()) {
      vlab::run_ns_cli(cfg, nu_run, cfg.output_dir, write_snapshots);
      std::cout << "simulate-ns: wrote " << cfg.output_dir << "/ns_series.csv\n";
      return 0;
    }
    if (vw->parsed()) {
      vlab::run_vw_cli(cfg, cfg.output_dir, write_snapshots);
      std::cout << "simulate-vw: wrote " << cfg.output_dir << "/vw_series.csv\n";
      return 0;
    }
    if (avw->parsed()) {
      vlab::run_avw_cli(cfg, nu_run, cfg.output_dir, write_snapshots);
      std::cout << "simulate-avw: wrote " << cfg.output_dir << "/avw_series.csv\n";
      return 0;
    }
    if (study->parsed()) {
      const auto report = vlab::run_convergence_study(cfg);
      std::cout << "convergence-study: regular slope " << report.reg_fit.slope
                << (report.pass_reg_rate ? " (pass)" : " (fail)") << ", irregular slope "
                << report.l1_fit.slope << (report.pass_l1_rate ? " (pass)" : " (fail)")
                << ", shift spread " << report.shift_ratio_spread
                << (report.pass_shift ? " (pass)" : " (fail)") << ", remainder spreads "
                << report.w2bar_spread << "/" << report.gee_spread
                << (report.pass_remainder ? " (pass)" : " (fail)") << "\n";
      return report.all_pass() ? 0 : 1;
    }
    if (fit->parsed()) {
      const auto report = vlab::refit_from_directory(cfg, fit_dir);
      vlab::emit_report(report, cfg.output_dir + "/report.json");
      std::cout << "fit-report: regular slope " << report.reg_fit.slope << ", irregular slope "
                << report.l1_fit.slope << ", all_pass = " << (report.all_pass() ? "yes" : "no")
                << "\n";
      return report.all_pass() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
