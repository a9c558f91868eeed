#pragma once

#include <string>
#include <vector>

#include "vlab/grid.hpp"

namespace vlab {

struct RunConfig {
  double L = 16.0;
  int N = 512;
  double xi_L = 32.0;
  int xi_N = 256;
  std::vector<double> nu_list{0.128, 0.064, 0.032, 0.016};
  double T = 0.5;
  double cfl = 0.5;
  double t0_cells = 4.0;  // t0 = (t0_cells h)^2 / (4 nu)
  double amplitude = 1.0;
  double rho = 1.0;
  Point center{2.5, 0.0};
  Point z0{0.0, 0.0};
  double clearance = 1.0;  // radius around z0 where omega0_e must vanish
  int snapshots = 50;
  double eps_supp_rel = 1e-10;
  double r_cut = 6.0;   // weighted-norm cut for simulation-derived remainders
  double r_mask_cells = 4.0;
  double d_min = 0.5;
  double radial_r_max = 16.0;
  int radial_nodes = 131072;
  std::string output_dir = "out";
  int threads = 1;

  double t0_for(double nu) const {
    const double h = L / N;
    return (t0_cells * h) * (t0_cells * h) / (4.0 * nu);
  }
};

RunConfig load_config(const std::string& path);
void save_config(const RunConfig& cfg, const std::string& path);
void validate_config(const RunConfig& cfg);  // throws naming the offending field
std::string config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const std::string& text);

}  // namespace vlab
