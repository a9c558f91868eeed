#include "vlab/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace vlab {

using nlohmann::json;

namespace {
template <typename T>
T get_field(const json& j, const std::string& key) {
  if (!j.contains(key)) throw std::invalid_argument("config: missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument("config: field '" + key + "' has wrong type");
  }
}

Point get_point(const json& j, const std::string& key) {
  auto v = get_field<std::vector<double>>(j, key);
  if (v.size() != 2) throw std::invalid_argument("config: field '" + key + "' must be [x, y]");
  return {v[0], v[1]};
}
}  // namespace

std::string config_to_json(const RunConfig& c) {
  json j;
  j["grid"] = {{"L", c.L}, {"N", c.N}};
  j["xi_grid"] = {{"L", c.xi_L}, {"N", c.xi_N}};
  j["nu_list"] = c.nu_list;
  j["T"] = c.T;
  j["cfl"] = c.cfl;
  j["t0_cells"] = c.t0_cells;
  j["initial"] = {{"amplitude", c.amplitude},
                  {"rho", c.rho},
                  {"center", {c.center[0], c.center[1]}},
                  {"z0", {c.z0[0], c.z0[1]}},
                  {"clearance", c.clearance}};
  j["snapshots"] = c.snapshots;
  j["thresholds"] = {{"eps_supp_rel", c.eps_supp_rel},
                     {"r_cut", c.r_cut},
                     {"r_mask_cells", c.r_mask_cells},
                     {"d_min", c.d_min}};
  j["radial_solver"] = {{"r_max", c.radial_r_max}, {"nodes", c.radial_nodes}};
  j["output_dir"] = c.output_dir;
  j["threads"] = c.threads;
  return j.dump(2) + "\n";
}

RunConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  RunConfig c;
  const json grid = get_field<json>(j, "grid");
  c.L = get_field<double>(grid, "L");
  c.N = get_field<int>(grid, "N");
  const json xi = get_field<json>(j, "xi_grid");
  c.xi_L = get_field<double>(xi, "L");
  c.xi_N = get_field<int>(xi, "N");
  c.nu_list = get_field<std::vector<double>>(j, "nu_list");
  c.T = get_field<double>(j, "T");
  c.cfl = get_field<double>(j, "cfl");
  c.t0_cells = get_field<double>(j, "t0_cells");
  const json init = get_field<json>(j, "initial");
  c.amplitude = get_field<double>(init, "amplitude");
  c.rho = get_field<double>(init, "rho");
  c.center = get_point(init, "center");
  c.z0 = get_point(init, "z0");
  c.clearance = get_field<double>(init, "clearance");
  c.snapshots = get_field<int>(j, "snapshots");
  const json thr = get_field<json>(j, "thresholds");
  c.eps_supp_rel = get_field<double>(thr, "eps_supp_rel");
  c.r_cut = get_field<double>(thr, "r_cut");
  c.r_mask_cells = get_field<double>(thr, "r_mask_cells");
  c.d_min = get_field<double>(thr, "d_min");
  const json rad = get_field<json>(j, "radial_solver");
  c.radial_r_max = get_field<double>(rad, "r_max");
  c.radial_nodes = get_field<int>(rad, "nodes");
  c.output_dir = get_field<std::string>(j, "output_dir");
  c.threads = get_field<int>(j, "threads");
  validate_config(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

void save_config(const RunConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_config: cannot open " + path);
  out << config_to_json(cfg);
}

void validate_config(const RunConfig& c) {
  auto fail = [](const std::string& m) { throw std::invalid_argument("config: " + m); };
  try {
    Grid2D g(c.L, c.N);
    (void)g;
  } catch (const std::exception& e) {
    fail(std::string("grid: ") + e.what());
  }
  try {
    Grid2D g(c.xi_L, c.xi_N);
    (void)g;
  } catch (const std::exception& e) {
    fail(std::string("xi_grid: ") + e.what());
  }
  if (c.nu_list.empty()) fail("nu_list: must not be empty");
  for (double nu : c.nu_list)
    if (!(nu > 0.0)) fail("nu_list: viscosities must be positive");
  if (!(c.T > 0.0)) fail("T: must be positive");
  if (!(c.cfl > 0.0 && c.cfl <= 1.0)) fail("cfl: must lie in (0, 1]");
  if (!(c.t0_cells >= 4.0)) fail("t0_cells: must be >= 4 so the initial core is resolved");
  if (c.snapshots < 1) fail("snapshots: must be >= 1");
  if (!(c.rho > 0.0)) fail("initial.rho: must be positive");
  if (!(c.clearance > 0.0)) fail("initial.clearance: must be positive");
  if (!(c.eps_supp_rel > 0.0)) fail("thresholds.eps_supp_rel: must be positive");
  if (!(c.r_cut > 0.0 && c.r_cut <= 0.5 * c.xi_L))
    fail("thresholds.r_cut: must lie in (0, xi_L/2]");
  if (!(c.r_mask_cells >= 1.0)) fail("thresholds.r_mask_cells: must be >= 1");
  if (!(c.d_min > 0.0)) fail("thresholds.d_min: must be positive");
  if (c.radial_nodes < 64) fail("radial_solver.nodes: must be >= 64");
  if (!(c.radial_r_max > 0.0)) fail("radial_solver.r_max: must be positive");
  if (c.threads < 1) fail("threads: must be >= 1");

  // support margin for the free-space solve
  const double extent = std::max(std::abs(c.center[0]), std::abs(c.center[1])) + c.rho;
  if (extent > 0.25 * c.L)
    fail("initial: bump support reaches within L/4 of the boundary");
  const Point d = c.center - c.z0;
  if (norm(d) - c.rho < c.clearance)
    fail("initial: omega0_e does not vanish within 'clearance' of z0");
  // every nu must leave a usable window [t0, T]
  for (double nu : c.nu_list)
    if (c.t0_for(nu) >= c.T)
      fail("nu_list: t0(nu) = " + std::to_string(c.t0_for(nu)) +
           " leaves no window before T for nu = " + std::to_string(nu));
}

}  // namespace vlab
