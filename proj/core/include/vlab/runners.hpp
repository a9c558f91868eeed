#pragma once

#include <string>
#include <vector>

#include "vlab/approx_system.hpp"
#include "vlab/config.hpp"
#include "vlab/navier_stokes.hpp"
#include "vlab/vortex_wave.hpp"

namespace vlab {

// Deterministic "%.17g" CSV writer so reference-mode outputs are
// byte-reproducible.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  ~CsvWriter();
  void row(const std::vector<double>& values);

 private:
  void* file_;
};

std::string format_double(double v);

// Common snapshot grid k T / snapshots, k = 1..snapshots.
std::vector<double> snapshot_times(const RunConfig& cfg);

ScalarField initial_bump(const RunConfig& cfg);

// Standalone runs behind the simulate-* subcommands; each writes its CSV
// series and (optionally) field snapshots under out_dir.
void run_ns_cli(const RunConfig& cfg, double nu, const std::string& out_dir, bool snapshots);
void run_vw_cli(const RunConfig& cfg, const std::string& out_dir, bool snapshots);
void run_avw_cli(const RunConfig& cfg, double nu, const std::string& out_dir, bool snapshots);

}  // namespace vlab
