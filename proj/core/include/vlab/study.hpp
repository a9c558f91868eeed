#pragma once

#include <string>

#include "vlab/config.hpp"
#include "vlab/diagnostics.hpp"

namespace vlab {

// Runs the vortex-wave reference once, then the approximate system and the
// Navier-Stokes solution for every viscosity, computes the metric series,
// fits the rates and writes per-run CSVs plus the JSON report under
// cfg.output_dir.  A failing viscosity is recorded and skipped.
ConvergenceReport run_convergence_study(const RunConfig& cfg);

void emit_report(const ConvergenceReport& report, const std::string& path);
ConvergenceReport load_report(const std::string& path);
bool report_equal(const ConvergenceReport& a, const ConvergenceReport& b);

// Refit slopes/flags from metric CSVs previously written by the study.
ConvergenceReport refit_from_directory(const RunConfig& cfg, const std::string& dir);

}  // namespace vlab
