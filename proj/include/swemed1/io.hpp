#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "swemed1/config.hpp"
#include "swemed1/solver.hpp"
#include "swemed1/stability.hpp"

namespace swemed1 {

/// Columns x,h,u_m,alpha_1,c_m,h_b,EQ1 with EQ1 = |u_m| + |alpha_1|.
void write_snapshot_csv(std::ostream& os, const Snapshot& s);

/// Columns t,EQ1_max,total_surface,total_sediment,total_momentum.
void write_timeseries_csv(std::ostream& os, const std::vector<Diagnostics>& series);

/// Columns xi,Re,Im with one row per eigenvalue.
void write_spectrum_csv(std::ostream& os, const SpectralScan& scan);

/// "snapshot_t<time>.csv" with the time printed in shortest form.
std::string snapshot_file_name(double t);

std::string report_to_json(const StabilityReport& r);

/// Run summary: configuration, step counts, Newton statistics and the
/// velocity profile at the probe cell for every snapshot.
std::string run_summary_json(const SimulationConfig& c, const RunResult& r);

/**
 * Writes every snapshot CSV, timeseries.csv and summary.json into `dir`
 * (created if missing) and returns the paths written. I/O failures throw
 * ValidationError naming the path.
 */
std::vector<std::filesystem::path> write_run_outputs(const std::filesystem::path& dir, const SimulationConfig& c,
                                                     const RunResult& r);

}  // namespace swemed1
