#pragma once

#include <iosfwd>
#include <string>

#include "taunet/config.hpp"

namespace taunet {

inline constexpr const char* kVersion = "0.1.0";

/// Simulates the configured network and writes trajectory.csv, fluxes.csv,
/// staging.json, mass_error.csv and manifest.json into the output directory.
/// Returns 0 on success; on failure the manifest records the error.
int cmd_run(const RunConfig& cfg, std::ostream& log);

/// Runs the cartesian product of the configured sweep grids, one run
/// directory per point plus a combined summary.csv. Per-point failures are
/// recorded without aborting the sweep; the exit code is nonzero if any
/// point failed. Throws ValidationError for an empty or oversized grid.
int cmd_sweep(const RunConfig& cfg, std::ostream& log);

/// Relaxes the transient single-edge solver on a closed edge, solves the
/// steady profile for the relaxed boundary values, and writes profiles.csv
/// plus validation.json with their relative differences.
int cmd_validate_edge(const RunConfig& cfg, std::ostream& log);

/// Renders per-region line charts (with and without the seed) and an
/// arrival-ordered heatmap from a finished run directory.
int cmd_plot(const std::string& run_dir, std::ostream& log);

/// Writes the configured synthetic connectome as a CSV pair.
int cmd_synth_graph(const RunConfig& cfg, const std::string& weights_out,
                    const std::string& nodes_out, std::ostream& log);

}  // namespace taunet
