#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "taunet/connectome.hpp"
#include "taunet/network.hpp"

namespace taunet {

/// Per-region peak statistics of a trajectory.
struct RegionStaging {
    double peak_value = 0.0;
    double arrival_time = 0.0;  ///< time of the peak (earliest, on ties)
    bool unpeaked = false;      ///< the final value still equals the running peak
    int rank = 0;               ///< 1-based position in arrival order
};

struct StagingReport {
    std::vector<RegionStaging> regions;
    std::size_t seed_index = 0;
    bool half_decay_reached = false;
    double half_decay_time = 0.0;  ///< horizon end when never reached
    double final_fraction = 1.0;   ///< seed tau at the end over its initial value
};

/// Componentwise total tau of a state.
std::vector<double> total_tau(const NetworkState& state);
std::vector<double> total_tau(const TrajectoryFrame& frame);

/// Peak values, arrival times and arrival ranks per region, plus the seed
/// half-decay spread metric.
StagingReport arrival_times(const Trajectory& traj, std::size_t seed_index);

/// Pearson correlation; NaN when either side has (numerically) no variance.
double pearson(std::span<const double> a, std::span<const double> b);

/// Spearman rank correlation with average ranks on ties.
double spearman(std::span<const double> a, std::span<const double> b);

struct SeedCorrelationPoint {
    double time = 0.0;
    double with_outgoing = 0.0;  ///< corr of tau (seed excluded) with the seed's out-connectivity
    double with_incoming = 0.0;  ///< same against the in-connectivity
};

/// Correlation of the tau distribution with the seed's outgoing/incoming
/// connectivity at every recorded time. The seed region is excluded from all
/// vectors. Zero-variance instants yield NaN markers, never zero.
std::vector<SeedCorrelationPoint> correlation_with_seed(const Trajectory& traj,
                                                        const Connectome& conn,
                                                        std::size_t seed_index);

struct MassErrorPoint {
    double time = 0.0;
    double total_mass = 0.0;
    double relative_error = 0.0;
};

/// Relative total-mass drift against the first recorded frame.
std::vector<MassErrorPoint> mass_error_series(const Trajectory& traj);

/// Edges ranked by flux magnitude; returns the top ceil(fraction * count)
/// entries, signs preserved. Ties break on (src, dst).
std::vector<EdgeFlowRecord> top_flux_edges(const std::vector<EdgeFlowRecord>& flows,
                                           double fraction);

}  // namespace taunet
