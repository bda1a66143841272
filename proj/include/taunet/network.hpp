#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "taunet/connectome.hpp"
#include "taunet/edge_steady_state.hpp"

namespace taunet {

/// Per-region densities at one slow-time instant. The insoluble vector is
/// always the kinetic equilibrium of the soluble one.
struct NetworkState {
    double time = 0.0;
    std::vector<double> soluble;    ///< N_i
    std::vector<double> insoluble;  ///< M_i = g(N_i)
};

struct IntegratorOptions {
    double dt = 0.05;          ///< slow step (days)
    double t_end = 180.0;      ///< slow horizon (days)
    double flux_scale = 1.0;   ///< slow-time units of flux per fast-time unit
    int record_stride = 1;     ///< record every n-th step (the final state is always recorded)
    bool record_flows = true;  ///< keep per-edge flux tables in recorded frames
    ShootingOptions shooting{};
    int workers = 0;           ///< 0: TAUNET_WORKERS env var, then hardware concurrency
};

/// One directed edge's contribution at a recorded instant: the weighted flux
/// from src to dst and the tau mass held on the edge.
struct EdgeFlowRecord {
    std::uint32_t src = 0;
    std::uint32_t dst = 0;
    double weighted_flux = 0.0;
    double mass = 0.0;
};

struct TrajectoryFrame {
    double time = 0.0;
    std::vector<double> soluble;
    std::vector<double> insoluble;
    std::vector<EdgeFlowRecord> edge_flows;
    double total_mass = 0.0;  ///< region masses plus edge masses
};

struct Trajectory {
    std::vector<TrajectoryFrame> frames;
};

/// Sum of region volume times total density.
double node_mass(const NetworkState& state, const Connectome& conn);

/// Initial state with the given total tau at the seed regions and zero
/// elsewhere. The soluble part solves N + g(N) = seed_total by bisection so
/// the equilibrium constraint holds exactly.
NetworkState seeded_state(const Connectome& conn, const std::vector<std::size_t>& seed_indices,
                          double seed_total, const EdgeParams& p);

/// Single quasi-static Euler step: solves every edge's steady profile and
/// both boundary sensitivities, then advances each region density by the
/// flux imbalance over the volume-plus-feedback denominator. Region-level
/// reductions are order-canonical, so relabeling regions or changing the
/// worker count cannot change results.
NetworkState advance(const NetworkState& state, const Connectome& conn, const EdgeGeometry& geom,
                     const EdgeParams& p, const IntegratorOptions& opt);

/// Repeated stepping until t_end with warm-started edge solves. Records
/// frames (state plus per-edge flux table and total mass) at the stride.
Trajectory run(const NetworkState& initial, const Connectome& conn, const EdgeGeometry& geom,
               const EdgeParams& p, const IntegratorOptions& opt);

/// Total tau mass of a state: region masses plus freshly solved edge masses.
double total_mass(const NetworkState& state, const Connectome& conn, const EdgeGeometry& geom,
                  const EdgeParams& p, const ShootingOptions& shooting = {});

}  // namespace taunet
