#pragma once

#include <optional>
#include <span>
#include <vector>

#include "taunet/edge_model.hpp"

namespace taunet {

struct DirichletValues {
    double left = 0.0;
    double right = 0.0;
};

struct TransientOptions {
    double timescale_ratio = 1.0e-3;  ///< ratio of slow to fast dynamics (small, > 0)
    double dt = 0.0;                  ///< fast-time step; 0 selects the stable step
    double t_end = 0.0;               ///< fast-time horizon
    std::optional<DirichletValues> dirichlet;  ///< empty: closed edge (zero-flux ends)
    double settle_tol = 0.0;  ///< >0: stop early once the relative profile change per
                              ///< check window drops below this
    int record_stride = 0;    ///< record every n-th step; 0 records only the final state
};

struct TransientFrame {
    double time = 0.0;
    std::vector<double> soluble;
    std::vector<double> insoluble;
};

struct TransientResult {
    std::vector<TransientFrame> frames;  ///< recorded frames, final state last
    double dt = 0.0;
    long long steps = 0;
    bool settled = false;
};

/// Largest explicit time step that keeps the scheme stable: a diffusive
/// bound with safety factor 0.4 plus an advective bound for soluble
/// densities up to max_soluble.
double stable_dt(const EdgeGeometry& geom, const EdgeParams& p, double timescale_ratio,
                 double max_soluble);

/// Time-dependent two-species solve on one edge: finite-volume fluxes with
/// central diffusion and donor-cell upwind advection, explicit stepping of
/// both species. Conversion between the species acts everywhere except
/// strictly inside the cleft, where the insoluble density is pinned to zero.
/// Aborts with SolveError on blow-up or loss of nonnegativity.
TransientResult simulate_edge(std::vector<double> soluble0, std::vector<double> insoluble0,
                              const TransientOptions& opt, const EdgeGeometry& geom,
                              const EdgeParams& p);

/// One-sided second-order estimates of the diffusive boundary fluxes
/// (-D n_x) at the left and right ends of the edge.
std::pair<double, double> boundary_fluxes(std::span<const double> soluble,
                                          const EdgeGeometry& geom, const EdgeParams& p);

/// Finite-volume mass of a profile pair: sum of cell volumes times densities.
double profile_mass(std::span<const double> soluble, std::span<const double> insoluble,
                    const EdgeGeometry& geom);

}  // namespace taunet
