#pragma once

#include <vector>

#include "taunet/edge_model.hpp"

namespace taunet {

struct ShootingOptions {
    double tolerance = 1.0e-10;
    bool relative = true;   ///< scale tolerance by max(1, |left|, |right|)
    int max_iterations = 200;

    double effective(double left, double right) const {
        if (!relative) return tolerance;
        double scale = 1.0;
        if (left > scale) scale = left;
        if (right > scale) scale = right;
        return tolerance * scale;
    }
};

/// Precomputed per-interval coefficients of an edge mesh. Every edge of a
/// network shares one geometry and parameter set, so solvers accept this
/// once-built form; the geometry-based overloads below build it on the fly.
struct EdgeDiscretization {
    EdgeDiscretization(const EdgeGeometry& geom, const EdgeParams& params);

    EdgeGeometry geometry;
    EdgeParams params;
    std::vector<double> dx;              ///< interval widths
    std::vector<double> diff;            ///< interval diffusivities
    std::vector<double> step_over_diff;  ///< dx / diffusivity
    std::vector<unsigned char> advective;
    std::vector<unsigned char> cleft;

    std::size_t intervals() const { return dx.size(); }
};

/// Steady-state densities on an edge. The insoluble values hold the kinetic
/// equilibrium of the soluble profile outside the cleft; strictly inside the
/// cleft they are zero.
struct EdgeProfile {
    std::vector<double> soluble;
    std::vector<double> insoluble;
    double flux = 0.0;            ///< the constant total flux along the edge
    double residual = 0.0;        ///< max defect of discrete flux constancy
    double left_value = 0.0;
    double right_value = 0.0;
};

/// Solves the steady two-point boundary-value problem by shooting on the
/// scalar flux. The forward recurrence marches from the left boundary value;
/// a bracketed secant (Illinois regula falsi with bisection fallback) drives
/// the right endpoint onto the imposed value. Trial integrations that push
/// the density negative are rejected and treated as an over-large flux when
/// shrinking the bracket. An optional flux hint warm-starts the bracket.
EdgeProfile solve_profile(double left_value, double right_value, const EdgeDiscretization& disc,
                          const ShootingOptions& opt = {}, const double* flux_hint = nullptr);
EdgeProfile solve_profile(double left_value, double right_value, const EdgeGeometry& geom,
                          const EdgeParams& p, const ShootingOptions& opt = {},
                          const double* flux_hint = nullptr);

enum class BoundarySide { Left, Right };

/// Sensitivity of an edge profile to one boundary value. `values` solves the
/// linearized flux equation with boundary data (1,0) (Left) or (0,1) (Right);
/// `flux_sensitivity` is its integration constant, which equals the
/// derivative of the profile flux with respect to that boundary value.
struct LinearizedProfile {
    std::vector<double> values;
    double flux_sensitivity = 0.0;
};

/// The linearized problem is linear in (values, constant); it is solved
/// exactly by superposing two trial integrations, no iteration involved.
LinearizedProfile solve_linearized(const EdgeProfile& profile, BoundarySide side,
                                   const EdgeDiscretization& disc);
LinearizedProfile solve_linearized(const EdgeProfile& profile, BoundarySide side,
                                   const EdgeGeometry& geom, const EdgeParams& p);

/// Same, for arbitrary boundary data (left_value, right_value).
LinearizedProfile solve_linearized(const EdgeProfile& profile, double left_value,
                                   double right_value, const EdgeDiscretization& disc);
LinearizedProfile solve_linearized(const EdgeProfile& profile, double left_value,
                                   double right_value, const EdgeGeometry& geom,
                                   const EdgeParams& p);

/// Mass-feedback coefficient of the edge with respect to one boundary: the
/// trapezoidal integral of q over the whole edge plus the integral of
/// g'(n) q over the compartments where the insoluble species lives, scaled
/// by the connectivity weight.
double mass_coefficient(const EdgeProfile& profile, const LinearizedProfile& q,
                        double edge_weight, const EdgeDiscretization& disc);
double mass_coefficient(const EdgeProfile& profile, const LinearizedProfile& q,
                        double edge_weight, const EdgeGeometry& geom, const EdgeParams& p);

/// Total tau mass held by the edge: trapezoidal integral of soluble plus
/// insoluble density times the connectivity weight. Cleft intervals carry no
/// insoluble mass.
double edge_mass(const EdgeProfile& profile, double edge_weight, const EdgeGeometry& geom);

/// Diffusive series resistance of the mesh: sum of interval length over
/// interval diffusivity. With no advection the steady flux is exactly
/// (left - right) / resistance.
double diffusion_resistance(const EdgeGeometry& geom, const EdgeParams& p);

}  // namespace taunet
