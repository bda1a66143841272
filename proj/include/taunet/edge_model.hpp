#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "taunet/util.hpp"

namespace taunet {

/// The five biological compartments of the two-neuron edge system, in
/// spatial order from the presynaptic to the postsynaptic side.
enum class Segment : int {
    PresynSoma = 0,   ///< presynaptic somatodendritic compartment
    InitialSegment,   ///< axon initial segment (AIS)
    Axon,
    Cleft,            ///< synaptic cleft (SC)
    PostsynSoma,      ///< postsynaptic somatodendritic compartment
};

/// Microscopic constants of the single-edge transport model.
/// Quantities are treated as nondimensional reals; the documented units
/// (micrometers, seconds, micromolar) fix the conventional scales.
struct EdgeParams {
    double diffusivity = 12.0;         ///< soluble diffusivity (um^2/s)
    double diffusing_fraction = 0.92;  ///< fraction of soluble species diffusing rather than carried
    double v_antero = 0.7;             ///< baseline anterograde motor speed (um/s)
    double v_retro = 0.7;              ///< baseline retrograde motor speed (um/s)
    double frag_rate = 1.0e-5;         ///< insoluble -> soluble fragmentation rate (1/s)
    double agg_soluble = 0.001;        ///< soluble+soluble aggregation rate (1/(uM s))
    double agg_cross = 0.0;            ///< soluble+insoluble aggregation rate (1/(uM s))
    double antero_boost = 100.0;       ///< anterograde speed-up per unit soluble density (1/uM)
    double antero_knockdown = 10.0;    ///< anterograde slow-down per unit insoluble density (1/uM)
    double ais_barrier = 0.005;        ///< diffusivity reduction in the AIS, in (0,1)
    double cleft_barrier = 0.005;      ///< diffusivity reduction in the SC, in (0,1)

    /// Throws ValidationError if any invariant is violated.
    void validate() const;

    /// Largest admissible soluble density for the equilibrium relation.
    /// Unbounded (infinity) when agg_cross == 0; otherwise stops short of
    /// the singularity at frag_rate / agg_cross.
    double soluble_cap() const;
};

/// Compartment boundaries and the spatial mesh of an edge. All edges of a
/// network share one geometry. Mesh nodes contain every compartment boundary
/// exactly; within a compartment the spacing is uniform.
struct EdgeGeometry {
    double ais_begin = 20.0;
    double axon_begin = 40.0;
    double cleft_begin = 1040.0;
    double postsyn_begin = 1060.0;
    double length = 1080.0;

    std::vector<double> nodes;               ///< x_0 = 0 < ... < x_K = length
    std::array<std::size_t, 4> boundary{};   ///< node indices of the four interior boundaries

    /// Builds a geometry with the given boundaries and per-compartment
    /// interval counts (each must be >= 2).
    static EdgeGeometry make(double ais, double axon, double cleft, double postsyn,
                             double len, const std::array<int, 5>& cells);

    /// Shipped default: compartments (20, 40, 1040, 1060, 1080) with
    /// (40, 20, 400, 20, 40) intervals.
    static EdgeGeometry make_default();

    void validate() const;

    std::size_t node_count() const { return nodes.size(); }
    std::size_t interval_count() const { return nodes.size() - 1; }
    std::size_t last_node() const { return nodes.size() - 1; }

    /// Segment containing x; right-continuous at interior boundaries
    /// (a boundary point belongs to the segment on its right), except x =
    /// length which belongs to the postsynaptic compartment.
    Segment segment_of_point(double x) const;

    /// Segment of the interval [x_k, x_{k+1}].
    Segment segment_of_interval(std::size_t k) const;

    /// True at nodes where aggregation/fragmentation acts and the insoluble
    /// species lives: everywhere except strictly inside the cleft.
    bool reaction_active(std::size_t k) const {
        return !(k > boundary[2] && k < boundary[3]);
    }
};

[[noreturn]] void throw_equilibrium_domain_error(double soluble, const EdgeParams& p);

/// Net axonal transport speed v(m, n) of soluble tau: anterograde motion is
/// boosted by soluble and knocked down by insoluble density. May be negative.
inline double transport_velocity(double insoluble, double soluble, const EdgeParams& p) {
    return p.v_antero * (1.0 + p.antero_boost * soluble) * (1.0 - p.antero_knockdown * insoluble) -
           p.v_retro;
}

/// Net insoluble -> soluble conversion rate: fragmentation minus the two
/// aggregation channels.
inline double reaction_rate(double insoluble, double soluble, const EdgeParams& p) {
    return p.frag_rate * insoluble - p.agg_soluble * soluble * soluble -
           p.agg_cross * soluble * insoluble;
}

/// Insoluble density in kinetic equilibrium with a given soluble density
/// (the root of reaction_rate in the insoluble argument). Throws DomainError
/// within the guard margin of the singularity when agg_cross > 0.
inline double equilibrium_insoluble(double soluble, const EdgeParams& p) {
    if (p.agg_cross == 0.0) {
        return p.agg_soluble * soluble * soluble / p.frag_rate;
    }
    if (soluble > p.soluble_cap()) throw_equilibrium_domain_error(soluble, p);
    return p.agg_soluble * soluble * soluble / (p.frag_rate - p.agg_cross * soluble);
}

/// Derivative of equilibrium_insoluble with respect to the soluble density.
inline double equilibrium_insoluble_slope(double soluble, const EdgeParams& p) {
    if (p.agg_cross == 0.0) {
        return 2.0 * p.agg_soluble * soluble / p.frag_rate;
    }
    if (soluble > p.soluble_cap()) throw_equilibrium_domain_error(soluble, p);
    const double denom = p.frag_rate - p.agg_cross * soluble;
    return p.agg_soluble * soluble * (2.0 * p.frag_rate - p.agg_cross * soluble) / (denom * denom);
}

/// Soluble density whose equilibrium pair sums to `total` (bisection).
/// Zero total maps to zero; throws ValidationError when the total is not
/// reachable within the admissible soluble range.
double equilibrium_soluble_for_total(double total, const EdgeParams& p);

/// Effective diffusivity of the segment.
inline double diffusivity_of(Segment s, const EdgeParams& p) {
    switch (s) {
        case Segment::InitialSegment: return p.ais_barrier * p.diffusivity;
        case Segment::Axon: return p.diffusing_fraction * p.diffusivity;
        case Segment::Cleft: return p.cleft_barrier * p.diffusivity;
        default: return p.diffusivity;
    }
}

/// Effective diffusivity at position x.
double diffusivity_at(double x, const EdgeGeometry& g, const EdgeParams& p);

/// Advective flux contribution of the segment at equilibrium insolubility:
/// -(1-f) v(g(n), n) n inside the axon, zero elsewhere.
inline double advection_of(Segment s, double soluble, const EdgeParams& p) {
    if (s != Segment::Axon) return 0.0;
    const double m = equilibrium_insoluble(soluble, p);
    return -(1.0 - p.diffusing_fraction) * transport_velocity(m, soluble, p) * soluble;
}

/// Analytic derivative of advection_of with respect to the soluble density.
inline double advection_slope_of(Segment s, double soluble, const EdgeParams& p) {
    if (s != Segment::Axon) return 0.0;
    const double m = equilibrium_insoluble(soluble, p);
    const double v = transport_velocity(m, soluble, p);
    // d/dn of v(g(n), n): dv/dm * g'(n) + dv/dn.
    const double dv_dm = -p.v_antero * (1.0 + p.antero_boost * soluble) * p.antero_knockdown;
    const double dv_dn = p.v_antero * p.antero_boost * (1.0 - p.antero_knockdown * m);
    const double slope = dv_dm * equilibrium_insoluble_slope(soluble, p) + dv_dn;
    return -(1.0 - p.diffusing_fraction) * (v + soluble * slope);
}

/// Positional forms of the advection term and its soluble-density slope.
double advection_at(double x, double soluble, const EdgeGeometry& g, const EdgeParams& p);
double advection_slope_at(double x, double soluble, const EdgeGeometry& g, const EdgeParams& p);

}  // namespace taunet
