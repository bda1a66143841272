#include "taunet/edge_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace taunet {

void EdgeParams::validate() const {
    auto fail = [](const std::string& what) { throw ValidationError("edge params: " + what); };
    if (!(diffusivity > 0.0)) fail("diffusivity must be positive");
    if (!(diffusing_fraction >= 0.0 && diffusing_fraction <= 1.0)) fail("diffusing_fraction must lie in [0,1]");
    if (!(v_antero >= 0.0) || !(v_retro >= 0.0)) fail("motor speeds must be nonnegative");
    if (!(frag_rate > 0.0)) fail("frag_rate must be positive");
    if (!(agg_soluble >= 0.0)) fail("agg_soluble must be nonnegative");
    if (!(agg_cross >= 0.0)) fail("agg_cross must be nonnegative");
    if (!(antero_boost >= 0.0)) fail("antero_boost must be nonnegative");
    if (!(antero_knockdown >= 0.0)) fail("antero_knockdown must be nonnegative");
    if (!(ais_barrier > 0.0 && ais_barrier < 1.0)) fail("ais_barrier must lie in (0,1)");
    if (!(cleft_barrier > 0.0 && cleft_barrier < 1.0)) fail("cleft_barrier must lie in (0,1)");
}

double EdgeParams::soluble_cap() const {
    if (agg_cross == 0.0) return std::numeric_limits<double>::infinity();
    return 0.99 * frag_rate / agg_cross;
}

EdgeGeometry EdgeGeometry::make(double ais, double axon, double cleft, double postsyn,
                                double len, const std::array<int, 5>& cells) {
    EdgeGeometry g;
    g.ais_begin = ais;
    g.axon_begin = axon;
    g.cleft_begin = cleft;
    g.postsyn_begin = postsyn;
    g.length = len;

    const double starts[6] = {0.0, ais, axon, cleft, postsyn, len};
    g.nodes.clear();
    g.nodes.push_back(0.0);
    for (int seg = 0; seg < 5; ++seg) {
        const int n = cells[static_cast<std::size_t>(seg)];
        if (n < 2) throw ValidationError("edge geometry: every compartment needs at least 2 mesh intervals");
        const double a = starts[seg];
        const double b = starts[seg + 1];
        for (int i = 1; i <= n; ++i) {
            // Endpoints are exact so compartment boundaries are mesh nodes.
            g.nodes.push_back(i == n ? b : a + (b - a) * i / n);
        }
        if (seg < 4) g.boundary[static_cast<std::size_t>(seg)] = g.nodes.size() - 1;
    }
    g.validate();
    return g;
}

EdgeGeometry EdgeGeometry::make_default() {
    return make(20.0, 40.0, 1040.0, 1060.0, 1080.0, {40, 20, 400, 20, 40});
}

void EdgeGeometry::validate() const {
    auto fail = [](const std::string& what) { throw ValidationError("edge geometry: " + what); };
    if (!(0.0 < ais_begin && ais_begin < axon_begin && axon_begin < cleft_begin &&
          cleft_begin < postsyn_begin && postsyn_begin < length)) {
        fail("compartment boundaries must satisfy 0 < x1 < x2 < x3 < x4 < L");
    }
    if (nodes.size() < 11) fail("mesh too small");
    if (nodes.front() != 0.0 || nodes.back() != length) fail("mesh must span [0, L]");
    for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
        if (!(nodes[k] < nodes[k + 1])) fail("mesh must be strictly increasing");
    }
    const double bx[4] = {ais_begin, axon_begin, cleft_begin, postsyn_begin};
    for (int b = 0; b < 4; ++b) {
        const std::size_t k = boundary[static_cast<std::size_t>(b)];
        if (k >= nodes.size() || nodes[k] != bx[b]) fail("compartment boundaries must be mesh nodes");
    }
    for (int b = 0; b < 3; ++b) {
        if (boundary[static_cast<std::size_t>(b + 1)] - boundary[static_cast<std::size_t>(b)] < 2) {
            fail("every compartment needs at least 2 mesh intervals");
        }
    }
    if (boundary[0] < 2 || nodes.size() - 1 - boundary[3] < 2) {
        fail("every compartment needs at least 2 mesh intervals");
    }
}

Segment EdgeGeometry::segment_of_point(double x) const {
    if (x < 0.0 || x > length) throw DomainError("position outside [0, L]: " + format_double(x));
    if (x < ais_begin) return Segment::PresynSoma;
    if (x < axon_begin) return Segment::InitialSegment;
    if (x < cleft_begin) return Segment::Axon;
    if (x < postsyn_begin) return Segment::Cleft;
    return Segment::PostsynSoma;
}

Segment EdgeGeometry::segment_of_interval(std::size_t k) const {
    if (k < boundary[0]) return Segment::PresynSoma;
    if (k < boundary[1]) return Segment::InitialSegment;
    if (k < boundary[2]) return Segment::Axon;
    if (k < boundary[3]) return Segment::Cleft;
    return Segment::PostsynSoma;
}

void throw_equilibrium_domain_error(double soluble, const EdgeParams& p) {
    throw DomainError("soluble density " + format_double(soluble) +
                      " too close to the equilibrium singularity at " +
                      format_double(p.frag_rate / p.agg_cross));
}

double equilibrium_soluble_for_total(double total, const EdgeParams& p) {
    if (!(total >= 0.0)) throw ValidationError("total tau must be nonnegative");
    if (total == 0.0) return 0.0;
    double hi = total;
    if (p.agg_cross != 0.0) {
        hi = std::min(hi, p.soluble_cap());
        if (hi + equilibrium_insoluble(hi, p) < total) {
            throw ValidationError("total tau " + format_double(total) +
                                  " is not reachable within the admissible soluble range");
        }
    }
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid + equilibrium_insoluble(mid, p) < total) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= 1.0e-18 * total) break;
    }
    return hi;
}

double diffusivity_at(double x, const EdgeGeometry& g, const EdgeParams& p) {
    return diffusivity_of(g.segment_of_point(x), p);
}

double advection_at(double x, double soluble, const EdgeGeometry& g, const EdgeParams& p) {
    return advection_of(g.segment_of_point(x), soluble, p);
}

double advection_slope_at(double x, double soluble, const EdgeGeometry& g, const EdgeParams& p) {
    return advection_slope_of(g.segment_of_point(x), soluble, p);
}

}  // namespace taunet
