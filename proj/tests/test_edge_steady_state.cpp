#include <doctest.h>

#include <cmath>

#include "taunet/edge_steady_state.hpp"
#include "taunet/util.hpp"

using namespace taunet;

namespace {

EdgeGeometry test_geometry() {
    return EdgeGeometry::make(20.0, 40.0, 1040.0, 1060.0, 1080.0, {8, 6, 60, 6, 8});
}

EdgeParams pure_diffusion_params() {
    EdgeParams p;
    p.antero_boost = 0.0;
    p.antero_knockdown = 0.0;  // equal motor speeds make the net velocity vanish
    return p;
}

/// Series resistance from the compartment lengths, independently of the mesh.
double segment_resistance(const EdgeGeometry& g, const EdgeParams& p) {
    return g.ais_begin / p.diffusivity +
           (g.axon_begin - g.ais_begin) / (p.ais_barrier * p.diffusivity) +
           (g.cleft_begin - g.axon_begin) / (p.diffusing_fraction * p.diffusivity) +
           (g.postsyn_begin - g.cleft_begin) / (p.cleft_barrier * p.diffusivity) +
           (g.length - g.postsyn_begin) / p.diffusivity;
}

EdgeParams anterograde_params() {
    EdgeParams p;  // defaults: boost 100, knockdown 10, frag 1e-5, agg 0.001
    return p;
}

}  // namespace

TEST_SUITE("edge_steady_state") {

TEST_CASE("zero boundary data gives the zero profile") {
    const EdgeGeometry geom = test_geometry();
    const EdgeProfile prof = solve_profile(0.0, 0.0, geom, anterograde_params());
    CHECK(prof.flux == 0.0);
    CHECK(prof.residual == 0.0);
    for (double v : prof.soluble) CHECK(v == 0.0);
    for (double v : prof.insoluble) CHECK(v == 0.0);
}

TEST_CASE("pure diffusion reproduces the series-resistance flux") {
    const EdgeGeometry geom = test_geometry();

    SUBCASE("random diffusivity patterns") {
        Rng rng(31);
        for (int i = 0; i < 20; ++i) {
            EdgeParams p = pure_diffusion_params();
            p.diffusivity = rng.uniform(1.0, 20.0);
            p.diffusing_fraction = rng.uniform(0.3, 1.0);
            p.ais_barrier = rng.uniform(0.003, 0.9);
            p.cleft_barrier = rng.uniform(0.003, 0.9);
            const double left = rng.uniform(0.0, 0.05);
            const double right = rng.uniform(0.0, 0.05);
            if (std::abs(left - right) < 1e-3) continue;
            const double expected = (left - right) / segment_resistance(geom, p);
            const EdgeProfile prof = solve_profile(left, right, geom, p);
            CHECK(prof.flux == doctest::Approx(expected).epsilon(1e-8));
        }
    }

    SUBCASE("unit diffusivity over a unit edge carries unit flux") {
        const EdgeGeometry unit = EdgeGeometry::make(0.2, 0.4, 0.6, 0.8, 1.0, {4, 4, 4, 4, 4});
        EdgeParams p = pure_diffusion_params();
        p.diffusivity = 1.0;
        p.diffusing_fraction = 1.0;
        p.ais_barrier = 1.0 - 1e-12;
        p.cleft_barrier = 1.0 - 1e-12;
        const EdgeProfile prof = solve_profile(1.0, 0.0, unit, p);
        CHECK(prof.flux == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("boundary data is honored and the anterograde flux beats diffusion") {
    const EdgeGeometry geom = test_geometry();
    const EdgeParams p = anterograde_params();
    const EdgeProfile prof = solve_profile(0.02, 0.0, geom, p);
    const ShootingOptions opt;
    const double tol = opt.effective(0.02, 0.0);
    CHECK(prof.soluble.front() == 0.02);
    CHECK(std::abs(prof.soluble.back()) <= tol);
    CHECK(prof.flux > 0.02 / segment_resistance(geom, p));
    for (double v : prof.soluble) CHECK(v >= -10.0 * tol);
    // Insoluble values hold the kinetic equilibrium outside the cleft.
    const std::size_t mid_cleft = (geom.boundary[2] + geom.boundary[3]) / 2;
    CHECK(prof.insoluble[mid_cleft] == 0.0);
    CHECK(prof.insoluble[1] == equilibrium_insoluble(prof.soluble[1], p));
}

TEST_CASE("flux constancy holds at the discrete level") {
    // Full default resolution: strong knockdown draws need the capture layer
    // at the axon entry resolved.
    const EdgeGeometry geom = EdgeGeometry::make_default();
    const ShootingOptions opt;
    Rng rng(41);
    for (int i = 0; i < 15; ++i) {
        EdgeParams p = anterograde_params();
        p.antero_boost = rng.uniform(0.0, 150.0);
        p.antero_knockdown = rng.uniform(0.0, 120.0);
        const double left = rng.uniform(0.0, 0.03);
        const double right = rng.uniform(0.0, 0.03);
        const EdgeProfile prof = solve_profile(left, right, geom, p, opt);
        CHECK(prof.residual <= 10.0 * opt.effective(left, right));
    }
}

TEST_CASE("monotone dependence and antisymmetry under pure diffusion") {
    const EdgeGeometry geom = test_geometry();
    const EdgeParams p = pure_diffusion_params();
    const ShootingOptions opt;

    double prev = -1e300;
    for (double left : {0.0, 0.005, 0.01, 0.02, 0.04}) {
        const double flux = solve_profile(left, 0.01, geom, p, opt).flux;
        CHECK(flux > prev);
        prev = flux;
    }
    prev = 1e300;
    for (double right : {0.0, 0.005, 0.01, 0.02, 0.04}) {
        const double flux = solve_profile(0.01, right, geom, p, opt).flux;
        CHECK(flux < prev);
        prev = flux;
    }

    const double resistance = segment_resistance(geom, p);
    for (auto [a, b] : {std::pair{0.03, 0.01}, {0.02, 0.0}, {0.011, 0.01}}) {
        const double fwd = solve_profile(a, b, geom, p, opt).flux;
        const double bwd = solve_profile(b, a, geom, p, opt).flux;
        CHECK(std::abs(fwd + bwd) <= 4.0 * opt.effective(a, b) / resistance);
    }
}

TEST_CASE("mesh refinement converges at first order") {
    const EdgeParams p = anterograde_params();
    auto flux_on = [&](int scale) {
        const EdgeGeometry geom = EdgeGeometry::make(
            20.0, 40.0, 1040.0, 1060.0, 1080.0,
            {4 * scale, 3 * scale, 25 * scale, 3 * scale, 4 * scale});
        return solve_profile(0.02, 0.005, geom, p).flux;
    };
    const double j1 = flux_on(1), j2 = flux_on(2), j4 = flux_on(4);
    const double d1 = std::abs(j1 - j2), d2 = std::abs(j2 - j4);
    CHECK(d1 / d2 > 1.4);
    CHECK(d1 / d2 < 2.8);
}

TEST_CASE("identical inputs give bit-identical outputs") {
    const EdgeGeometry geom = test_geometry();
    const EdgeParams p = anterograde_params();
    const EdgeProfile a = solve_profile(0.02, 0.003, geom, p);
    const EdgeProfile b = solve_profile(0.02, 0.003, geom, p);
    CHECK(a.flux == b.flux);
    CHECK(a.soluble == b.soluble);
    CHECK(a.insoluble == b.insoluble);
}

TEST_CASE("warm-start hints do not change the solution") {
    const EdgeGeometry geom = test_geometry();
    const EdgeParams p = anterograde_params();
    const EdgeProfile cold = solve_profile(0.02, 0.003, geom, p);

    for (double factor : {1.0, 0.5, 100.0, -1.0}) {
        const double hint = cold.flux * factor;
        const EdgeProfile warm = solve_profile(0.02, 0.003, geom, p, {}, &hint);
        CHECK(warm.flux == doctest::Approx(cold.flux).epsilon(1e-6));
    }
}

TEST_CASE("boundary data outside the admissible range is rejected") {
    const EdgeGeometry geom = test_geometry();
    EdgeParams p;
    p.frag_rate = 1.0;
    p.agg_soluble = 0.5;
    p.agg_cross = 1.0;  // admissible soluble range ends at 0.99
    CHECK_THROWS_AS(solve_profile(1.5, 0.0, geom, p), DomainError);
    CHECK_THROWS_AS(solve_profile(-0.1, 0.0, geom, p), DomainError);
}

TEST_CASE("under-resolved knockdown walls are refused, not clamped") {
    // Strong insoluble knockdown at these densities makes the axon-entry
    // capture layer thinner than this coarse mesh; no nonnegative discrete
    // profile exists and the solver must say so.
    const EdgeGeometry coarse =
        EdgeGeometry::make(20.0, 40.0, 1040.0, 1060.0, 1080.0, {8, 6, 60, 6, 8});
    EdgeParams p;
    p.antero_boost = 105.8627371616172;
    p.antero_knockdown = 86.55852995696856;
    CHECK_THROWS_AS(
        solve_profile(0.010780079749450512, 0.022579653250867675, coarse, p), SolveError);

    // The same boundary pair solves once the mesh resolves the layer.
    const EdgeProfile prof =
        solve_profile(0.010780079749450512, 0.022579653250867675, EdgeGeometry::make_default(), p);
    CHECK(prof.residual <= 10.0 * ShootingOptions{}.effective(0.011, 0.023));
}

TEST_CASE("linearized solve: analytic profile on uniform diffusivity") {
    const EdgeGeometry unit = EdgeGeometry::make(0.2, 0.4, 0.6, 0.8, 1.0, {4, 4, 8, 4, 4});
    EdgeParams p = pure_diffusion_params();
    p.diffusivity = 1.0;
    p.diffusing_fraction = 1.0;
    p.ais_barrier = 1.0 - 1e-12;
    p.cleft_barrier = 1.0 - 1e-12;
    p.agg_soluble = 0.0;  // no insoluble feedback

    const EdgeProfile prof = solve_profile(0.5, 0.5, unit, p);
    const LinearizedProfile left = solve_linearized(prof, BoundarySide::Left, unit, p);
    const LinearizedProfile right = solve_linearized(prof, BoundarySide::Right, unit, p);

    CHECK(left.values.front() == 1.0);
    CHECK(left.values.back() == 0.0);
    CHECK(right.values.front() == 0.0);
    CHECK(right.values.back() == 1.0);

    for (std::size_t k = 0; k < unit.node_count(); ++k) {
        const double x = unit.nodes[k];
        CHECK(left.values[k] == doctest::Approx(1.0 - x).epsilon(1e-9));
        CHECK(right.values[k] == doctest::Approx(x).epsilon(1e-9));
    }
    // Unit resistance: unit flux gain from the left boundary value.
    CHECK(left.flux_sensitivity == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(right.flux_sensitivity == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("flux sensitivity equals the finite-difference flux derivative") {
    const EdgeGeometry geom = test_geometry();
    const EdgeParams p = anterograde_params();
    ShootingOptions tight;
    tight.tolerance = 1e-13;

    const double left = 0.02, right = 0.004;
    const EdgeProfile prof = solve_profile(left, right, geom, p, tight);
    const LinearizedProfile q_left = solve_linearized(prof, BoundarySide::Left, geom, p);
    const LinearizedProfile q_right = solve_linearized(prof, BoundarySide::Right, geom, p);

    const double h = 1e-7;
    const double dj_left = (solve_profile(left + h, right, geom, p, tight).flux -
                            solve_profile(left - h, right, geom, p, tight).flux) /
                           (2.0 * h);
    const double dj_right = (solve_profile(left, right + h, geom, p, tight).flux -
                             solve_profile(left, right - h, geom, p, tight).flux) /
                            (2.0 * h);
    CHECK(q_left.flux_sensitivity == doctest::Approx(dj_left).epsilon(1e-4));
    CHECK(q_right.flux_sensitivity == doctest::Approx(dj_right).epsilon(1e-4));
}

TEST_CASE("superposition reconstructs arbitrary boundary data") {
    const EdgeGeometry geom = test_geometry();
    Rng rng(53);
    for (int i = 0; i < 8; ++i) {
        EdgeParams p = anterograde_params();
        p.antero_boost = rng.uniform(0.0, 150.0);
        const EdgeProfile prof =
            solve_profile(rng.uniform(0.0, 0.03), rng.uniform(0.0, 0.03), geom, p);
        const LinearizedProfile q_left = solve_linearized(prof, BoundarySide::Left, geom, p);
        const LinearizedProfile q_right = solve_linearized(prof, BoundarySide::Right, geom, p);
        const double a = rng.uniform(-1.0, 1.0);
        const double b = rng.uniform(-1.0, 1.0);
        const LinearizedProfile combo = solve_linearized(prof, a, b, geom, p);
        for (std::size_t k = 0; k < combo.values.size(); ++k) {
            const double expected = a * q_left.values[k] + b * q_right.values[k];
            CHECK(std::abs(combo.values[k] - expected) <= 1e-10);
        }
    }
}

TEST_CASE("mass coefficient quadrature") {
    SUBCASE("zero sensitivity gives zero mass coefficient") {
        const EdgeGeometry geom = test_geometry();
        const EdgeParams p = anterograde_params();
        const EdgeProfile prof = solve_profile(0.01, 0.01, geom, p);
        LinearizedProfile q;
        q.values.assign(geom.node_count(), 0.0);
        CHECK(mass_coefficient(prof, q, 0.7, geom, p) == 0.0);
    }

    SUBCASE("linear sensitivity over a unit edge integrates to half the length") {
        const EdgeGeometry unit = EdgeGeometry::make(0.2, 0.4, 0.6, 0.8, 1.0, {4, 4, 8, 4, 4});
        EdgeParams p = pure_diffusion_params();
        p.diffusivity = 1.0;
        p.diffusing_fraction = 1.0;
        p.ais_barrier = 1.0 - 1e-12;
        p.cleft_barrier = 1.0 - 1e-12;
        p.agg_soluble = 0.0;
        const EdgeProfile prof = solve_profile(0.0, 0.0, unit, p);
        const LinearizedProfile q = solve_linearized(prof, BoundarySide::Left, unit, p);
        CHECK(mass_coefficient(prof, q, 1.0, unit, p) == doctest::Approx(0.5).epsilon(1e-12));
    }

    SUBCASE("trapezoid error shrinks fourfold under mesh refinement") {
        // Fabricated smooth data with a known integral, no solver involved.
        EdgeParams p;
        p.frag_rate = 1.0;
        p.agg_soluble = 0.003;
        p.agg_cross = 0.0;
        auto coefficient_on = [&](int scale) {
            const EdgeGeometry geom = EdgeGeometry::make(
                0.2, 0.4, 0.6, 0.8, 1.0, {2 * scale, 2 * scale, 4 * scale, 2 * scale, 2 * scale});
            EdgeProfile prof;
            LinearizedProfile q;
            prof.soluble.resize(geom.node_count());
            prof.insoluble.assign(geom.node_count(), 0.0);
            q.values.resize(geom.node_count());
            for (std::size_t k = 0; k < geom.node_count(); ++k) {
                const double x = geom.nodes[k];
                prof.soluble[k] = 0.2 + 0.1 * x;     // g'(n(x)) = 0.006 (0.2 + 0.1 x)
                q.values[k] = std::sin(3.0 * x);
            }
            return mass_coefficient(prof, q, 1.0, geom, p);
        };
        // integral of sin(3x) over [0,1] plus integral of g'(n(x)) sin(3x)
        // over [0, 0.6] and [0.8, 1].
        auto antiderivative_plain = [](double x) { return -std::cos(3.0 * x) / 3.0; };
        auto antiderivative_weighted = [](double x) {
            // integral of 0.006 (0.2 + 0.1 x) sin(3x)
            const double c = -0.006 * (0.2 + 0.1 * x) * std::cos(3.0 * x) / 3.0;
            return c + 0.0006 * std::sin(3.0 * x) / 9.0;
        };
        const double exact = (antiderivative_plain(1.0) - antiderivative_plain(0.0)) +
                             (antiderivative_weighted(0.6) - antiderivative_weighted(0.0)) +
                             (antiderivative_weighted(1.0) - antiderivative_weighted(0.8));
        const double coarse = std::abs(coefficient_on(2) - exact);
        const double fine = std::abs(coefficient_on(4) - exact);
        CHECK(coarse / fine > 3.0);
        CHECK(coarse / fine < 5.0);
    }
}

TEST_CASE("edge mass quadrature") {
    SUBCASE("zero profile has zero mass") {
        const EdgeGeometry geom = test_geometry();
        const EdgeProfile prof = solve_profile(0.0, 0.0, geom, anterograde_params());
        CHECK(edge_mass(prof, 3.0, geom) == 0.0);
    }

    SUBCASE("constant soluble density over a unit edge") {
        const EdgeGeometry unit = EdgeGeometry::make(0.2, 0.4, 0.6, 0.8, 1.0, {2, 2, 2, 2, 2});
        EdgeProfile prof;
        prof.soluble.assign(unit.node_count(), 1.0);
        prof.insoluble.assign(unit.node_count(), 0.0);
        CHECK(edge_mass(prof, 2.0, unit) == doctest::Approx(2.0).epsilon(1e-14));
    }

    SUBCASE("matches the analytic integral under refinement") {
        auto mass_on = [&](int scale) {
            const EdgeGeometry geom = EdgeGeometry::make(
                0.2, 0.4, 0.6, 0.8, 1.0, {2 * scale, 2 * scale, 4 * scale, 2 * scale, 2 * scale});
            EdgeProfile prof;
            prof.soluble.resize(geom.node_count());
            prof.insoluble.assign(geom.node_count(), 0.0);
            for (std::size_t k = 0; k < geom.node_count(); ++k) {
                prof.soluble[k] = std::sin(2.0 * geom.nodes[k]) + 1.0;
            }
            return edge_mass(prof, 1.0, geom);
        };
        const double exact = 1.0 + (1.0 - std::cos(2.0)) / 2.0;
        const double coarse = std::abs(mass_on(2) - exact);
        const double fine = std::abs(mass_on(4) - exact);
        CHECK(coarse / fine > 3.0);
        CHECK(coarse / fine < 5.0);
    }
}

TEST_CASE("diffusion resistance matches the segment closed form") {
    const EdgeGeometry geom = test_geometry();
    EdgeParams p;
    CHECK(diffusion_resistance(geom, p) ==
          doctest::Approx(segment_resistance(geom, p)).epsilon(1e-12));
}

}  // TEST_SUITE
