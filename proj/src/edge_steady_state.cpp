#include "taunet/edge_steady_state.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

namespace taunet {

namespace {

enum class TrialKind { Ok, WentNegative, AboveDomain };

struct Trial {
    TrialKind kind = TrialKind::Ok;
    double residual = 0.0;       ///< end value minus imposed right value, when Ok
    std::size_t bad_index = 0;   ///< first offending node otherwise
};

/// Marches the first-order flux recurrence from the left boundary value.
/// The density at each new node is checked against a small negative floor;
/// values above the admissible soluble range surface as AboveDomain.
Trial integrate_trial(double flux, double left_value, double right_value, double negative_floor,
                      const EdgeDiscretization& disc, std::vector<double>& out) {
    const EdgeParams& p = disc.params;
    const double cap = p.soluble_cap();
    const std::size_t m = disc.intervals();
    out.resize(m + 1);
    out[0] = left_value;
    Trial t;

    if (p.agg_cross == 0.0) {
        // Division-free inner loop for the common no-cross-aggregation case;
        // the recurrence is a serial dependency chain, so latency matters.
        const double agg_over_frag = p.agg_soluble / p.frag_rate;
        const double carried = 1.0 - p.diffusing_fraction;
        for (std::size_t k = 0; k < m; ++k) {
            double drift = -flux;
            if (disc.advective[k]) {
                const double n = out[k];
                const double eq_insoluble = agg_over_frag * n * n;
                const double v = p.v_antero * (1.0 + p.antero_boost * n) *
                                     (1.0 - p.antero_knockdown * eq_insoluble) -
                                 p.v_retro;
                drift += carried * v * n;
            }
            const double next = out[k] + disc.step_over_diff[k] * drift;
            if (next < negative_floor || !std::isfinite(next)) {
                t.kind = TrialKind::WentNegative;
                t.bad_index = k + 1;
                return t;
            }
            out[k + 1] = next;
        }
        t.residual = out[m] - right_value;
        return t;
    }

    for (std::size_t k = 0; k < m; ++k) {
        double drift = -flux;
        if (disc.advective[k]) {
            const double n = out[k];
            if (n > cap) {
                t.kind = TrialKind::AboveDomain;
                t.bad_index = k;
                return t;
            }
            drift -= advection_of(Segment::Axon, n, p);
        }
        const double next = out[k] + disc.step_over_diff[k] * drift;
        if (next < negative_floor || !std::isfinite(next)) {
            t.kind = TrialKind::WentNegative;
            t.bad_index = k + 1;
            return t;
        }
        out[k + 1] = next;
    }
    t.residual = out[m] - right_value;
    return t;
}

std::string bc_text(double left, double right) {
    return "boundary (" + format_double(left) + ", " + format_double(right) + ")";
}

}  // namespace

EdgeDiscretization::EdgeDiscretization(const EdgeGeometry& geom, const EdgeParams& p)
    : geometry(geom), params(p) {
    geom.validate();
    p.validate();
    const std::size_t m = geom.interval_count();
    dx.resize(m);
    diff.resize(m);
    step_over_diff.resize(m);
    advective.resize(m);
    cleft.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        const Segment seg = geom.segment_of_interval(k);
        dx[k] = geom.nodes[k + 1] - geom.nodes[k];
        diff[k] = diffusivity_of(seg, p);
        step_over_diff[k] = dx[k] / diff[k];
        advective[k] = seg == Segment::Axon ? 1 : 0;
        cleft[k] = seg == Segment::Cleft ? 1 : 0;
    }
}

double diffusion_resistance(const EdgeGeometry& geom, const EdgeParams& p) {
    double r = 0.0;
    for (std::size_t k = 0; k < geom.interval_count(); ++k) {
        r += (geom.nodes[k + 1] - geom.nodes[k]) / diffusivity_of(geom.segment_of_interval(k), p);
    }
    return r;
}

EdgeProfile solve_profile(double left_value, double right_value, const EdgeDiscretization& disc,
                          const ShootingOptions& opt, const double* flux_hint) {
    const EdgeParams& p = disc.params;
    if (!(left_value >= 0.0) || !(right_value >= 0.0)) {
        throw DomainError("solve_profile: negative boundary data, " + bc_text(left_value, right_value));
    }
    const double cap = p.soluble_cap();
    if (left_value > cap || right_value > cap) {
        throw DomainError("solve_profile: boundary data above the admissible soluble range, " +
                          bc_text(left_value, right_value));
    }

    const double tol = opt.effective(left_value, right_value);
    const double negative_floor = -10.0 * tol;
    double resistance = 0.0;
    for (std::size_t k = 0; k < disc.intervals(); ++k) resistance += disc.step_over_diff[k];
    const double diffusive_flux = (left_value - right_value) / resistance;

    std::vector<double> scratch, accepted;
    double accepted_flux = 0.0, accepted_residual = 0.0;
    bool converged = false;

    // Tightest clean probes on either side of the root: `pos` is the largest
    // flux seen with a positive mismatch, `neg` the smallest with a negative
    // one (the clean mismatch decreases in the flux). Trials that leave the
    // integrable range never enter the bracket; they only steer the search.
    struct CleanProbe {
        double flux = 0.0;
        double residual = 0.0;
        bool valid = false;
    };
    CleanProbe pos, neg;

    constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
    auto probe = [&](double flux) {
        Trial t = integrate_trial(flux, left_value, right_value, negative_floor, disc, scratch);
        if (t.kind != TrialKind::Ok) return kNan;
        if (std::abs(t.residual) <= tol) {
            if (!converged) {
                accepted = scratch;
                accepted_flux = flux;
                accepted_residual = t.residual;
                converged = true;
            }
        } else if (t.residual > 0.0) {
            if (!pos.valid || flux > pos.flux) pos = {flux, t.residual, true};
        } else {
            if (!neg.valid || flux < neg.flux) neg = {flux, t.residual, true};
        }
        return t.residual;
    };

    // Warm-start hint when present, else the pure-diffusion flux.
    const double start = flux_hint ? *flux_hint : diffusive_flux;
    const double r_start = probe(start);

    // Fast path: plain secant. The first step uses the diffusive-resistance
    // slope only to obtain a second point; from then on the measured slope
    // drives the iteration (diffusion barriers make the true slope orders of
    // magnitude steeper than the resistance estimate). Falls back to the
    // bracketed search when an iterate leaves the integrable range or stops
    // making progress.
    if (!converged && std::isfinite(r_start)) {
        double j_prev = start, r_prev = r_start;
        double j_cur = start + r_start / resistance;
        double r_cur = probe(j_cur);
        for (int it = 0; !converged && it < 12 && std::isfinite(r_cur); ++it) {
            if (r_cur == r_prev) break;
            if (it >= 2 && !(std::abs(r_cur) < 0.9 * std::abs(r_prev))) break;
            const double j_next = j_cur - r_cur * (j_cur - j_prev) / (r_cur - r_prev);
            if (!std::isfinite(j_next)) break;
            j_prev = j_cur;
            r_prev = r_cur;
            j_cur = j_next;
            r_cur = probe(j_cur);
        }
    }

    if (!converged) {
        const double unit = std::max(
            std::abs(diffusive_flux),
            std::max(1.0, std::max(left_value, right_value)) * 1.0e-3 / resistance);

        // Seed probes: the scaled pure-diffusion flux first, then a
        // geometric sweep over magnitudes in both directions until at least
        // one clean trial exists.
        if (!pos.valid && !neg.valid) {
            for (double candidate :
                 {diffusive_flux, 0.0, diffusive_flux / 10.0, diffusive_flux * 10.0}) {
                probe(candidate);
                if (converged || pos.valid || neg.valid) break;
            }
        }
        for (int k = 0; !converged && !pos.valid && !neg.valid && k <= 20; ++k) {
            const double magnitude = unit * static_cast<double>(1 << k);
            probe(magnitude);
            if (converged || pos.valid || neg.valid) break;
            probe(-magnitude);
        }
        if (!converged && !pos.valid && !neg.valid) {
            throw SolveError("solve_profile: no integrable flux found, " +
                             bc_text(left_value, right_value));
        }

        // Walk from the known side toward the missing one. Steps double on
        // clean same-side trials and halve when a trial leaves the
        // integrable range, homing in on the far edge of the clean window.
        if (!converged && (!pos.valid || !neg.valid)) {
            const int direction = pos.valid ? +1 : -1;  // mismatch decreases in the flux
            double base = pos.valid ? pos.flux : neg.flux;
            double step = std::max(unit, std::abs(base) * 0.5);
            bool found = false;
            for (int it = 0; !converged && it < 400; ++it) {
                const double trial_flux = base + direction * step;
                const double r = probe(trial_flux);
                if (converged || (pos.valid && neg.valid)) {
                    found = true;
                    break;
                }
                if (std::isfinite(r)) {
                    base = trial_flux;
                    step *= 2.0;
                } else {
                    step *= 0.5;
                    if (step <= std::max(std::abs(base), unit) * 1.0e-15) break;
                }
            }
            if (!converged && !found) {
                throw SolveError("solve_profile: no admissible flux bracket, " +
                                 bc_text(left_value, right_value));
            }
        }

        // Illinois regula falsi on the clean bracket. Probes keep `pos` and
        // `neg` the tightest clean pair; a rare non-integrable midpoint is
        // retried closer to an endpoint.
        double ra = pos.residual, rb = neg.residual;
        int last_side = 0;
        for (int it = 0; !converged && it < opt.max_iterations; ++it) {
            const double lo = pos.flux, hi = neg.flux;
            double x = (lo * rb - hi * ra) / (rb - ra);
            if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
            double r = probe(x);
            for (int retry = 0; !converged && !std::isfinite(r) && retry < 60; ++retry) {
                x = 0.5 * (lo + x);
                if (!(x > lo && x < hi)) break;
                r = probe(x);
            }
            if (converged) break;
            if (!std::isfinite(r)) {
                throw SolveError("solve_profile: flux bracket collapsed, " +
                                 bc_text(left_value, right_value));
            }
            if (r > 0.0) {
                ra = r;
                if (last_side == 1) rb *= 0.5;
                last_side = 1;
            } else {
                rb = r;
                if (last_side == -1) ra *= 0.5;
                last_side = -1;
            }
            if (neg.flux - pos.flux <=
                (std::abs(pos.flux) + std::abs(neg.flux)) * 1.0e-17 + 1.0e-300) {
                break;
            }
        }
        if (!converged) {
            throw SolveError("solve_profile: shooting did not converge within " +
                             std::to_string(opt.max_iterations) + " iterations, " +
                             bc_text(left_value, right_value));
        }
    }

    EdgeProfile profile;
    profile.soluble = std::move(accepted);
    profile.flux = accepted_flux;
    profile.left_value = left_value;
    profile.right_value = right_value;

    const std::size_t nodes = profile.soluble.size();
    profile.insoluble.resize(nodes);
    for (std::size_t k = 0; k < nodes; ++k) {
        profile.insoluble[k] =
            disc.geometry.reaction_active(k) ? equilibrium_insoluble(profile.soluble[k], p) : 0.0;
    }

    double defect = std::abs(accepted_residual);
    for (std::size_t k = 0; k + 1 < nodes; ++k) {
        double total = disc.diff[k] * (profile.soluble[k + 1] - profile.soluble[k]) / disc.dx[k];
        if (disc.advective[k]) total += advection_of(Segment::Axon, profile.soluble[k], p);
        const double d = std::abs(total + profile.flux);
        if (d > defect) defect = d;
    }
    profile.residual = defect;
    return profile;
}

EdgeProfile solve_profile(double left_value, double right_value, const EdgeGeometry& geom,
                          const EdgeParams& p, const ShootingOptions& opt,
                          const double* flux_hint) {
    return solve_profile(left_value, right_value, EdgeDiscretization(geom, p), opt, flux_hint);
}

namespace {

LinearizedProfile superpose(const EdgeProfile& profile, double left_data, double right_data,
                            const EdgeDiscretization& disc) {
    const EdgeParams& p = disc.params;
    const std::size_t m = disc.intervals();
    if (profile.soluble.size() != m + 1) {
        throw ValidationError("solve_linearized: profile does not match the mesh");
    }

    // Two trial integrations span the solution space: `homog` starts from 1
    // with zero constant, `driven` starts from 0 with unit constant.
    std::vector<double> homog(m + 1), driven(m + 1);
    homog[0] = 1.0;
    driven[0] = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double slope =
            disc.advective[k] ? advection_slope_of(Segment::Axon, profile.soluble[k], p) : 0.0;
        const double decay = 1.0 - disc.step_over_diff[k] * slope;
        homog[k + 1] = homog[k] * decay;
        driven[k + 1] = driven[k] * decay - disc.step_over_diff[k];
    }
    const double den = driven[m];
    if (den == 0.0 || !std::isfinite(den)) {
        throw SolveError("solve_linearized: degenerate response system");
    }

    LinearizedProfile q;
    q.flux_sensitivity = (right_data - left_data * homog[m]) / den;
    q.values.resize(m + 1);
    for (std::size_t k = 0; k <= m; ++k) {
        q.values[k] = left_data * homog[k] + q.flux_sensitivity * driven[k];
    }
    // The boundary data is imposed, not approximated.
    q.values.front() = left_data;
    q.values.back() = right_data;
    return q;
}

}  // namespace

LinearizedProfile solve_linearized(const EdgeProfile& profile, BoundarySide side,
                                   const EdgeDiscretization& disc) {
    return side == BoundarySide::Left ? superpose(profile, 1.0, 0.0, disc)
                                      : superpose(profile, 0.0, 1.0, disc);
}

LinearizedProfile solve_linearized(const EdgeProfile& profile, BoundarySide side,
                                   const EdgeGeometry& geom, const EdgeParams& p) {
    return solve_linearized(profile, side, EdgeDiscretization(geom, p));
}

LinearizedProfile solve_linearized(const EdgeProfile& profile, double left_value,
                                   double right_value, const EdgeDiscretization& disc) {
    return superpose(profile, left_value, right_value, disc);
}

LinearizedProfile solve_linearized(const EdgeProfile& profile, double left_value,
                                   double right_value, const EdgeGeometry& geom,
                                   const EdgeParams& p) {
    return superpose(profile, left_value, right_value, EdgeDiscretization(geom, p));
}

double mass_coefficient(const EdgeProfile& profile, const LinearizedProfile& q,
                        double edge_weight, const EdgeDiscretization& disc) {
    const EdgeParams& p = disc.params;
    if (profile.soluble.size() != q.values.size() || q.values.size() != disc.intervals() + 1) {
        throw ValidationError("mass_coefficient: profile and sensitivity use different meshes");
    }
    double plain = 0.0;     // integral of q over the whole edge
    double feedback = 0.0;  // integral of g'(n) q outside the cleft
    for (std::size_t k = 0; k < disc.intervals(); ++k) {
        const double dx = disc.dx[k];
        plain += 0.5 * dx * (q.values[k] + q.values[k + 1]);
        if (!disc.cleft[k]) {
            const double a = equilibrium_insoluble_slope(profile.soluble[k], p) * q.values[k];
            const double b = equilibrium_insoluble_slope(profile.soluble[k + 1], p) * q.values[k + 1];
            feedback += 0.5 * dx * (a + b);
        }
    }
    return edge_weight * (plain + feedback);
}

double mass_coefficient(const EdgeProfile& profile, const LinearizedProfile& q,
                        double edge_weight, const EdgeGeometry& geom, const EdgeParams& p) {
    return mass_coefficient(profile, q, edge_weight, EdgeDiscretization(geom, p));
}

double edge_mass(const EdgeProfile& profile, double edge_weight, const EdgeGeometry& geom) {
    double mass = 0.0;
    for (std::size_t k = 0; k + 1 < profile.soluble.size(); ++k) {
        const double dx = geom.nodes[k + 1] - geom.nodes[k];
        double a = profile.soluble[k];
        double b = profile.soluble[k + 1];
        if (geom.segment_of_interval(k) != Segment::Cleft) {
            // Stored insoluble endpoint values are the limits from within
            // this interval's compartment, so the trapezoid matches the
            // feedback quadrature exactly.
            a += profile.insoluble[k];
            b += profile.insoluble[k + 1];
        }
        mass += 0.5 * dx * (a + b);
    }
    return edge_weight * mass;
}

}  // namespace taunet
