#include "taunet/edge_transient.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace taunet {

namespace {

struct Discretization {
    std::vector<double> dx;          // interval widths
    std::vector<double> diff;        // interval diffusivities
    std::vector<unsigned char> adv;  // interval inside the axon
    std::vector<double> volume;      // dual-cell volumes per node
    std::vector<unsigned char> react;

    explicit Discretization(const EdgeGeometry& geom, const EdgeParams& p) {
        const std::size_t m = geom.interval_count();
        dx.resize(m);
        diff.resize(m);
        adv.resize(m);
        for (std::size_t k = 0; k < m; ++k) {
            const Segment seg = geom.segment_of_interval(k);
            dx[k] = geom.nodes[k + 1] - geom.nodes[k];
            diff[k] = diffusivity_of(seg, p);
            adv[k] = seg == Segment::Axon ? 1 : 0;
        }
        volume.resize(m + 1);
        react.resize(m + 1);
        for (std::size_t k = 0; k <= m; ++k) {
            const double left = k == 0 ? 0.0 : dx[k - 1];
            const double right = k == m ? 0.0 : dx[k];
            volume[k] = 0.5 * (left + right);
            react[k] = geom.reaction_active(k) ? 1 : 0;
        }
    }
};

}  // namespace

double stable_dt(const EdgeGeometry& geom, const EdgeParams& p, double timescale_ratio,
                 double max_soluble) {
    double min_dx = geom.nodes[1] - geom.nodes[0];
    double max_diff = 0.0;
    for (std::size_t k = 0; k + 1 < geom.node_count(); ++k) {
        min_dx = std::min(min_dx, geom.nodes[k + 1] - geom.nodes[k]);
        max_diff = std::max(max_diff, diffusivity_of(geom.segment_of_interval(k), p));
    }
    double dt = 0.4 * timescale_ratio * min_dx * min_dx / (2.0 * max_diff);

    const double n = std::max(max_soluble, 0.0);
    const double speed_bound =
        p.v_antero * (1.0 + p.antero_boost * n) + p.v_retro;  // |v| <= this for m,n >= 0
    const double carried = (1.0 - p.diffusing_fraction) * speed_bound;
    if (carried > 0.0) {
        dt = std::min(dt, 0.5 * timescale_ratio * min_dx / carried);
    }
    return dt;
}

TransientResult simulate_edge(std::vector<double> soluble0, std::vector<double> insoluble0,
                              const TransientOptions& opt, const EdgeGeometry& geom,
                              const EdgeParams& p) {
    const std::size_t nodes = geom.node_count();
    if (soluble0.size() != nodes || insoluble0.size() != nodes) {
        throw ValidationError("simulate_edge: initial data does not match the mesh");
    }
    if (!(opt.timescale_ratio > 0.0)) throw ValidationError("simulate_edge: timescale_ratio must be positive");
    if (!(opt.t_end > 0.0)) throw ValidationError("simulate_edge: t_end must be positive");
    double init_max = 0.0;
    for (std::size_t k = 0; k < nodes; ++k) {
        if (!(soluble0[k] >= 0.0) || !(insoluble0[k] >= 0.0)) {
            throw ValidationError("simulate_edge: negative initial data at node " + std::to_string(k));
        }
        if (!geom.reaction_active(k) && insoluble0[k] != 0.0) {
            throw ValidationError("simulate_edge: insoluble initial data must vanish inside the cleft");
        }
        init_max = std::max(init_max, soluble0[k]);
    }
    if (opt.dirichlet) {
        if (!(opt.dirichlet->left >= 0.0) || !(opt.dirichlet->right >= 0.0)) {
            throw ValidationError("simulate_edge: negative boundary values");
        }
        soluble0.front() = opt.dirichlet->left;
        soluble0.back() = opt.dirichlet->right;
        init_max = std::max({init_max, opt.dirichlet->left, opt.dirichlet->right});
    }

    const Discretization d(geom, p);
    const double phi = opt.timescale_ratio;
    double dt = opt.dt > 0.0 ? opt.dt : stable_dt(geom, p, phi, 2.0 * init_max + 0.01);
    const long long total_steps = static_cast<long long>(std::ceil(opt.t_end / dt));

    TransientResult result;
    result.dt = dt;

    std::vector<double> n = std::move(soluble0);
    std::vector<double> m = std::move(insoluble0);
    std::vector<double> flux(nodes - 1);       // total face flux, positive rightward
    std::vector<double> reaction(nodes);
    std::vector<double> prev_n, prev_m;

    const long long settle_window = 1000;
    if (opt.settle_tol > 0.0) {
        prev_n = n;
        prev_m = m;
    }

    auto record = [&](double time) {
        result.frames.push_back({time, n, m});
    };
    if (opt.record_stride > 0) record(0.0);

    const double dt_over_phi = dt / phi;
    long long step = 0;
    for (; step < total_steps; ++step) {
        // Face fluxes: -a n_x from central differences plus donor-cell
        // advection with the face velocity averaged from the two nodes.
        for (std::size_t k = 0; k + 1 < nodes; ++k) {
            double f = -d.diff[k] * (n[k + 1] - n[k]) / d.dx[k];
            if (d.adv[k]) {
                const double v_left = transport_velocity(m[k], n[k], p);
                const double v_right = transport_velocity(m[k + 1], n[k + 1], p);
                const double v_face = 0.5 * (v_left + v_right);
                const double carried = 1.0 - p.diffusing_fraction;
                f += v_face >= 0.0 ? carried * v_left * n[k] : carried * v_right * n[k + 1];
            }
            flux[k] = f;
        }
        for (std::size_t k = 0; k < nodes; ++k) {
            reaction[k] = d.react[k] ? reaction_rate(m[k], n[k], p) : 0.0;
        }

        const bool pinned = opt.dirichlet.has_value();
        double worst = 0.0;
        for (std::size_t k = 0; k < nodes; ++k) {
            if (pinned && (k == 0 || k == nodes - 1)) {
                if (d.react[k]) m[k] -= dt_over_phi * reaction[k];
                continue;
            }
            const double in_flux = k == 0 ? 0.0 : flux[k - 1];
            const double out_flux = k == nodes - 1 ? 0.0 : flux[k];
            n[k] += dt_over_phi * ((in_flux - out_flux) / d.volume[k] + reaction[k]);
            if (d.react[k]) m[k] -= dt_over_phi * reaction[k];
            worst = std::min(worst, std::min(n[k], m[k]));
        }

        if (!(worst > -1.0e-12 * (init_max + 1.0)) || !std::isfinite(worst)) {
            throw SolveError("simulate_edge: unstable step (negative or non-finite density) at t = " +
                             format_double((step + 1) * dt) +
                             "; reduce dt below the stability bound");
        }

        if (opt.record_stride > 0 && (step + 1) % opt.record_stride == 0 && step + 1 < total_steps) {
            record((step + 1) * dt);
        }

        if (opt.settle_tol > 0.0 && (step + 1) % settle_window == 0) {
            double change = 0.0, scale = 0.0;
            for (std::size_t k = 0; k < nodes; ++k) {
                change = std::max(change, std::abs(n[k] - prev_n[k]));
                change = std::max(change, std::abs(m[k] - prev_m[k]));
                scale = std::max(scale, std::max(std::abs(n[k]), std::abs(m[k])));
            }
            if (change <= opt.settle_tol * std::max(scale, 1.0e-30)) {
                result.settled = true;
                ++step;
                break;
            }
            prev_n = n;
            prev_m = m;
        }
    }

    result.steps = step;
    result.frames.push_back({step * dt, std::move(n), std::move(m)});
    return result;
}

std::pair<double, double> boundary_fluxes(std::span<const double> soluble,
                                          const EdgeGeometry& geom, const EdgeParams& p) {
    const std::size_t k_last = geom.last_node();
    if (soluble.size() != geom.node_count() || k_last < 2) {
        throw ValidationError("boundary_fluxes: profile does not match the mesh");
    }
    const auto& x = geom.nodes;

    // Three-point one-sided first derivative on a possibly nonuniform mesh.
    auto one_sided = [](double x0, double x1, double x2, double f0, double f1, double f2) {
        const double h1 = x1 - x0;
        const double h2 = x2 - x1;
        return -f0 * (2.0 * h1 + h2) / (h1 * (h1 + h2)) + f1 * (h1 + h2) / (h1 * h2) -
               f2 * h1 / (h2 * (h1 + h2));
    };

    const double left_slope = one_sided(x[0], x[1], x[2], soluble[0], soluble[1], soluble[2]);
    // Evaluated with the points mirrored, the same formula yields the
    // derivative at the right end directly.
    const double right_slope = one_sided(x[k_last], x[k_last - 1], x[k_last - 2], soluble[k_last],
                                         soluble[k_last - 1], soluble[k_last - 2]);
    return {-p.diffusivity * left_slope, -p.diffusivity * right_slope};
}

double profile_mass(std::span<const double> soluble, std::span<const double> insoluble,
                    const EdgeGeometry& geom) {
    if (soluble.size() != geom.node_count() || insoluble.size() != geom.node_count()) {
        throw ValidationError("profile_mass: profile does not match the mesh");
    }
    double mass = 0.0;
    for (std::size_t k = 0; k < geom.node_count(); ++k) {
        const double left = k == 0 ? 0.0 : geom.nodes[k] - geom.nodes[k - 1];
        const double right = k == geom.last_node() ? 0.0 : geom.nodes[k + 1] - geom.nodes[k];
        mass += 0.5 * (left + right) * (soluble[k] + insoluble[k]);
    }
    return mass;
}

}  // namespace taunet
