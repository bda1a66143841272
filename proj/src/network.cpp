#include "taunet/network.hpp"

#include <cmath>
#include <string>

namespace taunet {

namespace {

struct DirectedEdge {
    std::uint32_t src, dst;
    double weight;
};

struct EdgeSolution {
    double flux = 0.0;           ///< J along the edge
    double weighted_flux = 0.0;  ///< c * J, shared by both endpoint ledgers
    double feedback_src = 0.0;   ///< mass coefficient w.r.t. the source density
    double feedback_dst = 0.0;   ///< mass coefficient w.r.t. the target density
    double mass = 0.0;           ///< tau mass held on the edge
};

std::vector<DirectedEdge> list_edges(const Connectome& conn) {
    std::vector<DirectedEdge> edges;
    const std::size_t h = conn.size();
    for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = 0; j < h; ++j) {
            const double w = conn.weight(i, j);
            if (w > 0.0) {
                edges.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), w});
            }
        }
    }
    return edges;
}

void check_state(const NetworkState& state, const Connectome& conn, const EdgeParams& p) {
    const std::size_t h = conn.size();
    if (state.soluble.size() != h || state.insoluble.size() != h) {
        throw ValidationError("network state does not match the connectome size");
    }
    for (std::size_t i = 0; i < h; ++i) {
        if (!(state.soluble[i] >= 0.0)) {
            throw ValidationError("negative soluble density at region '" + conn.labels[i] + "'");
        }
        const double eq = equilibrium_insoluble(state.soluble[i], p);
        if (std::abs(state.insoluble[i] - eq) > 1.0e-10 * (1.0 + eq)) {
            throw ValidationError("insoluble density at region '" + conn.labels[i] +
                                  "' is not in kinetic equilibrium with the soluble density");
        }
    }
}

/// Shared solver machinery for a run: edge list, warm-start flux hints,
/// worker pool, and reusable term buffers.
class Stepper {
public:
    Stepper(const Connectome& conn, const EdgeGeometry& geom, const EdgeParams& p,
            const IntegratorOptions& opt)
        : conn_(conn),
          params_(p),
          opt_(opt),
          disc_(geom, p),
          edges_(list_edges(conn)),
          hints_(edges_.size(), 0.0),
          has_hint_(edges_.size(), 0),
          pool_(resolve_worker_count(opt.workers)) {
        conn.validate();
        if (!(opt.dt > 0.0)) throw ValidationError("integrator: dt must be positive");
        if (!(opt.flux_scale > 0.0)) throw ValidationError("integrator: flux_scale must be positive");
        if (opt.record_stride < 1) throw ValidationError("integrator: record_stride must be >= 1");
    }

    const std::vector<DirectedEdge>& edges() const { return edges_; }

    std::vector<EdgeSolution> solve_edges(const NetworkState& state) {
        std::vector<EdgeSolution> out(edges_.size());
        pool_.run_indexed(edges_.size(), [&](std::size_t e) {
            const DirectedEdge& edge = edges_[e];
            try {
                const double* hint = has_hint_[e] ? &hints_[e] : nullptr;
                EdgeProfile profile = solve_profile(state.soluble[edge.src], state.soluble[edge.dst],
                                                    disc_, opt_.shooting, hint);
                const LinearizedProfile q_src = solve_linearized(profile, BoundarySide::Left, disc_);
                const LinearizedProfile q_dst = solve_linearized(profile, BoundarySide::Right, disc_);
                EdgeSolution& s = out[e];
                s.flux = profile.flux;
                s.weighted_flux = edge.weight * profile.flux;
                s.feedback_src = mass_coefficient(profile, q_src, edge.weight, disc_);
                s.feedback_dst = mass_coefficient(profile, q_dst, edge.weight, disc_);
                s.mass = edge_mass(profile, edge.weight, disc_.geometry);
                hints_[e] = profile.flux;
                has_hint_[e] = 1;
            } catch (const Error& err) {
                throw SolveError("edge " + conn_.labels[edge.src] + " -> " + conn_.labels[edge.dst] +
                                 ": " + err.what());
            }
        });
        return out;
    }

    NetworkState apply(const NetworkState& state, const std::vector<EdgeSolution>& sols,
                       long long step_index) {
        const std::size_t h = conn_.size();
        NetworkState next;
        next.time = (step_index + 1) * opt_.dt + start_time_;
        next.soluble.resize(h);
        next.insoluble.resize(h);

        // Incident-edge lists are rebuilt lazily once.
        if (out_edges_.empty() && in_edges_.empty() && !edges_.empty()) {
            out_edges_.resize(h);
            in_edges_.resize(h);
            for (std::size_t e = 0; e < edges_.size(); ++e) {
                out_edges_[edges_[e].src].push_back(e);
                in_edges_[edges_[e].dst].push_back(e);
            }
        }

        std::vector<double> flux_terms, feedback_terms;
        for (std::size_t i = 0; i < h; ++i) {
            flux_terms.clear();
            feedback_terms.clear();
            if (!out_edges_.empty()) {
                for (std::size_t e : out_edges_[i]) {
                    flux_terms.push_back(-sols[e].weighted_flux);
                    feedback_terms.push_back(sols[e].feedback_src);
                }
                for (std::size_t e : in_edges_[i]) {
                    flux_terms.push_back(sols[e].weighted_flux);
                    feedback_terms.push_back(sols[e].feedback_dst);
                }
            }
            const double inflow = canonical_sum(flux_terms);
            const double feedback = canonical_sum(feedback_terms);
            const double slope = equilibrium_insoluble_slope(state.soluble[i], params_);
            const double denom = conn_.volumes[i] * (1.0 + slope) + feedback;
            if (!(denom > 0.0)) {
                throw SolveError("update denominator is not positive at region '" + conn_.labels[i] +
                                 "' (value " + format_double(denom) + ")");
            }
            const double next_soluble =
                state.soluble[i] + opt_.dt * opt_.flux_scale * inflow / denom;
            if (!(next_soluble >= 0.0)) {
                throw SolveError("soluble density left the nonnegative range at region '" +
                                 conn_.labels[i] + "' (value " + format_double(next_soluble) +
                                 "); reduce dt");
            }
            try {
                next.insoluble[i] = equilibrium_insoluble(next_soluble, params_);
            } catch (const DomainError& err) {
                throw SolveError("region '" + conn_.labels[i] + "': " + err.what());
            }
            next.soluble[i] = next_soluble;
        }
        return next;
    }

    TrajectoryFrame make_frame(const NetworkState& state,
                               const std::vector<EdgeSolution>& sols) const {
        TrajectoryFrame frame;
        frame.time = state.time;
        frame.soluble = state.soluble;
        frame.insoluble = state.insoluble;
        if (opt_.record_flows) frame.edge_flows.reserve(edges_.size());
        std::vector<double> masses;
        masses.reserve(edges_.size() + conn_.size());
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            if (opt_.record_flows) {
                frame.edge_flows.push_back(
                    {edges_[e].src, edges_[e].dst, sols[e].weighted_flux, sols[e].mass});
            }
            masses.push_back(sols[e].mass);
        }
        for (std::size_t i = 0; i < conn_.size(); ++i) {
            masses.push_back(conn_.volumes[i] * (state.soluble[i] + state.insoluble[i]));
        }
        frame.total_mass = canonical_sum(masses);
        return frame;
    }

    void set_start_time(double t) { start_time_ = t; }

private:
    const Connectome& conn_;
    const EdgeParams& params_;
    const IntegratorOptions& opt_;
    EdgeDiscretization disc_;
    std::vector<DirectedEdge> edges_;
    std::vector<double> hints_;
    std::vector<unsigned char> has_hint_;
    std::vector<std::vector<std::size_t>> out_edges_, in_edges_;
    ThreadPool pool_;
    double start_time_ = 0.0;
};

}  // namespace

double node_mass(const NetworkState& state, const Connectome& conn) {
    std::vector<double> terms;
    terms.reserve(conn.size());
    for (std::size_t i = 0; i < conn.size(); ++i) {
        terms.push_back(conn.volumes[i] * (state.soluble[i] + state.insoluble[i]));
    }
    return canonical_sum(terms);
}

NetworkState seeded_state(const Connectome& conn, const std::vector<std::size_t>& seed_indices,
                          double seed_total, const EdgeParams& p) {
    conn.validate();
    p.validate();
    if (!(seed_total > 0.0)) throw ValidationError("seed total tau must be positive");

    NetworkState state;
    state.time = 0.0;
    state.soluble.assign(conn.size(), 0.0);
    state.insoluble.assign(conn.size(), 0.0);

    // Split the imposed total between the species.
    const double soluble = equilibrium_soluble_for_total(seed_total, p);
    const double insoluble = equilibrium_insoluble(soluble, p);

    for (std::size_t idx : seed_indices) {
        if (idx >= conn.size()) {
            throw ValidationError("seed index " + std::to_string(idx) + " out of range");
        }
        state.soluble[idx] = soluble;
        state.insoluble[idx] = insoluble;
    }
    return state;
}

NetworkState advance(const NetworkState& state, const Connectome& conn, const EdgeGeometry& geom,
                     const EdgeParams& p, const IntegratorOptions& opt) {
    check_state(state, conn, p);
    Stepper stepper(conn, geom, p, opt);
    stepper.set_start_time(state.time);
    const auto sols = stepper.solve_edges(state);
    return stepper.apply(state, sols, 0);
}

Trajectory run(const NetworkState& initial, const Connectome& conn, const EdgeGeometry& geom,
               const EdgeParams& p, const IntegratorOptions& opt) {
    check_state(initial, conn, p);
    if (!(opt.t_end > 0.0)) throw ValidationError("integrator: t_end must be positive");

    Stepper stepper(conn, geom, p, opt);
    stepper.set_start_time(initial.time);
    const long long steps = static_cast<long long>(std::ceil(opt.t_end / opt.dt - 1.0e-9));

    Trajectory traj;
    traj.frames.reserve(static_cast<std::size_t>(steps / opt.record_stride) + 2);

    NetworkState state = initial;
    for (long long p_step = 0; p_step < steps; ++p_step) {
        const auto sols = stepper.solve_edges(state);
        if (p_step % opt.record_stride == 0) {
            traj.frames.push_back(stepper.make_frame(state, sols));
        }
        state = stepper.apply(state, sols, p_step);
    }
    const auto sols = stepper.solve_edges(state);
    traj.frames.push_back(stepper.make_frame(state, sols));
    return traj;
}

double total_mass(const NetworkState& state, const Connectome& conn, const EdgeGeometry& geom,
                  const EdgeParams& p, const ShootingOptions& shooting) {
    check_state(state, conn, p);
    std::vector<double> terms;
    for (std::size_t i = 0; i < conn.size(); ++i) {
        terms.push_back(conn.volumes[i] * (state.soluble[i] + state.insoluble[i]));
    }
    for (const auto& edge : list_edges(conn)) {
        const EdgeProfile profile =
            solve_profile(state.soluble[edge.src], state.soluble[edge.dst], geom, p, shooting);
        terms.push_back(edge_mass(profile, edge.weight, geom));
    }
    return canonical_sum(terms);
}

}  // namespace taunet
