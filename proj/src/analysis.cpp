#include "taunet/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace taunet {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::vector<double> tau_of(const std::vector<double>& soluble, const std::vector<double>& insoluble) {
    std::vector<double> tau(soluble.size());
    for (std::size_t i = 0; i < tau.size(); ++i) tau[i] = soluble[i] + insoluble[i];
    return tau;
}

/// Average ranks (1-based) with ties sharing their mean rank.
std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return values[a] < values[b];
    });
    std::vector<double> ranks(n, 0.0);
    std::size_t pos = 0;
    while (pos < n) {
        std::size_t end = pos;
        while (end + 1 < n && values[order[end + 1]] == values[order[pos]]) ++end;
        const double mean_rank = 0.5 * static_cast<double>(pos + end) + 1.0;
        for (std::size_t k = pos; k <= end; ++k) ranks[order[k]] = mean_rank;
        pos = end + 1;
    }
    return ranks;
}

}  // namespace

std::vector<double> total_tau(const NetworkState& state) {
    return tau_of(state.soluble, state.insoluble);
}

std::vector<double> total_tau(const TrajectoryFrame& frame) {
    return tau_of(frame.soluble, frame.insoluble);
}

StagingReport arrival_times(const Trajectory& traj, std::size_t seed_index) {
    if (traj.frames.empty()) throw ValidationError("arrival_times: empty trajectory");
    const std::size_t h = traj.frames.front().soluble.size();
    if (seed_index >= h) throw ValidationError("arrival_times: seed index out of range");

    StagingReport report;
    report.seed_index = seed_index;
    report.regions.resize(h);

    for (std::size_t i = 0; i < h; ++i) {
        double peak = -1.0;
        double when = traj.frames.front().time;
        for (const auto& frame : traj.frames) {
            const double tau = frame.soluble[i] + frame.insoluble[i];
            if (tau > peak) {
                peak = tau;
                when = frame.time;
            }
        }
        const auto& last = traj.frames.back();
        const double final_tau = last.soluble[i] + last.insoluble[i];
        report.regions[i].peak_value = peak;
        report.regions[i].arrival_time = when;
        report.regions[i].unpeaked = final_tau >= peak;
    }

    // Arrival order: earliest peak first, region index breaking ties.
    std::vector<std::size_t> order(h);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (report.regions[a].arrival_time != report.regions[b].arrival_time) {
            return report.regions[a].arrival_time < report.regions[b].arrival_time;
        }
        return a < b;
    });
    for (std::size_t r = 0; r < h; ++r) report.regions[order[r]].rank = static_cast<int>(r) + 1;

    // Seed half-decay: global rate-of-spread metric.
    const double initial =
        traj.frames.front().soluble[seed_index] + traj.frames.front().insoluble[seed_index];
    const double final_tau =
        traj.frames.back().soluble[seed_index] + traj.frames.back().insoluble[seed_index];
    report.final_fraction = initial > 0.0 ? final_tau / initial : 1.0;
    report.half_decay_time = traj.frames.back().time;
    report.half_decay_reached = false;
    if (initial > 0.0) {
        for (const auto& frame : traj.frames) {
            const double tau = frame.soluble[seed_index] + frame.insoluble[seed_index];
            if (tau <= 0.5 * initial) {
                report.half_decay_time = frame.time;
                report.half_decay_reached = true;
                break;
            }
        }
    }
    return report;
}

double pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2) {
        throw ValidationError("pearson: need two equally sized vectors of length >= 2");
    }
    const double n = static_cast<double>(a.size());
    double mean_a = 0.0, mean_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        mean_a += a[i];
        mean_b += b[i];
    }
    mean_a /= n;
    mean_b /= n;
    double saa = 0.0, sbb = 0.0, sab = 0.0, max_a = 0.0, max_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - mean_a;
        const double db = b[i] - mean_b;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
        max_a = std::max(max_a, std::abs(a[i]));
        max_b = std::max(max_b, std::abs(b[i]));
    }
    // Variance at roundoff level counts as no variance: undefined, not zero.
    const double eps = std::numeric_limits<double>::epsilon();
    if (saa <= n * (eps * max_a) * (eps * max_a) || sbb <= n * (eps * max_b) * (eps * max_b)) {
        return kNan;
    }
    return sab / std::sqrt(saa * sbb);
}

double spearman(std::span<const double> a, std::span<const double> b) {
    const auto ra = average_ranks(a);
    const auto rb = average_ranks(b);
    return pearson(ra, rb);
}

std::vector<SeedCorrelationPoint> correlation_with_seed(const Trajectory& traj,
                                                        const Connectome& conn,
                                                        std::size_t seed_index) {
    if (traj.frames.empty()) throw ValidationError("correlation_with_seed: empty trajectory");
    const std::size_t h = conn.size();
    if (h < 3) {
        throw ValidationError("correlation_with_seed: need at least 3 regions for a correlation");
    }
    if (seed_index >= h) throw ValidationError("correlation_with_seed: seed index out of range");

    const auto [outgoing_full, incoming_full] = seed_connectivity(conn, seed_index);
    std::vector<double> outgoing, incoming;
    outgoing.reserve(h - 1);
    incoming.reserve(h - 1);
    for (std::size_t i = 0; i < h; ++i) {
        if (i == seed_index) continue;
        outgoing.push_back(outgoing_full[i]);
        incoming.push_back(incoming_full[i]);
    }

    std::vector<SeedCorrelationPoint> series;
    series.reserve(traj.frames.size());
    std::vector<double> tau;
    tau.reserve(h - 1);
    for (const auto& frame : traj.frames) {
        tau.clear();
        for (std::size_t i = 0; i < h; ++i) {
            if (i == seed_index) continue;
            tau.push_back(frame.soluble[i] + frame.insoluble[i]);
        }
        series.push_back({frame.time, pearson(tau, outgoing), pearson(tau, incoming)});
    }
    return series;
}

std::vector<MassErrorPoint> mass_error_series(const Trajectory& traj) {
    if (traj.frames.empty()) throw ValidationError("mass_error_series: empty trajectory");
    const double initial = traj.frames.front().total_mass;
    if (!(initial > 0.0)) throw ValidationError("mass_error_series: initial total mass is zero");
    std::vector<MassErrorPoint> series;
    series.reserve(traj.frames.size());
    for (const auto& frame : traj.frames) {
        series.push_back(
            {frame.time, frame.total_mass, std::abs(frame.total_mass - initial) / initial});
    }
    return series;
}

std::vector<EdgeFlowRecord> top_flux_edges(const std::vector<EdgeFlowRecord>& flows,
                                           double fraction) {
    if (flows.empty()) throw ValidationError("top_flux_edges: empty flux table");
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw ValidationError("top_flux_edges: fraction must lie in (0,1]");
    }
    std::vector<EdgeFlowRecord> sorted = flows;
    std::sort(sorted.begin(), sorted.end(), [](const EdgeFlowRecord& a, const EdgeFlowRecord& b) {
        const double ma = std::abs(a.weighted_flux);
        const double mb = std::abs(b.weighted_flux);
        if (ma != mb) return ma > mb;
        if (a.src != b.src) return a.src < b.src;
        return a.dst < b.dst;
    });
    const std::size_t keep = static_cast<std::size_t>(
        std::ceil(fraction * static_cast<double>(sorted.size()) - 1.0e-12));
    sorted.resize(std::max<std::size_t>(1, keep));
    return sorted;
}

}  // namespace taunet
