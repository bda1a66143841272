#include "taunet/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "taunet/analysis.hpp"
#include "taunet/svg.hpp"

namespace taunet {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << content;
    if (!out.flush()) throw IoError("failed writing '" + path.string() + "'");
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(field);
            field.clear();
        } else if (ch != '\r') {
            field += ch;
        }
    }
    fields.push_back(field);
    return fields;
}

std::vector<std::size_t> resolve_seeds(const Connectome& conn, const RunConfig& cfg) {
    std::vector<std::size_t> seeds;
    for (const auto& label : cfg.seed_labels) {
        const auto idx = conn.index_of(label);
        if (!idx) {
            throw ValidationError("seed region '" + label + "' is not in the connectome");
        }
        seeds.push_back(*idx);
    }
    return seeds;
}

std::string trajectory_csv(const Trajectory& traj, const Connectome& conn) {
    std::string out = "time,region,soluble,insoluble,total\n";
    for (const auto& frame : traj.frames) {
        const std::string t = format_double(frame.time);
        for (std::size_t i = 0; i < conn.size(); ++i) {
            out += t;
            out += ',';
            out += conn.labels[i];
            out += ',';
            out += format_double(frame.soluble[i]);
            out += ',';
            out += format_double(frame.insoluble[i]);
            out += ',';
            out += format_double(frame.soluble[i] + frame.insoluble[i]);
            out += '\n';
        }
    }
    return out;
}

std::string fluxes_csv(const Trajectory& traj, const Connectome& conn) {
    std::string out = "time,src,dst,flux,edge_mass\n";
    for (const auto& frame : traj.frames) {
        const std::string t = format_double(frame.time);
        for (const auto& flow : frame.edge_flows) {
            out += t;
            out += ',';
            out += conn.labels[flow.src];
            out += ',';
            out += conn.labels[flow.dst];
            out += ',';
            out += format_double(flow.weighted_flux);
            out += ',';
            out += format_double(flow.mass);
            out += '\n';
        }
    }
    return out;
}

std::string mass_error_csv(const Trajectory& traj) {
    std::string out = "time,total_mass,relative_error\n";
    for (const auto& point : mass_error_series(traj)) {
        out += format_double(point.time);
        out += ',';
        out += format_double(point.total_mass);
        out += ',';
        out += format_double(point.relative_error);
        out += '\n';
    }
    return out;
}

json staging_json(const StagingReport& report, const Connectome& conn) {
    json regions = json::array();
    for (std::size_t i = 0; i < report.regions.size(); ++i) {
        const auto& r = report.regions[i];
        regions.push_back({
            {"region", conn.labels[i]},
            {"peak_value", r.peak_value},
            {"arrival_time", r.arrival_time},
            {"rank", r.rank},
            {"unpeaked", r.unpeaked},
        });
    }
    return json{
        {"seed",
         {{"region", conn.labels[report.seed_index]},
          {"half_decay_time", report.half_decay_time},
          {"half_decay_reached", report.half_decay_reached},
          {"final_fraction", report.final_fraction}}},
        {"regions", regions},
    };
}

}  // namespace

int cmd_run(const RunConfig& cfg, std::ostream& log) {
    fs::create_directories(cfg.output_dir);
    json manifest{{"version", kVersion}, {"command", "run"}, {"config", cfg.resolved}};
    std::vector<std::string> outputs;
    auto finish = [&](const std::string& status, const std::string& error) {
        manifest["status"] = status;
        manifest["outputs"] = outputs;
        if (!error.empty()) manifest["error"] = error;
        write_file(fs::path(cfg.output_dir) / "manifest.json", manifest.dump(1) + "\n");
    };

    try {
        std::vector<std::string> warnings;
        const Connectome conn = cfg.make_connectome(&warnings);
        for (const auto& w : warnings) log << "warning: " << w << '\n';
        const EdgeGeometry geom = cfg.make_geometry();
        const auto seeds = resolve_seeds(conn, cfg);

        const NetworkState initial = seeded_state(conn, seeds, cfg.seed_total, cfg.edge);
        const Trajectory traj = run(initial, conn, geom, cfg.edge, cfg.integrator);

        const fs::path dir(cfg.output_dir);
        write_file(dir / "trajectory.csv", trajectory_csv(traj, conn));
        outputs.push_back("trajectory.csv");
        write_file(dir / "fluxes.csv", fluxes_csv(traj, conn));
        outputs.push_back("fluxes.csv");
        write_file(dir / "mass_error.csv", mass_error_csv(traj));
        outputs.push_back("mass_error.csv");
        const StagingReport staging = arrival_times(traj, seeds.front());
        write_file(dir / "staging.json", staging_json(staging, conn).dump(1) + "\n");
        outputs.push_back("staging.json");

        finish("ok", "");
        log << "run: " << conn.size() << " regions, " << conn.edge_count() << " edges, "
            << traj.frames.size() << " frames -> " << cfg.output_dir << '\n';
        return 0;
    } catch (const Error& e) {
        finish("failed", e.what());
        log << "run failed: " << e.what() << '\n';
        return 1;
    }
}

int cmd_sweep(const RunConfig& cfg, std::ostream& log) {
    if (cfg.sweep_grids.empty()) {
        throw ValidationError("sweep: no grids configured (sweep.grids is empty)");
    }
    std::size_t points = 1;
    for (const auto& grid : cfg.sweep_grids) {
        points *= grid.values.size();
        if (points > static_cast<std::size_t>(cfg.sweep_cap)) {
            throw ValidationError("sweep: grid has more than sweep.cap = " +
                                  std::to_string(cfg.sweep_cap) + " points");
        }
    }

    const fs::path parent(cfg.output_dir);
    fs::create_directories(parent);

    struct PointResult {
        std::string dir;
        std::vector<json> values;
        int exit_code = 1;
        std::string log_text;
        json staging;
    };
    std::vector<PointResult> results(points);

    const int workers = resolve_worker_count(cfg.integrator.workers);
    const int point_workers = points > 1 ? std::min<int>(workers, static_cast<int>(points)) : 1;
    ThreadPool pool(point_workers);

    pool.run_indexed(points, [&](std::size_t idx) {
        PointResult& res = results[idx];
        char name[32];
        std::snprintf(name, sizeof(name), "point_%04zu", idx);
        res.dir = (parent / name).string();

        json merged = cfg.resolved;
        std::size_t rest = idx;
        for (const auto& grid : cfg.sweep_grids) {
            const json& value = grid.values[rest % grid.values.size()];
            rest /= grid.values.size();
            res.values.push_back(value);
            set_config_path(merged, grid.key, value);
        }
        merged["output"]["dir"] = res.dir;
        if (point_workers > 1) merged["integrator"]["workers"] = 1;

        std::ostringstream sublog;
        try {
            const RunConfig sub = parse_config(merged);
            res.exit_code = cmd_run(sub, sublog);
            if (res.exit_code == 0) {
                std::ifstream staging_in(fs::path(res.dir) / "staging.json");
                if (staging_in) res.staging = json::parse(staging_in, nullptr, false);
            }
        } catch (const Error& e) {
            sublog << "point failed: " << e.what() << '\n';
            res.exit_code = 1;
        }
        res.log_text = sublog.str();
    });

    std::string summary = "point,dir,status";
    for (const auto& grid : cfg.sweep_grids) summary += ',' + grid.key;
    summary += ",half_decay_time,half_decay_reached,final_fraction\n";

    int failures = 0;
    for (std::size_t idx = 0; idx < points; ++idx) {
        const PointResult& res = results[idx];
        if (!res.log_text.empty()) log << "[point " << idx << "] " << res.log_text;
        if (res.exit_code != 0) ++failures;
        summary += std::to_string(idx);
        summary += ',';
        summary += res.dir;
        summary += ',';
        summary += res.exit_code == 0 ? "ok" : "failed";
        for (const auto& value : res.values) {
            summary += ',';
            summary += value.is_string() ? value.get<std::string>() : value.dump();
        }
        if (res.staging.is_object()) {
            const auto& seed = res.staging.at("seed");
            summary += ',' + format_double(seed.value("half_decay_time", 0.0));
            summary += ',';
            summary += seed.value("half_decay_reached", false) ? "true" : "false";
            summary += ',' + format_double(seed.value("final_fraction", 1.0));
        } else {
            summary += ",,,";
        }
        summary += '\n';
    }
    write_file(parent / "summary.csv", summary);
    log << "sweep: " << points << " points, " << failures << " failed -> "
        << (parent / "summary.csv").string() << '\n';
    return failures == 0 ? 0 : 1;
}

int cmd_validate_edge(const RunConfig& cfg, std::ostream& log) {
    fs::create_directories(cfg.output_dir);
    const EdgeGeometry geom = cfg.make_geometry();
    cfg.edge.validate();

    const double soluble0 = equilibrium_soluble_for_total(cfg.seed_total, cfg.edge);
    const double insoluble0 = equilibrium_insoluble(soluble0, cfg.edge);
    std::vector<double> n0(geom.node_count(), soluble0);
    std::vector<double> m0(geom.node_count());
    for (std::size_t k = 0; k < geom.node_count(); ++k) {
        m0[k] = geom.reaction_active(k) ? insoluble0 : 0.0;
    }

    TransientOptions topt = cfg.transient;
    topt.dirichlet.reset();
    topt.record_stride = 0;

    const auto wall0 = std::chrono::steady_clock::now();
    const TransientResult relaxed = simulate_edge(n0, m0, topt, geom, cfg.edge);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
    const TransientFrame& end = relaxed.frames.back();

    const EdgeProfile steady = solve_profile(end.soluble.front(), end.soluble.back(), geom,
                                             cfg.edge, cfg.integrator.shooting);

    auto linf_rel = [](const std::vector<double>& got, const std::vector<double>& ref) {
        double diff = 0.0, scale = 0.0;
        for (std::size_t k = 0; k < got.size(); ++k) {
            diff = std::max(diff, std::abs(got[k] - ref[k]));
            scale = std::max(scale, std::abs(ref[k]));
        }
        return scale > 0.0 ? diff / scale : diff;
    };
    const double err_soluble = linf_rel(end.soluble, steady.soluble);
    const double err_insoluble = linf_rel(end.insoluble, steady.insoluble);
    const auto [left_flux, right_flux] = boundary_fluxes(end.soluble, geom, cfg.edge);

    std::string csv = "x,soluble_transient,insoluble_transient,soluble_steady,insoluble_steady\n";
    for (std::size_t k = 0; k < geom.node_count(); ++k) {
        csv += format_double(geom.nodes[k]) + ',' + format_double(end.soluble[k]) + ',' +
               format_double(end.insoluble[k]) + ',' + format_double(steady.soluble[k]) + ',' +
               format_double(steady.insoluble[k]) + '\n';
    }
    const fs::path dir(cfg.output_dir);
    write_file(dir / "profiles.csv", csv);

    const json report{
        {"linf_rel_soluble", err_soluble},
        {"linf_rel_insoluble", err_insoluble},
        {"steady_flux", steady.flux},
        {"flux_residual", steady.residual},
        {"shooting_tolerance",
         cfg.integrator.shooting.effective(steady.left_value, steady.right_value)},
        {"boundary", {{"left", end.soluble.front()}, {"right", end.soluble.back()}}},
        {"boundary_flux", {{"left", left_flux}, {"right", right_flux}}},
        {"transient",
         {{"steps", relaxed.steps},
          {"dt", relaxed.dt},
          {"settled", relaxed.settled},
          {"elapsed_seconds", elapsed}}},
        {"config", cfg.resolved},
    };
    write_file(dir / "validation.json", report.dump(1) + "\n");

    log << "validate-edge: L_inf rel soluble " << format_double(err_soluble, 3) << ", insoluble "
        << format_double(err_insoluble, 3) << ", " << relaxed.steps << " steps in "
        << format_double(elapsed, 3) << " s -> " << cfg.output_dir << '\n';
    return 0;
}

namespace {

struct LoadedTrajectory {
    std::vector<double> times;
    std::vector<std::string> labels;
    std::vector<std::vector<double>> tau;  // [time][region]
};

LoadedTrajectory read_trajectory_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(path.string() + ": empty file");
    const auto header = split_fields(line);
    if (header.size() != 5 || header[0] != "time" || header[1] != "region") {
        throw ValidationError(path.string() + ": expected header time,region,soluble,insoluble,total");
    }

    LoadedTrajectory out;
    std::size_t column = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != 5) throw ValidationError(path.string() + ": malformed row '" + line + "'");
        const double t = parse_double(fields[0], path.string() + " time");
        const double tau = parse_double(fields[4], path.string() + " total");
        if (out.times.empty() || t != out.times.back()) {
            out.times.push_back(t);
            out.tau.emplace_back();
            column = out.times.size() - 1;
        }
        if (column == 0) out.labels.push_back(fields[1]);
        out.tau[column].push_back(tau);
    }
    if (out.times.empty()) throw ValidationError(path.string() + ": no data rows");
    for (const auto& row : out.tau) {
        if (row.size() != out.labels.size()) {
            throw ValidationError(path.string() + ": ragged region blocks");
        }
    }
    return out;
}

/// Strided index list capping a series at `cap` samples, endpoints kept.
std::vector<std::size_t> sampled_indices(std::size_t n, std::size_t cap) {
    std::vector<std::size_t> idx;
    if (n == 0) return idx;
    const std::size_t stride = (n + cap - 1) / cap;
    for (std::size_t i = 0; i < n; i += stride) idx.push_back(i);
    if (idx.back() != n - 1) idx.push_back(n - 1);
    return idx;
}

std::string render_lines(const LoadedTrajectory& data, const std::string& skip_label,
                         const std::string& title) {
    const double width = 860, height = 480;
    const double ml = 80, mr = 20, mt = 36, mb = 48;
    SvgDocument svg(width, height);

    double tau_max = 0.0;
    for (const auto& row : data.tau) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (data.labels[i] == skip_label) continue;
            tau_max = std::max(tau_max, row[i]);
        }
    }
    if (tau_max <= 0.0) tau_max = 1.0;
    const double t0 = data.times.front(), t1 = data.times.back();
    const double t_span = t1 > t0 ? t1 - t0 : 1.0;

    auto x_of = [&](double t) { return ml + (t - t0) / t_span * (width - ml - mr); };
    auto y_of = [&](double v) { return height - mb - v / (tau_max * 1.05) * (height - mt - mb); };

    svg.text(ml, mt - 12, title, 14.0);
    svg.line(ml, height - mb, width - mr, height - mb, "#000000", 1.0);
    svg.line(ml, mt, ml, height - mb, "#000000", 1.0);
    for (int tick = 0; tick <= 5; ++tick) {
        const double t = t0 + t_span * tick / 5.0;
        const double v = tau_max * 1.05 * tick / 5.0;
        svg.line(x_of(t), height - mb, x_of(t), height - mb + 4, "#000000", 1.0);
        svg.text(x_of(t), height - mb + 18, format_double(t, 4), 10.0, "middle");
        svg.line(ml - 4, y_of(v), ml, y_of(v), "#000000", 1.0);
        svg.text(ml - 8, y_of(v) + 3, format_double(v, 3), 10.0, "end");
    }
    svg.text((ml + width - mr) / 2, height - 10, "time (days)", 11.0, "middle");

    const auto samples = sampled_indices(data.times.size(), 1000);
    std::size_t series = 0;
    for (std::size_t i = 0; i < data.labels.size(); ++i) {
        if (data.labels[i] == skip_label) continue;
        std::vector<std::pair<double, double>> points;
        points.reserve(samples.size());
        for (std::size_t s : samples) {
            points.emplace_back(x_of(data.times[s]), y_of(data.tau[s][i]));
        }
        svg.polyline(points, series_color(series++), 1.2);
    }
    return svg.str();
}

std::string render_heatmap(const LoadedTrajectory& data, const std::vector<std::string>& row_order,
                           const std::string& title) {
    const double cell_h = 14.0;
    const double ml = 110, mr = 20, mt = 36, mb = 40;
    const double width = 860;
    const double height = mt + cell_h * static_cast<double>(row_order.size()) + mb;
    SvgDocument svg(width, height);
    svg.text(ml, mt - 12, title, 14.0);

    const auto samples = sampled_indices(data.times.size(), 240);
    double tau_max = 0.0;
    for (const auto& row : data.tau) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            for (const auto& label : row_order) {
                if (data.labels[i] == label) tau_max = std::max(tau_max, row[i]);
            }
        }
    }
    if (tau_max <= 0.0) tau_max = 1.0;

    const double plot_w = width - ml - mr;
    const double cell_w = plot_w / static_cast<double>(samples.size());
    for (std::size_t r = 0; r < row_order.size(); ++r) {
        std::size_t region = 0;
        for (std::size_t i = 0; i < data.labels.size(); ++i) {
            if (data.labels[i] == row_order[r]) region = i;
        }
        const double y = mt + cell_h * static_cast<double>(r);
        svg.text(ml - 6, y + cell_h - 4, row_order[r], 9.0, "end");
        for (std::size_t sidx = 0; sidx < samples.size(); ++sidx) {
            const double tau = data.tau[samples[sidx]][region];
            svg.rect(ml + cell_w * static_cast<double>(sidx), y, cell_w + 0.5, cell_h,
                     heat_color(tau / tau_max));
        }
    }
    const double y_axis = mt + cell_h * static_cast<double>(row_order.size());
    svg.text(ml, y_axis + 16, format_double(data.times.front(), 4), 10.0, "middle");
    svg.text(width - mr, y_axis + 16, format_double(data.times.back(), 4), 10.0, "end");
    svg.text((ml + width - mr) / 2, y_axis + 16, "time (days)", 10.0, "middle");
    return svg.str();
}

}  // namespace

int cmd_plot(const std::string& run_dir, std::ostream& log) {
    const fs::path dir(run_dir);
    const LoadedTrajectory data = read_trajectory_csv(dir / "trajectory.csv");

    std::ifstream staging_in(dir / "staging.json");
    if (!staging_in) throw IoError("cannot open '" + (dir / "staging.json").string() + "'");
    json staging = json::parse(staging_in, nullptr, false);
    if (staging.is_discarded()) throw ValidationError("staging.json is not valid JSON");
    const std::string seed_label = staging.at("seed").at("region").get<std::string>();

    // Heatmap rows: non-seed regions in arrival-rank order.
    std::vector<std::pair<int, std::string>> ranked;
    for (const auto& region : staging.at("regions")) {
        const std::string label = region.at("region").get<std::string>();
        if (label == seed_label) continue;
        ranked.emplace_back(region.at("rank").get<int>(), label);
    }
    std::sort(ranked.begin(), ranked.end());
    std::vector<std::string> row_order;
    row_order.reserve(ranked.size());
    for (const auto& [rank, label] : ranked) row_order.push_back(label);

    write_file(dir / "lines_with_seed.svg",
               render_lines(data, "", "total tau per region"));
    write_file(dir / "lines_excl_seed.svg",
               render_lines(data, seed_label, "total tau per region (seed excluded)"));
    write_file(dir / "heatmap.svg",
               render_heatmap(data, row_order, "total tau, regions in arrival order"));
    log << "plot: 3 charts -> " << run_dir << '\n';
    return 0;
}

int cmd_synth_graph(const RunConfig& cfg, const std::string& weights_out,
                    const std::string& nodes_out, std::ostream& log) {
    const Connectome conn = synthesize_graph(cfg.synth);
    save_connectome(conn, weights_out, nodes_out);
    log << "synth-graph: " << conn.size() << " regions, " << conn.edge_count() << " edges -> "
        << weights_out << ", " << nodes_out << '\n';
    return 0;
}

}  // namespace taunet
