#include "taunet/config.hpp"

#include <fstream>

namespace taunet {

using nlohmann::json;

json default_config_json() {
    json cfg;
    cfg["connectome"] = {
        {"weights_csv", ""},
        {"nodes_csv", ""},
        {"synth", {{"regions", 30}, {"density", 0.25}, {"seed", 4242}, {"mirrored", false}}},
    };
    cfg["edge"] = {
        {"diffusivity", 12.0},
        {"diffusing_fraction", 0.92},
        {"v_antero", 0.7},
        {"v_retro", 0.7},
        {"frag_rate", 1.0e-5},
        {"agg_soluble", 0.001},
        {"agg_cross", 0.0},
        {"antero_boost", 100.0},
        {"antero_knockdown", 10.0},
        {"ais_barrier", 0.005},
        {"cleft_barrier", 0.005},
    };
    cfg["geometry"] = {
        {"ais_begin", 20.0},   {"axon_begin", 40.0}, {"cleft_begin", 1040.0},
        {"postsyn_begin", 1060.0}, {"length", 1080.0},
        {"cells", json::array({40, 20, 400, 20, 40})},
    };
    cfg["integrator"] = {
        {"dt", 0.05},
        {"t_end", 180.0},
        {"flux_scale", 86400.0},
        {"record_stride", 10},
        {"shoot_tol", 1.0e-10},
        {"shoot_tol_relative", true},
        {"workers", 0},
    };
    cfg["transient"] = {
        {"timescale_ratio", 1.0e-3},
        {"dt", 0.0},
        {"t_end", 700.0},
        {"settle_tol", 0.0},
    };
    cfg["seed"] = {{"labels", json::array({"R00"})}, {"total_tau", 0.02}};
    cfg["output"] = {{"dir", "out"}};
    cfg["sweep"] = {{"cap", 64}, {"grids", json::object()}};
    return cfg;
}

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ValidationError("config '" + path + "': " + e.what());
    }
}

void merge_json(json& base, const json& overlay) {
    if (!overlay.is_object() || !base.is_object()) {
        base = overlay;
        return;
    }
    for (auto it = overlay.begin(); it != overlay.end(); ++it) {
        if (base.contains(it.key()) && base[it.key()].is_object() && it.value().is_object()) {
            merge_json(base[it.key()], it.value());
        } else {
            base[it.key()] = it.value();
        }
    }
}

void set_config_path(json& config, const std::string& path, const json& value) {
    if (path == "lambda") {
        config["edge"]["ais_barrier"] = value;
        config["edge"]["cleft_barrier"] = value;
        return;
    }
    json* node = &config;
    std::size_t start = 0;
    for (;;) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
        if (key.empty()) throw ValidationError("bad override path '" + path + "'");
        if (dot == std::string::npos) {
            (*node)[key] = value;
            return;
        }
        node = &(*node)[key];
        start = dot + 1;
    }
}

void apply_override(json& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ValidationError("override must look like key.path=value: '" + assignment + "'");
    }
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);

    json value;
    try {
        value = json::parse(text);
    } catch (const json::exception&) {
        value = text;  // plain strings need no quoting
    }
    set_config_path(config, path, value);
}

namespace {

double need_number(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key) || !obj[key].is_number()) {
        throw ValidationError("config: " + where + "." + key + " must be a number");
    }
    return obj[key].get<double>();
}

}  // namespace

RunConfig parse_config(const json& merged) {
    RunConfig cfg;
    cfg.resolved = merged;
    try {
        const json& conn = merged.at("connectome");
        cfg.weights_csv = conn.value("weights_csv", std::string());
        cfg.nodes_csv = conn.value("nodes_csv", std::string());
        if (cfg.weights_csv.empty() != cfg.nodes_csv.empty()) {
            throw ValidationError("config: weights_csv and nodes_csv must be given together");
        }
        const json& synth = conn.at("synth");
        cfg.synth.regions = synth.value("regions", 30);
        cfg.synth.density = synth.value("density", 0.25);
        cfg.synth.seed = synth.value("seed", 4242ull);
        cfg.synth.mirrored = synth.value("mirrored", false);

        const json& edge = merged.at("edge");
        cfg.edge.diffusivity = need_number(edge, "diffusivity", "edge");
        cfg.edge.diffusing_fraction = need_number(edge, "diffusing_fraction", "edge");
        cfg.edge.v_antero = need_number(edge, "v_antero", "edge");
        cfg.edge.v_retro = need_number(edge, "v_retro", "edge");
        cfg.edge.frag_rate = need_number(edge, "frag_rate", "edge");
        cfg.edge.agg_soluble = need_number(edge, "agg_soluble", "edge");
        cfg.edge.agg_cross = need_number(edge, "agg_cross", "edge");
        cfg.edge.antero_boost = need_number(edge, "antero_boost", "edge");
        cfg.edge.antero_knockdown = need_number(edge, "antero_knockdown", "edge");
        cfg.edge.ais_barrier = need_number(edge, "ais_barrier", "edge");
        cfg.edge.cleft_barrier = need_number(edge, "cleft_barrier", "edge");
        cfg.edge.validate();

        const json& geom = merged.at("geometry");
        cfg.ais_begin = need_number(geom, "ais_begin", "geometry");
        cfg.axon_begin = need_number(geom, "axon_begin", "geometry");
        cfg.cleft_begin = need_number(geom, "cleft_begin", "geometry");
        cfg.postsyn_begin = need_number(geom, "postsyn_begin", "geometry");
        cfg.length = need_number(geom, "length", "geometry");
        const json& cells = geom.at("cells");
        if (!cells.is_array() || cells.size() != 5) {
            throw ValidationError("config: geometry.cells must be an array of 5 interval counts");
        }
        for (std::size_t s = 0; s < 5; ++s) cfg.mesh_cells[s] = cells[s].get<int>();

        const json& integ = merged.at("integrator");
        cfg.integrator.dt = need_number(integ, "dt", "integrator");
        cfg.integrator.t_end = need_number(integ, "t_end", "integrator");
        cfg.integrator.flux_scale = need_number(integ, "flux_scale", "integrator");
        cfg.integrator.record_stride = integ.value("record_stride", 1);
        cfg.integrator.shooting.tolerance = integ.value("shoot_tol", 1.0e-10);
        cfg.integrator.shooting.relative = integ.value("shoot_tol_relative", true);
        cfg.integrator.workers = integ.value("workers", 0);

        const json& trans = merged.at("transient");
        cfg.transient.timescale_ratio = need_number(trans, "timescale_ratio", "transient");
        cfg.transient.dt = trans.value("dt", 0.0);
        cfg.transient.t_end = need_number(trans, "t_end", "transient");
        cfg.transient.settle_tol = trans.value("settle_tol", 0.0);

        const json& seed = merged.at("seed");
        cfg.seed_labels.clear();
        const json& labels = seed.at("labels");
        if (labels.is_string()) {
            cfg.seed_labels.push_back(labels.get<std::string>());
        } else if (labels.is_array()) {
            for (const auto& l : labels) cfg.seed_labels.push_back(l.get<std::string>());
        }
        if (cfg.seed_labels.empty()) throw ValidationError("config: seed.labels must name a region");
        cfg.seed_total = need_number(seed, "total_tau", "seed");

        cfg.output_dir = merged.at("output").value("dir", "out");

        const json& sweep = merged.at("sweep");
        cfg.sweep_cap = sweep.value("cap", 64);
        if (sweep.contains("grids")) {
            for (auto it = sweep["grids"].begin(); it != sweep["grids"].end(); ++it) {
                if (!it.value().is_array() || it.value().empty()) {
                    throw ValidationError("config: sweep grid '" + it.key() +
                                          "' must be a non-empty array");
                }
                RunConfig::SweepGrid grid;
                grid.key = it.key();
                for (const auto& v : it.value()) grid.values.push_back(v);
                cfg.sweep_grids.push_back(std::move(grid));
            }
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    return cfg;
}

EdgeGeometry RunConfig::make_geometry() const {
    return EdgeGeometry::make(ais_begin, axon_begin, cleft_begin, postsyn_begin, length,
                              mesh_cells);
}

Connectome RunConfig::make_connectome(std::vector<std::string>* warnings) const {
    if (!weights_csv.empty()) {
        return load_connectome(weights_csv, nodes_csv, warnings);
    }
    return synthesize_graph(synth);
}

}  // namespace taunet
