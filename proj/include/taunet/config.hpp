#pragma once

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "taunet/connectome.hpp"
#include "taunet/edge_transient.hpp"
#include "taunet/network.hpp"

namespace taunet {

/// Fully resolved run configuration: defaults overlaid with the config file
/// and command-line overrides. `resolved` keeps the merged JSON so manifests
/// can echo exactly what was run.
struct RunConfig {
    // Connectome source: CSV paths, or the synthesizer when they are empty.
    std::string weights_csv;
    std::string nodes_csv;
    SynthOptions synth;

    EdgeParams edge;
    std::array<int, 5> mesh_cells{40, 20, 400, 20, 40};
    double ais_begin = 20.0, axon_begin = 40.0, cleft_begin = 1040.0, postsyn_begin = 1060.0,
           length = 1080.0;

    IntegratorOptions integrator;
    TransientOptions transient;

    std::vector<std::string> seed_labels{"R00"};
    double seed_total = 0.02;

    std::string output_dir = "out";

    struct SweepGrid {
        std::string key;
        std::vector<nlohmann::json> values;
    };
    std::vector<SweepGrid> sweep_grids;
    int sweep_cap = 64;

    nlohmann::json resolved;

    EdgeGeometry make_geometry() const;
    Connectome make_connectome(std::vector<std::string>* warnings = nullptr) const;
};

/// The built-in defaults as a JSON tree.
nlohmann::json default_config_json();

/// Reads a JSON config file; throws IoError / ValidationError.
nlohmann::json load_config_file(const std::string& path);

/// Applies a dotted-path override, e.g. "edge.ais_barrier=0.1" or
/// "seed.labels=[\"R01\"]". Values parse as JSON with a string fallback.
/// The pseudo-key "lambda" sets both diffusion barriers at once.
void apply_override(nlohmann::json& config, const std::string& assignment);

/// Writes a value at a dotted path, honoring the "lambda" pseudo-key.
void set_config_path(nlohmann::json& config, const std::string& path,
                     const nlohmann::json& value);

/// Deep-merges `overlay` onto `base` (objects merge recursively, everything
/// else replaces).
void merge_json(nlohmann::json& base, const nlohmann::json& overlay);

/// Validates and converts the merged JSON tree.
RunConfig parse_config(const nlohmann::json& merged);

}  // namespace taunet
