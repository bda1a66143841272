#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "taunet/commands.hpp"

using taunet::RunConfig;

int main(int argc, char** argv) {
    CLI::App app{"tau transport simulator on brain connectomes"};
    app.set_version_flag("--version", taunet::kVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", config_path, "JSON config file");
        sub->add_option("-s,--set", overrides,
                        "override a config key, e.g. -s edge.ais_barrier=0.1 or -s lambda=0.1");
        sub->add_option("-o,--out", out_dir, "output directory (overrides output.dir)");
    };

    CLI::App* cmd_run = app.add_subcommand("run", "simulate a network and write its outputs");
    add_common(cmd_run);
    CLI::App* cmd_sweep = app.add_subcommand("sweep", "run a grid of simulations");
    add_common(cmd_sweep);
    CLI::App* cmd_validate =
        app.add_subcommand("validate-edge", "compare the transient and steady edge solvers");
    add_common(cmd_validate);

    std::string plot_dir;
    CLI::App* cmd_plot = app.add_subcommand("plot", "render SVG charts for a finished run");
    cmd_plot->add_option("run_dir", plot_dir, "run output directory")->required();

    std::string weights_out = "weights.csv", nodes_out = "nodes.csv";
    CLI::App* cmd_synth = app.add_subcommand("synth-graph", "write a synthetic connectome CSV pair");
    add_common(cmd_synth);
    cmd_synth->add_option("--weights-out", weights_out, "weight matrix CSV path");
    cmd_synth->add_option("--nodes-out", nodes_out, "node table CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_plot->parsed()) {
            return taunet::cmd_plot(plot_dir, std::cout);
        }

        nlohmann::json merged = taunet::default_config_json();
        if (!config_path.empty()) {
            taunet::merge_json(merged, taunet::load_config_file(config_path));
        }
        for (const auto& assignment : overrides) {
            taunet::apply_override(merged, assignment);
        }
        if (!out_dir.empty()) merged["output"]["dir"] = out_dir;
        const RunConfig cfg = taunet::parse_config(merged);

        if (cmd_run->parsed()) return taunet::cmd_run(cfg, std::cout);
        if (cmd_sweep->parsed()) return taunet::cmd_sweep(cfg, std::cout);
        if (cmd_validate->parsed()) return taunet::cmd_validate_edge(cfg, std::cout);
        if (cmd_synth->parsed()) return taunet::cmd_synth_graph(cfg, weights_out, nodes_out, std::cout);
    } catch (const taunet::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
