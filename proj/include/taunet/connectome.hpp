#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "taunet/util.hpp"

namespace taunet {

/// Directed weighted region graph with per-region volumes. Immutable after
/// construction; safe to share read-only across workers.
struct Connectome {
    std::vector<std::string> labels;
    std::vector<double> volumes;
    std::vector<double> weights;  ///< dense row-major h*h, weights[i*h+j] = weight of edge i -> j

    std::size_t size() const { return labels.size(); }

    double weight(std::size_t i, std::size_t j) const { return weights[i * size() + j]; }
    double& weight(std::size_t i, std::size_t j) { return weights[i * size() + j]; }

    std::optional<std::size_t> index_of(const std::string& label) const;

    /// Directed edge count (strictly positive weights).
    std::size_t edge_count() const;

    /// Throws ValidationError identifying the offending row/column.
    void validate() const;
};

/// Loads a connectome from a labeled h+1 x h+1 weight matrix CSV and a
/// label,volume node table CSV. Volumes missing from the node table default
/// to 1.0 with a warning; unknown node-table labels warn and are ignored.
Connectome load_connectome(const std::string& weights_csv_path,
                           const std::string& nodes_csv_path,
                           std::vector<std::string>* warnings = nullptr);

/// Writes the two CSV files read back bit-exactly by load_connectome.
void save_connectome(const Connectome& c, const std::string& weights_csv_path,
                     const std::string& nodes_csv_path);

struct SynthOptions {
    int regions = 30;
    double density = 0.25;      ///< probability of each admissible directed edge, in (0,1]
    std::uint64_t seed = 0;
    bool mirrored = false;      ///< build two hemispheres with an exact label-swap automorphism
};

/// Reproducible random graph: weights in (0,1], volumes in [0.5, 2].
/// With mirrored=true the region count must be even; labels get L/R suffixes
/// and swapping hemispheres (i <-> i + h/2) leaves weights and volumes
/// invariant. Cross-hemisphere edges are generated mirror-consistently.
Connectome synthesize_graph(const SynthOptions& opt);

/// Row (outgoing) and column (incoming) connectivity of a seed region.
/// The seed's own entry is zero in both.
std::pair<std::vector<double>, std::vector<double>> seed_connectivity(const Connectome& c,
                                                                      std::size_t seed_index);

}  // namespace taunet
