#include "taunet/connectome.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace taunet {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
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

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.find_first_not_of(" \t\r") != std::string::npos) {
            lines.push_back(line);
        }
    }
    return lines;
}

}  // namespace

std::optional<std::size_t> Connectome::index_of(const std::string& label) const {
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == label) return i;
    }
    return std::nullopt;
}

std::size_t Connectome::edge_count() const {
    std::size_t n = 0;
    for (double w : weights) {
        if (w > 0.0) ++n;
    }
    return n;
}

void Connectome::validate() const {
    const std::size_t h = labels.size();
    if (h < 1) throw ValidationError("connectome: empty region set");
    if (volumes.size() != h) {
        throw ValidationError("connectome: volume count " + std::to_string(volumes.size()) +
                              " does not match region count " + std::to_string(h));
    }
    if (weights.size() != h * h) {
        throw ValidationError("connectome: weight matrix is not " + std::to_string(h) + "x" +
                              std::to_string(h));
    }
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < h; ++i) {
        if (labels[i].empty()) throw ValidationError("connectome: empty label at index " + std::to_string(i));
        if (!seen.insert(labels[i]).second) {
            throw ValidationError("connectome: duplicate label '" + labels[i] + "'");
        }
        if (!(volumes[i] > 0.0)) {
            throw ValidationError("connectome: nonpositive volume for region '" + labels[i] + "'");
        }
    }
    for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = 0; j < h; ++j) {
            const double w = weights[i * h + j];
            if (!(w >= 0.0)) {
                throw ValidationError("connectome: negative weight at row '" + labels[i] +
                                      "' column '" + labels[j] + "'");
            }
            if (i == j && w != 0.0) {
                throw ValidationError("connectome: self-loop weight at region '" + labels[i] + "'");
            }
        }
    }
}

Connectome load_connectome(const std::string& weights_csv_path,
                           const std::string& nodes_csv_path,
                           std::vector<std::string>* warnings) {
    const auto lines = read_lines(weights_csv_path);
    if (lines.size() < 2) throw ValidationError(weights_csv_path + ": expected a labeled weight matrix");

    const auto header = split_csv_line(lines[0]);
    if (header.size() < 2) throw ValidationError(weights_csv_path + ": header row needs at least one label");
    const std::size_t h = header.size() - 1;
    if (lines.size() - 1 != h) {
        throw ValidationError(weights_csv_path + ": " + std::to_string(h) + " labeled columns but " +
                              std::to_string(lines.size() - 1) + " data rows");
    }

    Connectome c;
    c.labels.reserve(h);
    for (std::size_t j = 1; j <= h; ++j) c.labels.push_back(trim(header[j]));
    c.weights.assign(h * h, 0.0);

    for (std::size_t i = 0; i < h; ++i) {
        const auto fields = split_csv_line(lines[i + 1]);
        if (fields.size() != h + 1) {
            throw ValidationError(weights_csv_path + ": row '" + trim(fields.empty() ? "" : fields[0]) +
                                  "' has " + std::to_string(fields.size()) + " fields, expected " +
                                  std::to_string(h + 1));
        }
        const std::string row_label = trim(fields[0]);
        if (row_label != c.labels[i]) {
            throw ValidationError(weights_csv_path + ": row label '" + row_label +
                                  "' does not match column label '" + c.labels[i] +
                                  "' (rows and columns must list regions in the same order)");
        }
        for (std::size_t j = 0; j < h; ++j) {
            c.weights[i * h + j] = parse_double(
                fields[j + 1], weights_csv_path + " row '" + row_label + "' column '" + c.labels[j] + "'");
        }
    }

    // Node table: label,volume with an optional header row.
    std::unordered_map<std::string, double> declared;
    const auto node_lines = read_lines(nodes_csv_path);
    for (std::size_t r = 0; r < node_lines.size(); ++r) {
        const auto fields = split_csv_line(node_lines[r]);
        if (fields.size() != 2) {
            throw ValidationError(nodes_csv_path + ": line " + std::to_string(r + 1) +
                                  " must be label,volume");
        }
        const std::string label = trim(fields[0]);
        const std::string value = trim(fields[1]);
        if (r == 0 && label == "label") continue;
        if (declared.count(label)) {
            throw ValidationError(nodes_csv_path + ": duplicate label '" + label + "'");
        }
        declared[label] = parse_double(value, nodes_csv_path + " volume of '" + label + "'");
    }

    c.volumes.assign(h, 1.0);
    std::unordered_set<std::string> known(c.labels.begin(), c.labels.end());
    for (const auto& [label, volume] : declared) {
        if (!known.count(label) && warnings) {
            warnings->push_back(nodes_csv_path + ": label '" + label + "' not in the weight matrix, ignored");
        }
    }
    for (std::size_t i = 0; i < h; ++i) {
        auto it = declared.find(c.labels[i]);
        if (it == declared.end()) {
            if (warnings) {
                warnings->push_back(nodes_csv_path + ": no volume for '" + c.labels[i] +
                                    "', defaulting to 1.0");
            }
        } else {
            c.volumes[i] = it->second;
        }
    }

    c.validate();
    return c;
}

void save_connectome(const Connectome& c, const std::string& weights_csv_path,
                     const std::string& nodes_csv_path) {
    c.validate();
    const std::size_t h = c.size();
    for (const auto& label : c.labels) {
        if (label.find(',') != std::string::npos) {
            throw ValidationError("cannot save label containing a comma: '" + label + "'");
        }
    }

    std::ofstream w(weights_csv_path);
    if (!w) throw IoError("cannot write '" + weights_csv_path + "'");
    w << "region";
    for (const auto& label : c.labels) w << ',' << label;
    w << '\n';
    for (std::size_t i = 0; i < h; ++i) {
        w << c.labels[i];
        for (std::size_t j = 0; j < h; ++j) w << ',' << format_double(c.weights[i * h + j]);
        w << '\n';
    }
    if (!w.flush()) throw IoError("failed writing '" + weights_csv_path + "'");

    std::ofstream n(nodes_csv_path);
    if (!n) throw IoError("cannot write '" + nodes_csv_path + "'");
    n << "label,volume\n";
    for (std::size_t i = 0; i < h; ++i) {
        n << c.labels[i] << ',' << format_double(c.volumes[i]) << '\n';
    }
    if (!n.flush()) throw IoError("failed writing '" + nodes_csv_path + "'");
}

Connectome synthesize_graph(const SynthOptions& opt) {
    if (opt.regions < 2) throw ValidationError("synthesize_graph: need at least 2 regions");
    if (!(opt.density > 0.0 && opt.density <= 1.0)) {
        throw ValidationError("synthesize_graph: density must lie in (0,1]");
    }
    if (opt.mirrored && opt.regions % 2 != 0) {
        throw ValidationError("synthesize_graph: mirrored graphs need an even region count");
    }

    const std::size_t h = static_cast<std::size_t>(opt.regions);
    Connectome c;
    c.labels.resize(h);
    c.volumes.assign(h, 1.0);
    c.weights.assign(h * h, 0.0);
    Rng rng(opt.seed ^ 0x9e3779b97f4a7c15ull);

    auto draw_weight = [&](double& slot) {
        if (rng.uniform() < opt.density) {
            slot = 1.0 - rng.uniform();  // in (0, 1]
        }
    };

    if (!opt.mirrored) {
        for (std::size_t i = 0; i < h; ++i) {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "R%02u", static_cast<unsigned>(i));
            c.labels[i] = buf;
        }
        for (std::size_t i = 0; i < h; ++i) {
            c.volumes[i] = 0.5 + 1.5 * rng.uniform();
            for (std::size_t j = 0; j < h; ++j) {
                if (i != j) draw_weight(c.weight(i, j));
            }
        }
    } else {
        const std::size_t half = h / 2;
        for (std::size_t i = 0; i < half; ++i) {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "R%02u", static_cast<unsigned>(i));
            c.labels[i] = std::string(buf) + "L";
            c.labels[i + half] = std::string(buf) + "R";
        }
        for (std::size_t i = 0; i < half; ++i) {
            const double volume = 0.5 + 1.5 * rng.uniform();
            c.volumes[i] = volume;
            c.volumes[i + half] = volume;
            // Within-hemisphere block, mirrored to the other side.
            for (std::size_t j = 0; j < half; ++j) {
                if (i == j) continue;
                draw_weight(c.weight(i, j));
                c.weight(i + half, j + half) = c.weight(i, j);
            }
            // Cross-hemisphere block: edge Li -> Rj mirrors to Ri -> Lj.
            for (std::size_t j = 0; j < half; ++j) {
                draw_weight(c.weight(i, j + half));
                c.weight(i + half, j) = c.weight(i, j + half);
            }
        }
    }

    c.validate();
    return c;
}

std::pair<std::vector<double>, std::vector<double>> seed_connectivity(const Connectome& c,
                                                                      std::size_t seed_index) {
    const std::size_t h = c.size();
    if (seed_index >= h) {
        throw ValidationError("seed_connectivity: index " + std::to_string(seed_index) +
                              " out of range for " + std::to_string(h) + " regions");
    }
    std::vector<double> outgoing(h, 0.0), incoming(h, 0.0);
    for (std::size_t j = 0; j < h; ++j) {
        outgoing[j] = c.weight(seed_index, j);
        incoming[j] = c.weight(j, seed_index);
    }
    return {outgoing, incoming};
}

}  // namespace taunet
