#include "n2n/checkpoint.hpp"

#include <fstream>
#include <string>

#include "n2n/errors.hpp"

namespace n2n {

namespace {

using nlohmann::json;

json mask_to_coords(const Mask& m) {
    json coords = json::array();
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < m.cols; ++c) {
            if (m(r, c)) coords.push_back(json::array({r, c}));
        }
    }
    return coords;
}

Mask mask_from_coords(const json& coords, std::size_t rows, std::size_t cols,
                      const std::string& what) {
    Mask m(rows, cols, 0);
    for (const json& rc : coords) {
        if (!rc.is_array() || rc.size() != 2) {
            throw ConfigError("checkpoint " + what + ": mask entries must be [row, col] pairs");
        }
        const auto r = rc[0].get<std::size_t>();
        const auto c = rc[1].get<std::size_t>();
        if (r >= rows || c >= cols) {
            throw ConfigError("checkpoint " + what + ": mask coordinate (" + std::to_string(r) +
                              "," + std::to_string(c) + ") outside " + std::to_string(rows) +
                              "x" + std::to_string(cols));
        }
        m(r, c) = 1;
    }
    return m;
}

Matrix matrix_from_flat(const json& flat, std::size_t rows, std::size_t cols,
                        const std::string& what) {
    if (!flat.is_array() || flat.size() != rows * cols) {
        throw ConfigError("checkpoint " + what + ": expected " + std::to_string(rows * cols) +
                          " weights, got " + std::to_string(flat.size()));
    }
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < m.data.size(); ++i) m.data[i] = flat[i].get<double>();
    return m;
}

}  // namespace

nlohmann::json checkpoint_to_json(const Network& net) {
    json doc;
    doc["layer_dims"] = net.layer_dims;
    doc["k"] = net.skip_span;
    json layers = json::array();
    for (std::size_t l = 0; l < net.seq_weights.size(); ++l) {
        json layer;
        layer["weights"] = net.seq_weights[l].data;
        layer["bias"] = net.biases[l];
        layer["mask"] = mask_to_coords(net.seq_masks[l]);
        layers.push_back(std::move(layer));
    }
    doc["layers"] = std::move(layers);
    json skips = json::array();
    for (const SkipConn& s : net.skips) {
        json skip;
        skip["from"] = s.from_layer;
        skip["to"] = s.to_layer;
        skip["weights"] = s.weight.data;
        skip["mask"] = mask_to_coords(s.mask);
        skips.push_back(std::move(skip));
    }
    doc["skips"] = std::move(skips);
    return doc;
}

Network network_from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("layer_dims") || !doc.contains("layers") ||
        !doc.contains("k")) {
        throw ConfigError("checkpoint is missing layer_dims/k/layers");
    }
    Network net;
    net.layer_dims = doc.at("layer_dims").get<std::vector<std::size_t>>();
    net.skip_span = doc.at("k").get<std::size_t>();
    if (net.layer_dims.size() < 2) {
        throw ConfigError("checkpoint layer_dims must list at least 2 layers");
    }
    const std::size_t layers = net.layer_dims.size() - 1;
    const json& layer_docs = doc.at("layers");
    if (!layer_docs.is_array() || layer_docs.size() != layers) {
        throw ConfigError("checkpoint has " + std::to_string(layer_docs.size()) +
                          " layer entries for " + std::to_string(layers) + " weight layers");
    }
    for (std::size_t l = 0; l < layers; ++l) {
        const json& layer = layer_docs[l];
        const std::size_t rows = net.layer_dims[l + 1];
        const std::size_t cols = net.layer_dims[l];
        const std::string what = "layer " + std::to_string(l);
        net.seq_weights.push_back(matrix_from_flat(layer.at("weights"), rows, cols, what));
        net.seq_masks.push_back(mask_from_coords(layer.at("mask"), rows, cols, what));
        auto bias = layer.at("bias").get<std::vector<double>>();
        if (bias.size() != rows) {
            throw ConfigError("checkpoint " + what + ": bias size " +
                              std::to_string(bias.size()) + " vs " + std::to_string(rows));
        }
        net.biases.push_back(std::move(bias));
    }
    for (const json& skip : doc.value("skips", json::array())) {
        SkipConn conn;
        conn.from_layer = skip.at("from").get<std::size_t>();
        conn.to_layer = skip.at("to").get<std::size_t>();
        if (conn.to_layer >= net.layer_dims.size() || conn.from_layer >= conn.to_layer) {
            throw ConfigError("checkpoint skip " + std::to_string(conn.from_layer) + "->" +
                              std::to_string(conn.to_layer) + " is out of range");
        }
        const std::size_t rows = net.layer_dims[conn.to_layer];
        const std::size_t cols = net.layer_dims[conn.from_layer];
        const std::string what =
            "skip " + std::to_string(conn.from_layer) + "->" + std::to_string(conn.to_layer);
        conn.weight = matrix_from_flat(skip.at("weights"), rows, cols, what);
        conn.mask = mask_from_coords(skip.at("mask"), rows, cols, what);
        net.skips.push_back(std::move(conn));
    }
    return net;
}

void save_checkpoint(const Network& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write checkpoint: " + path);
    out << checkpoint_to_json(net).dump(2) << "\n";
    if (!out) throw ConfigError("failed while writing checkpoint: " + path);
}

Network load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open checkpoint: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("checkpoint " + path + " is not valid JSON: " + e.what());
    }
    try {
        return network_from_json(doc);
    } catch (const json::exception& e) {
        throw ConfigError("checkpoint " + path + " is malformed: " + e.what());
    }
}

}  // namespace n2n
