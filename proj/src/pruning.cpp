#include "n2n/pruning.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "n2n/budget.hpp"
#include "n2n/errors.hpp"
#include "n2n/rng.hpp"

namespace n2n {

namespace {

struct RepairGrid {
    std::size_t rows, cols;
    std::vector<std::uint8_t> kept;         // 1 if position kept
    std::vector<std::size_t> priority;      // shuffle position; SIZE_MAX for repair edges
    std::vector<std::size_t> row_count, col_count;

    std::size_t idx(std::size_t r, std::size_t c) const { return r * cols + c; }

    void add(std::size_t r, std::size_t c, std::size_t prio) {
        kept[idx(r, c)] = 1;
        priority[idx(r, c)] = prio;
        ++row_count[r];
        ++col_count[c];
    }
    void remove(std::size_t r, std::size_t c) {
        kept[idx(r, c)] = 0;
        --row_count[r];
        --col_count[c];
    }

    // Lowest-priority random pick whose removal orphans nothing.
    bool find_donor(std::size_t& out_r, std::size_t& out_c) const {
        bool found = false;
        std::size_t best = 0;
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) {
                const std::size_t i = idx(r, c);
                if (!kept[i] || priority[i] == SIZE_MAX) continue;
                if (row_count[r] < 2 || col_count[c] < 2) continue;
                if (!found || priority[i] > best) {
                    found = true;
                    best = priority[i];
                    out_r = r;
                    out_c = c;
                }
            }
        }
        return found;
    }
};

Mask prune_layer_random(std::size_t rows, std::size_t cols, std::size_t quota, Rng& rng) {
    const std::size_t total = rows * cols;
    RepairGrid grid{rows, cols,
                    std::vector<std::uint8_t>(total, 0),
                    std::vector<std::size_t>(total, 0),
                    std::vector<std::size_t>(rows, 0),
                    std::vector<std::size_t>(cols, 0)};

    const std::vector<std::size_t> order = rng.sample_without_replacement(total, total);
    for (std::size_t p = 0; p < quota; ++p) {
        grid.add(order[p] / cols, order[p] % cols, p);
    }

    for (std::size_t r = 0; r < rows; ++r) {
        if (grid.row_count[r] > 0) continue;
        const std::size_t c = rng.uniform_index(cols);
        grid.add(r, c, SIZE_MAX);
        std::size_t dr = 0, dc = 0;
        if (grid.find_donor(dr, dc)) {
            grid.remove(dr, dc);
        } else {
            grid.remove(r, c);  // budget too thin, leave this neuron unrepaired
        }
    }
    for (std::size_t c = 0; c < cols; ++c) {
        if (grid.col_count[c] > 0) continue;
        const std::size_t r = rng.uniform_index(rows);
        grid.add(r, c, SIZE_MAX);
        std::size_t dr = 0, dc = 0;
        if (grid.find_donor(dr, dc)) {
            grid.remove(dr, dc);
        } else {
            grid.remove(r, c);
        }
    }

    Mask m(rows, cols, 0);
    for (std::size_t i = 0; i < total; ++i) m.bits[i] = grid.kept[i];
    return m;
}

}  // namespace

std::size_t MaskSet::nnz() const {
    std::size_t total = 0;
    for (const Mask& m : seq_masks) total += m.nnz();
    return total;
}

double min_repairable_density(const Network& net) {
    std::size_t need = 0;
    for (const Matrix& w : net.seq_weights) need += std::max(w.rows, w.cols);
    return static_cast<double>(need) / static_cast<double>(net.reference_param_count());
}

double min_feasible_density(const Network& net) {
    return static_cast<double>(net.weight_layers()) /
           static_cast<double>(net.reference_param_count());
}

MaskSet random_prune(const Network& net, double density, std::uint64_t seed) {
    if (!(density > 0.0) || density > 1.0) {
        throw InfeasibleDensityError("density must be in (0, 1], got " + std::to_string(density));
    }
    const std::size_t total = net.reference_param_count();
    const std::size_t budget =
        static_cast<std::size_t>(std::llround(density * static_cast<double>(total)));
    if (budget < net.weight_layers()) {
        throw InfeasibleDensityError(
            "density " + std::to_string(density) + " keeps only " + std::to_string(budget) +
            " connections for " + std::to_string(net.weight_layers()) +
            " layers; minimum feasible density is " + std::to_string(min_feasible_density(net)) +
            " (full degree repair needs " + std::to_string(min_repairable_density(net)) + ")");
    }

    std::vector<std::size_t> capacity;
    for (const Matrix& w : net.seq_weights) capacity.push_back(w.size());
    const std::vector<std::size_t> quota = allocate_proportional(capacity, budget, 1);

    Rng rng(seed);
    MaskSet masks;
    masks.target_density = density;
    for (std::size_t l = 0; l < net.seq_weights.size(); ++l) {
        Rng layer_rng = rng.substream(l);
        masks.seq_masks.push_back(prune_layer_random(net.seq_weights[l].rows,
                                                     net.seq_weights[l].cols, quota[l],
                                                     layer_rng));
    }
    return masks;
}

SaliencyMap snip_saliency(const Network& net, const std::vector<Sample>& batch) {
    if (batch.empty()) throw ConfigError("saliency needs a non-empty batch");

    Gradients acc = zero_gradients_like(net);
    for (const auto& [x, label] : batch) {
        const Activations acts = forward(net, x);
        acc.add_scaled(backward(net, acts, label), 1.0);
    }
    acc.scale(1.0 / static_cast<double>(batch.size()));

    SaliencyMap sal;
    for (std::size_t l = 0; l < net.seq_weights.size(); ++l) {
        const Matrix& w = net.seq_weights[l];
        Matrix s(w.rows, w.cols);
        for (std::size_t i = 0; i < w.data.size(); ++i) {
            s.data[i] = std::abs(w.data[i] * acc.seq_weights[l].data[i]);
        }
        sal.layers.push_back(std::move(s));
    }
    return sal;
}

MaskSet csp_prune_from_saliency(const Network& net, const SaliencyMap& saliency,
                                double density) {
    if (!(density > 0.0) || density > 1.0) {
        throw InfeasibleDensityError("density must be in (0, 1], got " + std::to_string(density));
    }
    const std::size_t total = net.reference_param_count();
    const std::size_t budget =
        static_cast<std::size_t>(std::llround(density * static_cast<double>(total)));
    if (budget < 1) {
        throw InfeasibleDensityError("density " + std::to_string(density) +
                                     " keeps no connections at all");
    }

    struct Entry {
        double s;
        std::size_t layer, row, col;
    };
    std::vector<Entry> entries;
    entries.reserve(total);
    for (std::size_t l = 0; l < saliency.layers.size(); ++l) {
        const Matrix& s = saliency.layers[l];
        for (std::size_t r = 0; r < s.rows; ++r) {
            for (std::size_t c = 0; c < s.cols; ++c) {
                entries.push_back({s(r, c), l, r, c});
            }
        }
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.s != b.s) return a.s > b.s;
        return std::tie(a.layer, a.row, a.col) < std::tie(b.layer, b.row, b.col);
    });

    MaskSet masks;
    masks.target_density = density;
    for (const Matrix& w : net.seq_weights) masks.seq_masks.emplace_back(w.rows, w.cols, 0);
    for (std::size_t i = 0; i < budget; ++i) {
        masks.seq_masks[entries[i].layer](entries[i].row, entries[i].col) = 1;
    }
    return masks;
}

MaskSet csp_prune(const Network& net, const std::vector<Sample>& batch, double density) {
    return csp_prune_from_saliency(net, snip_saliency(net, batch), density);
}

void apply_mask_set(Network& net, const MaskSet& masks) {
    if (masks.seq_masks.size() != net.seq_masks.size()) {
        throw DimensionError("mask set has " + std::to_string(masks.seq_masks.size()) +
                             " layers, network has " + std::to_string(net.seq_masks.size()));
    }
    for (std::size_t l = 0; l < masks.seq_masks.size(); ++l) {
        if (masks.seq_masks[l].rows != net.seq_masks[l].rows ||
            masks.seq_masks[l].cols != net.seq_masks[l].cols) {
            throw DimensionError("mask shape mismatch at layer " + std::to_string(l));
        }
    }
    net.seq_masks = masks.seq_masks;
    for (std::size_t l = 0; l < net.seq_weights.size(); ++l) {
        net.seq_weights[l] = masked_apply(net.seq_weights[l], net.seq_masks[l]);
    }
}

}  // namespace n2n
