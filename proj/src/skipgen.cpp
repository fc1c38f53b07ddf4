#include "n2n/skipgen.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "n2n/budget.hpp"
#include "n2n/errors.hpp"
#include "n2n/rng.hpp"

namespace n2n {

namespace {

struct Entry {
    double saliency;
    std::size_t layer, row, col;
};

}  // namespace

void SkipBudget::validate() const {
    if (!(total_density > 0.0 && total_density <= 1.0)) {
        throw InfeasibleDensityError("total_density must lie in (0, 1], got " +
                                     std::to_string(total_density));
    }
    if (!(split_ratio > 0.0 && split_ratio < 1.0)) {
        throw InfeasibleDensityError("split_ratio must lie in the open interval (0, 1), got " +
                                     std::to_string(split_ratio));
    }
    if (span < 2) {
        throw ConfigError("skip span must be at least 2, got " + std::to_string(span));
    }
}

Network insert_n2nskip(const Network& net, const MaskSet& masks, const SkipBudget& budget,
                       std::uint64_t seed, const SaliencyMap* saliency) {
    budget.validate();
    if (!net.skips.empty()) {
        throw ConfigError("insert_n2nskip requires a network without existing skip connections");
    }
    const std::size_t layers = net.weight_layers();
    if (budget.span > layers) {
        throw ConfigError("skip span " + std::to_string(budget.span) + " exceeds network depth " +
                          std::to_string(layers));
    }
    if (masks.seq_masks.size() != layers) {
        throw DimensionError("mask set covers " + std::to_string(masks.seq_masks.size()) +
                             " layers, network has " + std::to_string(layers));
    }
    for (std::size_t l = 0; l < layers; ++l) {
        if (masks.seq_masks[l].rows != net.seq_weights[l].rows ||
            masks.seq_masks[l].cols != net.seq_weights[l].cols) {
            throw DimensionError("mask " + std::to_string(masks.seq_masks[l].rows) + "x" +
                                 std::to_string(masks.seq_masks[l].cols) +
                                 " does not match weight " +
                                 std::to_string(net.seq_weights[l].rows) + "x" +
                                 std::to_string(net.seq_weights[l].cols) + " at layer " +
                                 std::to_string(l));
        }
    }
    if (saliency && saliency->layers.size() != layers) {
        throw DimensionError("saliency map covers " + std::to_string(saliency->layers.size()) +
                             " layers, network has " + std::to_string(layers));
    }

    const std::size_t total_ref = net.reference_param_count();
    const std::size_t before = masks.nnz();
    const auto seq_target = static_cast<std::size_t>(std::llround(
        budget.total_density * (1.0 - budget.split_ratio) * static_cast<double>(total_ref)));
    if (seq_target > before) {
        throw InfeasibleDensityError("sequential target " + std::to_string(seq_target) +
                                     " exceeds the " + std::to_string(before) +
                                     " connections available to thin");
    }
    if (seq_target < layers) {
        throw InfeasibleDensityError("sequential share of the budget (" +
                                     std::to_string(seq_target) + ") cannot cover all " +
                                     std::to_string(layers) + " weight layers");
    }
    const std::size_t skip_total = before - seq_target;
    if (skip_total == 0) {
        throw InfeasibleDensityError("skip share of the budget rounds to zero connections");
    }

    const std::size_t num_skips = layers - budget.span + 1;
    std::vector<std::size_t> capacity(num_skips);
    std::size_t skip_capacity = 0;
    for (std::size_t s = 0; s < num_skips; ++s) {
        capacity[s] = net.layer_dims[s + budget.span] * net.layer_dims[s];
        skip_capacity += capacity[s];
    }
    if (skip_total > skip_capacity) {
        throw InfeasibleDensityError("skip share of the budget (" + std::to_string(skip_total) +
                                     ") exceeds total skip capacity " +
                                     std::to_string(skip_capacity));
    }

    Rng rng(seed);

    // Thin the sequential masks down to density d*(1-r). CSP-origin masks drop
    // their lowest-saliency entries (preserving CSP's selection principle); RP
    // masks drop uniformly at random.
    std::vector<Mask> thinned = masks.seq_masks;
    const std::size_t remove = before - seq_target;
    if (remove > 0) {
        std::vector<Entry> kept;
        kept.reserve(before);
        for (std::size_t l = 0; l < layers; ++l) {
            for (std::size_t r = 0; r < thinned[l].rows; ++r) {
                for (std::size_t c = 0; c < thinned[l].cols; ++c) {
                    if (!thinned[l](r, c)) continue;
                    const double s = saliency ? saliency->layers[l](r, c) : 0.0;
                    kept.push_back({s, l, r, c});
                }
            }
        }
        if (saliency) {
            std::sort(kept.begin(), kept.end(), [](const Entry& a, const Entry& b) {
                if (a.saliency != b.saliency) return a.saliency > b.saliency;
                return std::tie(a.layer, a.row, a.col) < std::tie(b.layer, b.row, b.col);
            });
            for (std::size_t i = seq_target; i < kept.size(); ++i) {
                thinned[kept[i].layer](kept[i].row, kept[i].col) = 0;
            }
        } else {
            Rng thin_rng = rng.substream(1);
            for (const std::size_t idx : thin_rng.sample_without_replacement(kept.size(), remove)) {
                thinned[kept[idx].layer](kept[idx].row, kept[idx].col) = 0;
            }
        }
    }

    const std::vector<std::size_t> quota = allocate_proportional(capacity, skip_total, 0);

    Network out = net;
    out.skip_span = budget.span;
    out.seq_masks = std::move(thinned);
    for (std::size_t l = 0; l < layers; ++l) {
        out.seq_weights[l] = masked_apply(out.seq_weights[l], out.seq_masks[l]);
    }
    for (std::size_t s = 0; s < num_skips; ++s) {
        SkipConn conn;
        conn.from_layer = s;
        conn.to_layer = s + budget.span;
        const std::size_t rows = net.layer_dims[conn.to_layer];
        const std::size_t cols = net.layer_dims[conn.from_layer];
        conn.weight = Matrix(rows, cols);
        conn.mask = Mask(rows, cols, 0);
        Rng skip_rng = rng.substream(2 + s);
        const double sigma = std::sqrt(2.0 / static_cast<double>(cols));
        for (const std::size_t idx : skip_rng.sample_without_replacement(capacity[s], quota[s])) {
            const std::size_t r = idx / cols;
            const std::size_t c = idx % cols;
            conn.mask(r, c) = 1;
            conn.weight(r, c) = skip_rng.normal(0.0, sigma);
        }
        out.skips.push_back(std::move(conn));
    }
    return out;
}

double density(const Network& net) {
    return static_cast<double>(net.total_nnz()) /
           static_cast<double>(net.reference_param_count());
}

}  // namespace n2n
