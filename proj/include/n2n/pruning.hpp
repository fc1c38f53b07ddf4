#pragma once

#include <cstdint>
#include <vector>

#include "n2n/network.hpp"

namespace n2n {

struct MaskSet {
    std::vector<Mask> seq_masks;  // aligned with Network::seq_weights
    double target_density = 1.0;

    std::size_t nnz() const;
};

// Per-layer |w * dL/dw| saliencies; shapes mirror the sequential weights.
struct SaliencyMap {
    std::vector<Matrix> layers;
};

using Sample = std::pair<std::vector<double>, std::size_t>;  // (features, label)

// Density below which the per-layer degree-repair guarantee (every neuron
// keeps an in and an out edge) is achievable: sum of max(rows, cols) per layer.
double min_repairable_density(const Network& net);

// Density below which some layer matrix would receive no connections at all.
double min_feasible_density(const Network& net);

// Uniform random masks at density d, budget split across layers proportionally
// to parameter count. Neurons left without an in or out edge are repaired by
// swapping in an edge and dropping the lowest-priority random pick in the same
// layer; below min_repairable_density the repair is best-effort.
MaskSet random_prune(const Network& net, double density, std::uint64_t seed);

// Connection sensitivity |w * dL/dw| on the mean loss of one batch at
// initialization.
SaliencyMap snip_saliency(const Network& net, const std::vector<Sample>& batch);

// Keep the global top round(d * total) weights by saliency; ties broken by
// (layer, row, col) ascending. No degree repair.
MaskSet csp_prune(const Network& net, const std::vector<Sample>& batch, double density);
MaskSet csp_prune_from_saliency(const Network& net, const SaliencyMap& saliency, double density);

// Install pruning masks into the network.
void apply_mask_set(Network& net, const MaskSet& masks);

}  // namespace n2n
