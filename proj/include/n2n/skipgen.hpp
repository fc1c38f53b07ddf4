#pragma once

#include <cstdint>

#include "n2n/network.hpp"
#include "n2n/pruning.hpp"

namespace n2n {

struct SkipBudget {
    double total_density = 0.1;  // d, relative to the reference parameter count
    double split_ratio = 0.5;    // share of the budget handed to skip connections
    std::size_t span = 2;        // k, layers jumped

    void validate() const;
};

// Transforms a pruned sequential network into an N2NSkip network: thins the
// sequential masks to density d*(1-r) and spends the freed budget on randomly
// placed skip connections between every eligible (l, l+k) pair, keeping the
// total connection count. Thinning removes the lowest-saliency entries when a
// saliency map is supplied (CSP-origin masks) and uniform-random entries
// otherwise.
Network insert_n2nskip(const Network& net, const MaskSet& masks, const SkipBudget& budget,
                       std::uint64_t seed, const SaliencyMap* saliency = nullptr);

// Fraction of the reference network's sequential parameter count that is
// unmasked (sequential + skip connections combined).
double density(const Network& net);

}  // namespace n2n
