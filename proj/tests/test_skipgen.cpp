#include <cmath>
#include <cstdlib>
#include <vector>

#include <doctest.h>

#include "n2n/budget.hpp"
#include "n2n/errors.hpp"
#include "n2n/network.hpp"
#include "n2n/pruning.hpp"
#include "n2n/rng.hpp"
#include "n2n/skipgen.hpp"
#include "oracles.hpp"

using n2n::MaskSet;
using n2n::Network;
using n2n::NetworkSpec;
using n2n::SkipBudget;

namespace {

Network make_net(std::vector<std::size_t> dims, std::uint64_t seed = 0) {
    NetworkSpec spec;
    spec.layer_dims = std::move(dims);
    spec.seed = seed;
    return n2n::build_network(spec);
}

std::size_t seq_nnz(const Network& net) {
    std::size_t total = 0;
    for (const auto& m : net.seq_masks) total += m.nnz();
    return total;
}

std::size_t skip_nnz(const Network& net) {
    std::size_t total = 0;
    for (const auto& s : net.skips) total += s.mask.nnz();
    return total;
}

SkipBudget mk_budget(double density, double ratio, std::size_t span = 2) {
    SkipBudget budget;
    budget.total_density = density;
    budget.split_ratio = ratio;
    budget.span = span;
    return budget;
}

}  // namespace

TEST_CASE("allocate_proportional distributes by largest remainder") {
    const auto quotas = n2n::allocate_proportional({60, 30, 10}, 10, 0);
    CHECK(quotas == std::vector<std::size_t>{6, 3, 1});
    const auto capped = n2n::allocate_proportional({2, 100}, 50, 0);
    CHECK(capped[0] <= 2);
    CHECK(capped[0] + capped[1] == 50);
    const auto floor = n2n::allocate_proportional({50, 1, 50}, 10, 1);
    CHECK(floor[1] >= 1);
    CHECK(floor[0] + floor[1] + floor[2] == 10);
}

TEST_CASE("budget split on the calibration network at d=0.10, r=0.5") {
    const Network net = make_net({100, 64, 32, 16, 4}, 1);
    const MaskSet masks = n2n::random_prune(net, 0.10, 2);
    const Network skipped = n2n::insert_n2nskip(net, masks, SkipBudget{0.10, 0.5, 2}, 3);

    const std::size_t seq = seq_nnz(skipped);
    const std::size_t skip = skip_nnz(skipped);
    CHECK(seq == 451);
    CHECK(skip == 451);
    CHECK(seq + skip == masks.nnz());
    // Documented approximate split around the paper's arithmetic.
    CHECK(std::llabs(static_cast<long long>(seq) - 450) <= 4);
    CHECK(std::llabs(static_cast<long long>(seq + skip) - 901) <= 4);

    // Skips exist for every eligible source layer at span 2.
    REQUIRE(skipped.skips.size() == 3);
    CHECK(skipped.skips[0].from_layer == 0);
    CHECK(skipped.skips[0].to_layer == 2);
    CHECK(skipped.skips[2].from_layer == 2);
    CHECK(skipped.skips[2].to_layer == 4);
    for (const auto& s : skipped.skips) {
        CHECK(s.weight.rows == skipped.layer_dims[s.to_layer]);
        CHECK(s.weight.cols == skipped.layer_dims[s.from_layer]);
    }
}

TEST_CASE("budget is conserved across densities") {
    const Network net = make_net({100, 64, 32, 16, 4}, 5);
    for (const double d : {0.10, 0.05, 0.02}) {
        const MaskSet masks = n2n::random_prune(net, d, 6);
        const Network skipped = n2n::insert_n2nskip(net, masks, SkipBudget{d, 0.5, 2}, 7);
        CHECK(skipped.total_nnz() == masks.nnz());
        CHECK(std::fabs(n2n::density(skipped) - d) <= 0.001);
    }
}

TEST_CASE("skip weights live only at sampled mask positions") {
    const Network net = make_net({20, 16, 12, 8}, 8);
    const MaskSet masks = n2n::random_prune(net, 0.2, 9);
    const Network skipped = n2n::insert_n2nskip(net, masks, SkipBudget{0.2, 0.5, 2}, 10);
    for (const auto& s : skipped.skips) {
        std::size_t nonzero_weights = 0;
        for (std::size_t i = 0; i < s.weight.data.size(); ++i) {
            if (!s.mask.bits[i]) {
                CHECK(s.weight.data[i] == 0.0);
            } else if (s.weight.data[i] != 0.0) {
                ++nonzero_weights;
            }
        }
        CHECK(nonzero_weights == s.mask.nnz());  // N(0, 2/fan_in) draws are never exactly 0
    }
}

TEST_CASE("thinned sequential masks are subsets of the pruned masks") {
    const Network net = make_net({40, 30, 20, 10}, 11);
    const MaskSet masks = n2n::random_prune(net, 0.15, 12);
    const Network skipped = n2n::insert_n2nskip(net, masks, SkipBudget{0.15, 0.5, 2}, 13);
    for (std::size_t l = 0; l < skipped.seq_masks.size(); ++l) {
        for (std::size_t i = 0; i < skipped.seq_masks[l].size(); ++i) {
            if (skipped.seq_masks[l].bits[i]) CHECK(masks.seq_masks[l].bits[i] == 1);
        }
        // Thinned weights at dropped positions are zeroed.
        for (std::size_t i = 0; i < skipped.seq_masks[l].size(); ++i) {
            if (!skipped.seq_masks[l].bits[i]) CHECK(skipped.seq_weights[l].data[i] == 0.0);
        }
    }
}

TEST_CASE("insert_n2nskip is deterministic in the seed") {
    const Network net = make_net({30, 24, 18, 12}, 14);
    const MaskSet masks = n2n::random_prune(net, 0.2, 15);
    const Network a = n2n::insert_n2nskip(net, masks, SkipBudget{0.2, 0.5, 2}, 16);
    const Network b = n2n::insert_n2nskip(net, masks, SkipBudget{0.2, 0.5, 2}, 16);
    const Network c = n2n::insert_n2nskip(net, masks, SkipBudget{0.2, 0.5, 2}, 17);
    REQUIRE(a.skips.size() == b.skips.size());
    bool same_as_c = true;
    for (std::size_t s = 0; s < a.skips.size(); ++s) {
        CHECK(a.skips[s].mask.bits == b.skips[s].mask.bits);
        CHECK(a.skips[s].weight.data == b.skips[s].weight.data);
        same_as_c = same_as_c && a.skips[s].mask.bits == c.skips[s].mask.bits;
    }
    for (std::size_t l = 0; l < a.seq_masks.size(); ++l) {
        CHECK(a.seq_masks[l].bits == b.seq_masks[l].bits);
    }
    CHECK_FALSE(same_as_c);
}

TEST_CASE("csp-origin thinning keeps the top saliencies") {
    const Network net = make_net({25, 20, 15, 10}, 18);
    n2n::Rng rng(19);
    std::vector<n2n::Sample> batch;
    for (int i = 0; i < 8; ++i) {
        batch.emplace_back(oracle::random_input(rng, 25), rng.uniform_index(10));
    }
    const n2n::SaliencyMap sal = n2n::snip_saliency(net, batch);
    const MaskSet masks = n2n::csp_prune_from_saliency(net, sal, 0.2);
    const Network skipped = n2n::insert_n2nskip(net, masks, SkipBudget{0.2, 0.5, 2}, 20, &sal);

    // Keeping the top half of a top-20% cut equals a direct top-10% cut.
    const MaskSet direct = n2n::csp_prune_from_saliency(net, sal, 0.2 * 0.5);
    for (std::size_t l = 0; l < direct.seq_masks.size(); ++l) {
        CHECK(skipped.seq_masks[l].bits == direct.seq_masks[l].bits);
    }
}

TEST_CASE("density is reported against the reference parameter count") {
    const Network fresh = make_net({100, 64, 32, 16, 4}, 21);
    CHECK(n2n::density(fresh) == 1.0);

    Network pruned = fresh;
    n2n::apply_mask_set(pruned, n2n::random_prune(fresh, 0.05, 22));
    CHECK(std::fabs(n2n::density(pruned) - 0.05) <= 0.001);

    const MaskSet masks = n2n::random_prune(fresh, 0.10, 23);
    const Network skipped = n2n::insert_n2nskip(fresh, masks, SkipBudget{0.10, 0.5, 2}, 24);
    CHECK(std::fabs(n2n::density(skipped) - 0.10) <= 0.001);
}

TEST_CASE("degenerate split ratios are rejected") {
    CHECK_THROWS_AS(mk_budget(0.1, 0.0).validate(), n2n::InfeasibleDensityError);
    CHECK_THROWS_AS(mk_budget(0.1, 1.0).validate(), n2n::InfeasibleDensityError);
    CHECK_THROWS_AS(mk_budget(0.0, 0.5).validate(), n2n::InfeasibleDensityError);
    CHECK_THROWS_AS(mk_budget(1.2, 0.5).validate(), n2n::InfeasibleDensityError);
    CHECK_THROWS_AS(mk_budget(0.1, 0.5, 1).validate(), n2n::ConfigError);

    const Network net = make_net({100, 64, 32, 16, 4}, 25);
    const MaskSet masks = n2n::random_prune(net, 0.10, 26);
    // r so small the skip share rounds to zero connections.
    CHECK_THROWS_AS(n2n::insert_n2nskip(net, masks, mk_budget(0.10, 1e-9), 27),
                    n2n::InfeasibleDensityError);
    // r so large the sequential share cannot cover every layer.
    CHECK_THROWS_AS(n2n::insert_n2nskip(net, masks, mk_budget(0.10, 1.0 - 1e-9), 27),
                    n2n::InfeasibleDensityError);
}

TEST_CASE("span and precondition violations are rejected") {
    const Network net = make_net({10, 8, 6}, 28);  // two weight layers
    const MaskSet masks = n2n::random_prune(net, 0.5, 29);
    CHECK_THROWS_AS(n2n::insert_n2nskip(net, masks, mk_budget(0.5, 0.5, 3), 30),
                    n2n::ConfigError);

    const Network deep = make_net({10, 8, 6, 4}, 31);
    const MaskSet deep_masks = n2n::random_prune(deep, 0.5, 32);
    const Network once = n2n::insert_n2nskip(deep, deep_masks, SkipBudget{0.5, 0.5, 2}, 33);
    CHECK_THROWS_AS(n2n::insert_n2nskip(once, deep_masks, mk_budget(0.5, 0.5), 34),
                    n2n::ConfigError);

    MaskSet wrong = deep_masks;
    wrong.seq_masks.pop_back();
    CHECK_THROWS_AS(n2n::insert_n2nskip(deep, wrong, mk_budget(0.5, 0.5), 35),
                    n2n::DimensionError);
}

TEST_CASE("span covering the whole network is allowed when it fits") {
    const Network net = make_net({10, 8, 6, 4}, 36);  // three weight layers
    const MaskSet masks = n2n::random_prune(net, 0.5, 37);
    const Network skipped = n2n::insert_n2nskip(net, masks, SkipBudget{0.5, 0.5, 3}, 38);
    REQUIRE(skipped.skips.size() == 1);
    CHECK(skipped.skips[0].from_layer == 0);
    CHECK(skipped.skips[0].to_layer == 3);
    CHECK(skipped.total_nnz() == masks.nnz());
}
