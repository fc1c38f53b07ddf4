#include "n2n/budget.hpp"

#include <algorithm>
#include <utility>

namespace n2n {

std::vector<std::size_t> allocate_proportional(const std::vector<std::size_t>& capacity,
                                               std::size_t budget, std::size_t min_per_bin) {
    const std::size_t bins = capacity.size();
    std::size_t total = 0;
    for (const std::size_t c : capacity) total += c;
    budget = std::min(budget, total);

    std::vector<std::size_t> quota(bins, 0);
    std::vector<std::pair<double, std::size_t>> remainder;  // (-frac, bin): largest first
    std::size_t assigned = 0;
    for (std::size_t b = 0; b < bins; ++b) {
        const double raw = static_cast<double>(budget) * static_cast<double>(capacity[b]) /
                           static_cast<double>(total);
        quota[b] = std::min(static_cast<std::size_t>(raw), capacity[b]);
        assigned += quota[b];
        remainder.emplace_back(-(raw - static_cast<double>(quota[b])), b);
    }
    std::sort(remainder.begin(), remainder.end());
    for (std::size_t i = 0; assigned < budget; i = (i + 1) % bins) {
        const std::size_t b = remainder[i].second;
        if (quota[b] < capacity[b]) {
            ++quota[b];
            ++assigned;
        }
    }
    for (std::size_t b = 0; b < bins; ++b) {
        while (quota[b] < std::min(min_per_bin, capacity[b])) {
            const std::size_t donor = static_cast<std::size_t>(
                std::max_element(quota.begin(), quota.end()) - quota.begin());
            if (quota[donor] <= min_per_bin) break;
            --quota[donor];
            ++quota[b];
        }
    }
    return quota;
}

}  // namespace n2n
