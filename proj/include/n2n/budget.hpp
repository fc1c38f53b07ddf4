#pragma once

#include <cstddef>
#include <vector>

namespace n2n {

// Largest-remainder split of `budget` across bins proportionally to capacity.
// Quotas never exceed capacity; when min_per_bin is 1, each bin keeps at least
// one unit (stolen from the largest quota).
std::vector<std::size_t> allocate_proportional(const std::vector<std::size_t>& capacity,
                                               std::size_t budget, std::size_t min_per_bin);

}  // namespace n2n
