#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "n2n/matrix.hpp"

namespace n2n {

// Feature rows are samples; labels are class indices < classes.
struct Dataset {
    Matrix train_x;
    std::vector<std::size_t> train_y;
    Matrix test_x;
    std::vector<std::size_t> test_y;
    std::size_t feature_dim = 0;
    std::size_t classes = 0;
};

// Gaussian blobs: class means uniform in [-1,1]^dim, per-sample noise with
// std = spread, deterministic shuffle, 80/20 train/test split.
Dataset gen_blobs(std::size_t classes, std::size_t dim, std::size_t per_class, double spread,
                  std::uint64_t seed);

// CSV rows are features...,label (header optional). The first 80% of rows in
// file order become the train split. Features are standardized per column to
// mean 0 / std 1 using train-split statistics only; columns with train std
// below 1e-12 are zeroed.
Dataset load_csv(const std::string& path, std::size_t classes);

// Writes train rows then test rows as features...,label with a header, so
// load_csv on the result reproduces the same split.
void save_csv(const Dataset& ds, const std::string& path);

}  // namespace n2n
