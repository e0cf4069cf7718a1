#pragma once

#include <cstdint>
#include <vector>

#include "matrix.hpp"

namespace sift {

struct SmoteConfig {
    int k_neighbors = 5;
    double target_ratio = 1.0; // minority/majority after oversampling
    uint64_t seed = 0;
};

struct SmoteResult {
    Matrix x;                // originals in input order, synthetic rows appended
    std::vector<int> labels;
    int minority_label = 0;
    int synthetic_count = 0;
};

// x_new = x_i + delta * (x_nn - x_i). Per synthetic row the seeded stream is
// consumed in the order: base index among minority rows, neighbor choice in
// 0..k_eff-1, delta. Neighbor lists use Euclidean distance with ties broken
// by smaller minority index.
SmoteResult smote(const Matrix& x, const std::vector<int>& labels, const SmoteConfig& config);

// Nearest-neighbor lists as smote() sees them (ordered, k_eff entries per
// minority row, indices into the minority subset). Exposed so callers can
// verify the segment property independently.
std::vector<std::vector<int>> minority_neighbor_lists(const Matrix& minority, int k_neighbors);

} // namespace sift
