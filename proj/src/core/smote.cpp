#include "smote.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "rng.hpp"

namespace sift {

std::vector<std::vector<int>> minority_neighbor_lists(const Matrix& minority, int k_neighbors) {
    int n = minority.rows;
    int k_eff = std::min(k_neighbors, n - 1);
    std::vector<std::vector<int>> lists(static_cast<size_t>(n));
    std::vector<std::pair<double, int>> dist;
    for (int i = 0; i < n; ++i) {
        dist.clear();
        auto xi = minority.row(i);
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            auto xj = minority.row(j);
            double d2 = 0.0;
            for (int c = 0; c < minority.cols; ++c) {
                double d = xi[static_cast<size_t>(c)] - xj[static_cast<size_t>(c)];
                d2 += d * d;
            }
            dist.emplace_back(d2, j);
        }
        std::partial_sort(dist.begin(), dist.begin() + k_eff, dist.end());
        auto& out = lists[static_cast<size_t>(i)];
        out.reserve(static_cast<size_t>(k_eff));
        for (int k = 0; k < k_eff; ++k) out.push_back(dist[static_cast<size_t>(k)].second);
    }
    return lists;
}

SmoteResult smote(const Matrix& x, const std::vector<int>& labels, const SmoteConfig& config) {
    if (labels.size() != static_cast<size_t>(x.rows)) {
        raise(ErrorKind::DimensionMismatch, "label count does not match row count");
    }
    if (config.k_neighbors < 1) {
        raise(ErrorKind::InvalidConfig, "k_neighbors must be at least 1");
    }
    if (!(config.target_ratio > 0.0) || config.target_ratio > 1.0) {
        raise(ErrorKind::InvalidConfig, "target_ratio must be in (0, 1]");
    }

    int64_t count1 = std::count(labels.begin(), labels.end(), 1);
    int64_t count0 = static_cast<int64_t>(labels.size()) - count1;
    // tie goes to class 1, the class SMOTE exists for in this pipeline
    int minority_label = count1 <= count0 ? 1 : 0;
    int64_t n_min = minority_label == 1 ? count1 : count0;
    int64_t n_maj = static_cast<int64_t>(labels.size()) - n_min;
    if (n_min < 2) {
        raise(ErrorKind::MinorityTooSmall, "minority class needs at least 2 rows for SMOTE");
    }

    Matrix minority;
    minority.rows = static_cast<int>(n_min);
    minority.cols = x.cols;
    minority.data.reserve(static_cast<size_t>(n_min) * static_cast<size_t>(x.cols));
    for (int r = 0; r < x.rows; ++r) {
        if (labels[static_cast<size_t>(r)] != minority_label) continue;
        auto src = x.row(r);
        minority.data.insert(minority.data.end(), src.begin(), src.end());
    }

    int64_t n_syn = static_cast<int64_t>(std::floor(config.target_ratio * static_cast<double>(n_maj))) - n_min;
    if (n_syn < 0) n_syn = 0;

    SmoteResult result;
    result.minority_label = minority_label;
    result.synthetic_count = static_cast<int>(n_syn);
    result.labels = labels;
    result.x.rows = x.rows + static_cast<int>(n_syn);
    result.x.cols = x.cols;
    result.x.data = x.data;
    result.x.data.reserve(static_cast<size_t>(result.x.rows) * static_cast<size_t>(x.cols));

    if (n_syn > 0) {
        auto neighbors = minority_neighbor_lists(minority, config.k_neighbors);
        int k_eff = static_cast<int>(neighbors[0].size());
        SplitMix64 rng(config.seed);
        for (int64_t s = 0; s < n_syn; ++s) {
            int i = static_cast<int>(rng.next_below(static_cast<uint64_t>(n_min)));
            int nn = neighbors[static_cast<size_t>(i)][static_cast<size_t>(
                rng.next_below(static_cast<uint64_t>(k_eff)))];
            double delta = rng.next_double();
            auto xi = minority.row(i);
            auto xn = minority.row(nn);
            for (int c = 0; c < x.cols; ++c) {
                double base = xi[static_cast<size_t>(c)];
                result.x.data.push_back(base + delta * (xn[static_cast<size_t>(c)] - base));
            }
            result.labels.push_back(minority_label);
        }
    }
    return result;
}

} // namespace sift
