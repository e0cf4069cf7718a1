#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace sift {

// All standard deviations in this project use the population convention
// (divide by n); the std of a singleton is 0. Means and variances are
// two-pass so results do not depend on reduction order.

inline double vec_mean(std::span<const double> v) {
    if (v.empty()) return 0.0;
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

inline double vec_pop_std(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    double mu = vec_mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - mu) * (x - mu);
    return std::sqrt(ss / static_cast<double>(v.size()));
}

inline double vec_min(std::span<const double> v) {
    return v.empty() ? 0.0 : *std::min_element(v.begin(), v.end());
}

inline double vec_max(std::span<const double> v) {
    return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

// Median of even-sized sets is the mean of the two central order statistics.
inline double vec_median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace sift
