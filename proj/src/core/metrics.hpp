#pragma once

#include <cstdint>

namespace sift {

// Positive class is malicious unless swapped.
struct Confusion {
    uint64_t tp = 0;
    uint64_t tn = 0;
    uint64_t fp = 0;
    uint64_t fn = 0;

    uint64_t total() const { return tp + tn + fp + fn; }
};

struct Metrics {
    double precision = 0.0;
    double recall = 0.0;
    double accuracy = 0.0;
    double f1 = 0.0;
    double f2 = 0.0;
};

// Any 0/0 denominator yields 0.
Metrics compute_metrics(const Confusion& c);

// View with the good class treated as positive.
Confusion swap_classes(const Confusion& c);

} // namespace sift
