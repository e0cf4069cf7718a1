#include "metrics.hpp"

#include "errors.hpp"

namespace sift {

Metrics compute_metrics(const Confusion& c) {
    if (c.total() == 0) {
        raise(ErrorKind::EmptyConfusion, "confusion matrix has no samples");
    }
    Metrics m;
    double tp = static_cast<double>(c.tp);
    double tn = static_cast<double>(c.tn);
    double fp = static_cast<double>(c.fp);
    double fn = static_cast<double>(c.fn);
    m.precision = tp + fp == 0.0 ? 0.0 : tp / (tp + fp);
    m.recall = tp + fn == 0.0 ? 0.0 : tp / (tp + fn);
    m.accuracy = (tp + tn) / (tp + tn + fp + fn);
    double pr = m.precision * m.recall;
    m.f1 = m.precision + m.recall == 0.0 ? 0.0 : 2.0 * pr / (m.precision + m.recall);
    double f2_den = 4.0 * m.precision + m.recall;
    m.f2 = f2_den == 0.0 ? 0.0 : 5.0 * pr / f2_den;
    return m;
}

Confusion swap_classes(const Confusion& c) {
    return Confusion{c.tn, c.tp, c.fn, c.fp};
}

} // namespace sift
