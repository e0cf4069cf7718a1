#include "svm.hpp"

#include <algorithm>
#include <cmath>
#include <list>
#include <unordered_map>

#include "errors.hpp"

namespace sift {

namespace {

constexpr double kStepEps = 1e-8;            // minimal multiplier progress
constexpr double kBoundSnap = 1e-12;         // snap clipped multipliers to 0 or C
constexpr size_t kCacheBudgetBytes = 256u << 20;

double kernel(std::span<const double> a, std::span<const double> b, double gamma) {
    double d2 = 0.0;
    for (size_t c = 0; c < a.size(); ++c) {
        double d = a[c] - b[c];
        d2 += d * d;
    }
    return std::exp(-gamma * d2);
}

class KernelCache {
public:
    KernelCache(const Matrix& x, double gamma) : x_(x), gamma_(gamma) {
        size_t n = static_cast<size_t>(x.rows);
        max_rows_ = std::max<size_t>(2, kCacheBudgetBytes / (sizeof(double) * std::max<size_t>(n, 1)));
        max_rows_ = std::min(max_rows_, n);
    }

    // Reference stays valid while the row is one of the two most recent.
    const std::vector<double>& row(int i) {
        auto it = rows_.find(i);
        if (it != rows_.end()) {
            lru_.splice(lru_.begin(), lru_, it->second.second);
            return it->second.first;
        }
        if (rows_.size() >= max_rows_) {
            int victim = lru_.back();
            lru_.pop_back();
            rows_.erase(victim);
        }
        std::vector<double> values(static_cast<size_t>(x_.rows));
        auto xi = x_.row(i);
        for (int j = 0; j < x_.rows; ++j) {
            values[static_cast<size_t>(j)] = kernel(xi, x_.row(j), gamma_);
        }
        lru_.push_front(i);
        auto [pos, inserted] = rows_.emplace(i, std::make_pair(std::move(values), lru_.begin()));
        return pos->second.first;
    }

private:
    const Matrix& x_;
    double gamma_;
    size_t max_rows_;
    std::list<int> lru_;
    std::unordered_map<int, std::pair<std::vector<double>, std::list<int>::iterator>> rows_;
};

struct SmoSolver {
    const Matrix& x;
    std::vector<double> s; // labels as -1/+1
    double c;
    double tol;
    KernelCache cache;
    std::vector<double> alpha;
    // g_t = sum_j alpha_j s_j K(t,j) - s_t; the offset-free part of the
    // prediction error. b never enters pair selection, so it is computed
    // once at the end from the feasible interval instead of being tracked
    // step by step.
    std::vector<double> grad;
    double b = 0.0;

    SmoSolver(const Matrix& mat, const std::vector<int>& labels, double c_in, double tol_in,
              double gamma)
        : x(mat), c(c_in), tol(tol_in), cache(mat, gamma) {
        s.reserve(labels.size());
        for (int y : labels) s.push_back(y == 1 ? 1.0 : -1.0);
        alpha.assign(labels.size(), 0.0);
        grad.resize(labels.size());
        for (size_t i = 0; i < labels.size(); ++i) grad[i] = -s[i];
    }

    // Multipliers whose g may sit above b (room to grow toward the
    // constraint) and below b respectively; optimality needs
    // max_low(g) <= b <= min_up(g).
    bool in_up(int i) const {
        double a = alpha[static_cast<size_t>(i)];
        return s[static_cast<size_t>(i)] > 0.0 ? a < c : a > 0.0;
    }

    bool in_low(int i) const {
        double a = alpha[static_cast<size_t>(i)];
        return s[static_cast<size_t>(i)] > 0.0 ? a > 0.0 : a < c;
    }

    bool take_step(int i1, int i2) {
        if (i1 == i2) return false;
        double alph1 = alpha[static_cast<size_t>(i1)];
        double alph2 = alpha[static_cast<size_t>(i2)];
        double s1 = s[static_cast<size_t>(i1)];
        double s2 = s[static_cast<size_t>(i2)];
        double e1 = grad[static_cast<size_t>(i1)];
        double e2 = grad[static_cast<size_t>(i2)];
        double sgn = s1 * s2;

        double lo, hi;
        if (s1 != s2) {
            lo = std::max(0.0, alph2 - alph1);
            hi = std::min(c, c + alph2 - alph1);
        } else {
            lo = std::max(0.0, alph1 + alph2 - c);
            hi = std::min(c, alph1 + alph2);
        }
        if (lo >= hi) return false;

        const auto& k1 = cache.row(i1);
        const auto& k2 = cache.row(i2);
        double k11 = k1[static_cast<size_t>(i1)];
        double k12 = k1[static_cast<size_t>(i2)];
        double k22 = k2[static_cast<size_t>(i2)];
        double eta = k11 + k22 - 2.0 * k12;

        double a2;
        if (eta > 0.0) {
            a2 = std::clamp(alph2 + s2 * (e1 - e2) / eta, lo, hi);
        } else {
            // objective at the segment endpoints (eta can only be ~0 for
            // duplicate rows under an RBF kernel)
            double f1 = s1 * e1 - alph1 * k11 - sgn * alph2 * k12;
            double f2 = s2 * e2 - sgn * alph1 * k12 - alph2 * k22;
            double l1 = alph1 + sgn * (alph2 - lo);
            double h1 = alph1 + sgn * (alph2 - hi);
            double lo_obj = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 + 0.5 * lo * lo * k22 +
                            sgn * lo * l1 * k12;
            double hi_obj = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 + 0.5 * hi * hi * k22 +
                            sgn * hi * h1 * k12;
            if (lo_obj < hi_obj - kStepEps) a2 = lo;
            else if (lo_obj > hi_obj + kStepEps) a2 = hi;
            else a2 = alph2;
        }
        if (std::abs(a2 - alph2) < kStepEps * (a2 + alph2 + kStepEps)) return false;

        double a1 = std::clamp(alph1 + sgn * (alph2 - a2), 0.0, c);
        // Clipping leaves 1e-19-scale residue in the partner multiplier;
        // snap it so bound-set membership stays exact.
        if (a1 < kBoundSnap * c) a1 = 0.0;
        else if (a1 > (1.0 - kBoundSnap) * c) a1 = c;
        if (a2 < kBoundSnap * c) a2 = 0.0;
        else if (a2 > (1.0 - kBoundSnap) * c) a2 = c;
        if (a1 == alph1 && a2 == alph2) return false;

        double d1 = s1 * (a1 - alph1);
        double d2 = s2 * (a2 - alph2);
        for (int j = 0; j < x.rows; ++j) {
            grad[static_cast<size_t>(j)] +=
                d1 * k1[static_cast<size_t>(j)] + d2 * k2[static_cast<size_t>(j)];
        }
        alpha[static_cast<size_t>(i1)] = a1;
        alpha[static_cast<size_t>(i2)] = a2;
        return true;
    }

    // Most-violating pair: the up-set index with the smallest g and the
    // low-set index with the largest g. Ties go to the smaller index.
    struct Pair {
        int up = -1;
        int low = -1;
        double gap = 0.0;
    };

    Pair select() const {
        Pair p;
        double g_up = 0.0;
        double g_low = 0.0;
        for (int i = 0; i < x.rows; ++i) {
            double g = grad[static_cast<size_t>(i)];
            if (in_up(i) && (p.up < 0 || g < g_up)) {
                p.up = i;
                g_up = g;
            }
            if (in_low(i) && (p.low < 0 || g > g_low)) {
                p.low = i;
                g_low = g;
            }
        }
        if (p.up >= 0 && p.low >= 0) p.gap = g_low - g_up;
        return p;
    }

    void solve(int max_epochs) {
        // One legacy "epoch" bounded a full sweep, so allow rows-many pair
        // steps per epoch before giving up.
        long long cap = static_cast<long long>(max_epochs) * std::max(x.rows, 1);
        Pair p;
        for (long long it = 0; it < cap; ++it) {
            p = select();
            if (p.up < 0 || p.low < 0 || p.gap <= tol) break;
            if (!take_step(p.up, p.low)) break; // step below numeric floor
        }
        // Place the offset mid-interval: max_low(g) <= b <= min_up(g) holds
        // within the stop gap, so this splits any residual violation evenly.
        p = select();
        if (p.up >= 0 && p.low >= 0) {
            b = 0.5 * (grad[static_cast<size_t>(p.up)] + grad[static_cast<size_t>(p.low)]);
        } else if (p.up >= 0) {
            b = grad[static_cast<size_t>(p.up)];
        } else if (p.low >= 0) {
            b = grad[static_cast<size_t>(p.low)];
        }
    }
};

} // namespace

std::pair<double, double> fit_platt_scaling(const std::vector<double>& decision,
                                            const std::vector<int>& labels) {
    size_t n = decision.size();
    double prior1 = 0.0;
    for (int y : labels) prior1 += static_cast<double>(y);
    double prior0 = static_cast<double>(n) - prior1;
    double hi_target = (prior1 + 1.0) / (prior1 + 2.0);
    double lo_target = 1.0 / (prior0 + 2.0);
    std::vector<double> target(n);
    for (size_t i = 0; i < n; ++i) target[i] = labels[i] == 1 ? hi_target : lo_target;

    double a = 0.0;
    double b = std::log((prior0 + 1.0) / (prior1 + 1.0));

    auto objective = [&](double pa, double pb) {
        double sum = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double f = pa * decision[i] + pb;
            if (f >= 0.0) sum += target[i] * f + std::log1p(std::exp(-f));
            else sum += (target[i] - 1.0) * f + std::log1p(std::exp(f));
        }
        return sum;
    };

    constexpr double kSigma = 1e-12;
    double fval = objective(a, b);
    for (int iter = 0; iter < 100; ++iter) {
        double h11 = kSigma, h22 = kSigma, h21 = 0.0;
        double g1 = 0.0, g2 = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double f = a * decision[i] + b;
            double p, q;
            if (f >= 0.0) {
                double e = std::exp(-f);
                p = e / (1.0 + e);
                q = 1.0 / (1.0 + e);
            } else {
                double e = std::exp(f);
                p = 1.0 / (1.0 + e);
                q = e / (1.0 + e);
            }
            double d2 = p * q;
            h11 += decision[i] * decision[i] * d2;
            h22 += d2;
            h21 += decision[i] * d2;
            double d1 = target[i] - p;
            g1 += decision[i] * d1;
            g2 += d1;
        }
        if (std::abs(g1) < 1e-5 && std::abs(g2) < 1e-5) break;

        double det = h11 * h22 - h21 * h21;
        double da = -(h22 * g1 - h21 * g2) / det;
        double db = -(h11 * g2 - h21 * g1) / det;
        double gd = g1 * da + g2 * db;

        double step = 1.0;
        while (step >= 1e-10) {
            double na = a + step * da;
            double nb = b + step * db;
            double nval = objective(na, nb);
            if (nval < fval + 1e-4 * step * gd) {
                a = na;
                b = nb;
                fval = nval;
                break;
            }
            step /= 2.0;
        }
        if (step < 1e-10) break; // line search failed
    }
    return {a, b};
}

std::unique_ptr<SvmModel> SvmModel::train(const ModelSpec& spec, const Matrix& x,
                                          const std::vector<int>& labels, SmoTrace* trace) {
    const auto& hp = spec.svm;
    double gamma = hp.gamma > 0.0 ? hp.gamma : 1.0 / static_cast<double>(x.cols);

    SmoSolver solver(x, labels, hp.c, hp.tol, gamma);
    solver.solve(hp.max_epochs);

    if (trace) {
        trace->alpha = solver.alpha;
        trace->b = solver.b;
        trace->gamma = gamma;
    }

    std::vector<double> decision(static_cast<size_t>(x.rows));
    for (int i = 0; i < x.rows; ++i) {
        decision[static_cast<size_t>(i)] =
            solver.grad[static_cast<size_t>(i)] + solver.s[static_cast<size_t>(i)] - solver.b;
    }
    auto [platt_a, platt_b] = fit_platt_scaling(decision, labels);

    Matrix sv;
    sv.cols = x.cols;
    std::vector<double> coeff;
    for (int i = 0; i < x.rows; ++i) {
        if (solver.alpha[static_cast<size_t>(i)] <= 0.0) continue;
        auto xi = x.row(i);
        sv.data.insert(sv.data.end(), xi.begin(), xi.end());
        coeff.push_back(solver.alpha[static_cast<size_t>(i)] * solver.s[static_cast<size_t>(i)]);
        ++sv.rows;
    }

    return std::unique_ptr<SvmModel>(new SvmModel(spec, x.cols, std::move(sv), std::move(coeff),
                                                  solver.b, gamma, platt_a, platt_b));
}

std::unique_ptr<SvmModel> SvmModel::from_params(const ModelSpec& spec, int feature_count,
                                                const nlohmann::json& params) {
    Matrix sv;
    sv.cols = feature_count;
    for (const auto& row : params.at("support_vectors")) {
        auto values = row.get<std::vector<double>>();
        if (values.size() != static_cast<size_t>(feature_count)) {
            raise(ErrorKind::SchemaMismatch, "support vector length does not match feature count");
        }
        sv.data.insert(sv.data.end(), values.begin(), values.end());
        ++sv.rows;
    }
    auto coeff = params.at("coeff").get<std::vector<double>>();
    if (coeff.size() != static_cast<size_t>(sv.rows)) {
        raise(ErrorKind::SchemaMismatch, "coefficient count does not match support vectors");
    }
    return std::unique_ptr<SvmModel>(new SvmModel(
        spec, feature_count, std::move(sv), std::move(coeff), params.at("b").get<double>(),
        params.at("gamma").get<double>(), params.at("platt_a").get<double>(),
        params.at("platt_b").get<double>()));
}

double SvmModel::decision_value(std::span<const double> x) const {
    double u = -b_;
    for (int i = 0; i < sv_.rows; ++i) {
        u += coeff_[static_cast<size_t>(i)] * kernel(sv_.row(i), x, gamma_);
    }
    return u;
}

double SvmModel::predict_proba_checked(std::span<const double> x) const {
    double f = platt_a_ * decision_value(x) + platt_b_;
    if (f >= 0.0) {
        double e = std::exp(-f);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(f));
}

std::vector<double> SvmModel::feature_importance() const {
    raise(ErrorKind::Unsupported, "feature importance is undefined for the RBF SVM");
}

nlohmann::json SvmModel::params_json() const {
    nlohmann::json sv = nlohmann::json::array();
    for (int i = 0; i < sv_.rows; ++i) {
        auto row = sv_.row(i);
        sv.push_back(std::vector<double>(row.begin(), row.end()));
    }
    return nlohmann::json{{"support_vectors", sv}, {"coeff", coeff_},   {"b", b_},
                          {"gamma", gamma_},       {"platt_a", platt_a_}, {"platt_b", platt_b_}};
}

} // namespace sift
