#include "logreg.hpp"

#include <cmath>

#include "errors.hpp"

namespace sift {

namespace {

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + e^z) without overflow
double softplus(double z) {
    return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

double margin(const Matrix& x, int row, std::span<const double> theta) {
    auto xi = x.row(row);
    double z = theta[static_cast<size_t>(x.cols)]; // bias
    for (int c = 0; c < x.cols; ++c) {
        z += theta[static_cast<size_t>(c)] * xi[static_cast<size_t>(c)];
    }
    return z;
}

} // namespace

double logreg_loss(const Matrix& x, const std::vector<int>& labels,
                   std::span<const double> theta, double lambda) {
    if (theta.size() != static_cast<size_t>(x.cols) + 1) {
        raise(ErrorKind::DimensionMismatch, "theta must have feature_count + 1 entries");
    }
    double n = static_cast<double>(x.rows);
    double loss = 0.0;
    for (int r = 0; r < x.rows; ++r) {
        double z = margin(x, r, theta);
        loss += softplus(z) - static_cast<double>(labels[static_cast<size_t>(r)]) * z;
    }
    loss /= n;
    double reg = 0.0;
    for (int c = 0; c < x.cols; ++c) {
        reg += theta[static_cast<size_t>(c)] * theta[static_cast<size_t>(c)];
    }
    return loss + 0.5 * lambda * reg;
}

std::vector<double> logreg_gradient(const Matrix& x, const std::vector<int>& labels,
                                    std::span<const double> theta, double lambda) {
    if (theta.size() != static_cast<size_t>(x.cols) + 1) {
        raise(ErrorKind::DimensionMismatch, "theta must have feature_count + 1 entries");
    }
    double n = static_cast<double>(x.rows);
    std::vector<double> grad(theta.size(), 0.0);
    for (int r = 0; r < x.rows; ++r) {
        double resid = sigmoid(margin(x, r, theta)) - static_cast<double>(labels[static_cast<size_t>(r)]);
        auto xi = x.row(r);
        for (int c = 0; c < x.cols; ++c) {
            grad[static_cast<size_t>(c)] += resid * xi[static_cast<size_t>(c)];
        }
        grad[static_cast<size_t>(x.cols)] += resid;
    }
    for (double& g : grad) g /= n;
    for (int c = 0; c < x.cols; ++c) {
        grad[static_cast<size_t>(c)] += lambda * theta[static_cast<size_t>(c)];
    }
    return grad;
}

std::unique_ptr<LogregModel> LogregModel::train(const ModelSpec& spec, const Matrix& x,
                                                const std::vector<int>& labels) {
    const auto& hp = spec.logreg;
    std::vector<double> theta(static_cast<size_t>(x.cols) + 1, 0.0);
    double loss = logreg_loss(x, labels, theta, hp.lambda);
    double step = 1.0;

    for (int iter = 0; iter < hp.max_iters; ++iter) {
        auto grad = logreg_gradient(x, labels, theta, hp.lambda);
        double grad_inf = 0.0;
        double grad_sq = 0.0;
        for (double g : grad) {
            grad_inf = std::max(grad_inf, std::abs(g));
            grad_sq += g * g;
        }
        if (grad_inf < hp.grad_tol) break;

        // Armijo backtracking along the steepest-descent direction; the last
        // accepted step seeds the next search so well-scaled problems stay
        // near full steps.
        step = std::min(step * 2.0, 1e6);
        std::vector<double> candidate(theta.size());
        bool accepted = false;
        while (step > 1e-18) {
            for (size_t i = 0; i < theta.size(); ++i) {
                candidate[i] = theta[i] - step * grad[i];
            }
            double cand_loss = logreg_loss(x, labels, candidate, hp.lambda);
            if (!std::isfinite(cand_loss)) {
                raise(ErrorKind::NonFiniteLoss, "logistic loss became non-finite");
            }
            if (cand_loss <= loss - 1e-4 * step * grad_sq) {
                theta.swap(candidate);
                loss = cand_loss;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break; // no representable step improves the loss
    }
    return std::unique_ptr<LogregModel>(new LogregModel(spec, x.cols, std::move(theta)));
}

std::unique_ptr<LogregModel> LogregModel::from_params(const ModelSpec& spec, int feature_count,
                                                      const nlohmann::json& params) {
    auto theta = params.at("theta").get<std::vector<double>>();
    if (theta.size() != static_cast<size_t>(feature_count) + 1) {
        raise(ErrorKind::SchemaMismatch, "theta length does not match feature count");
    }
    return std::unique_ptr<LogregModel>(new LogregModel(spec, feature_count, std::move(theta)));
}

double LogregModel::predict_proba_checked(std::span<const double> x) const {
    double z = theta_[static_cast<size_t>(feature_count_)];
    for (int c = 0; c < feature_count_; ++c) {
        z += theta_[static_cast<size_t>(c)] * x[static_cast<size_t>(c)];
    }
    return sigmoid(z);
}

std::vector<double> LogregModel::feature_importance() const {
    std::vector<double> raw(static_cast<size_t>(feature_count_));
    for (int c = 0; c < feature_count_; ++c) {
        raw[static_cast<size_t>(c)] = std::abs(theta_[static_cast<size_t>(c)]);
    }
    return normalize_importance(std::move(raw));
}

nlohmann::json LogregModel::params_json() const {
    return nlohmann::json{{"theta", theta_}};
}

} // namespace sift
