#pragma once

#include "model.hpp"

namespace sift {

// theta layout: [w_0 .. w_{p-1}, bias]. Exposed as free functions so the
// analytic gradient can be checked against finite differences.
double logreg_loss(const Matrix& x, const std::vector<int>& labels,
                   std::span<const double> theta, double lambda);
std::vector<double> logreg_gradient(const Matrix& x, const std::vector<int>& labels,
                                    std::span<const double> theta, double lambda);

class LogregModel : public Model {
public:
    static std::unique_ptr<LogregModel> train(const ModelSpec& spec, const Matrix& x,
                                              const std::vector<int>& labels);
    static std::unique_ptr<LogregModel> from_params(const ModelSpec& spec, int feature_count,
                                                    const nlohmann::json& params);

    std::vector<double> feature_importance() const override;
    nlohmann::json params_json() const override;
    const std::vector<double>& theta() const { return theta_; }

protected:
    double predict_proba_checked(std::span<const double> x) const override;

private:
    LogregModel(const ModelSpec& spec, int feature_count, std::vector<double> theta)
        : Model(spec, feature_count), theta_(std::move(theta)) {}

    std::vector<double> theta_;
};

} // namespace sift
