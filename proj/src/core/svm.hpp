#pragma once

#include "model.hpp"

namespace sift {

// Final optimizer state over the full training set, for KKT inspection.
struct SmoTrace {
    std::vector<double> alpha;
    double b = 0.0;
    double gamma = 0.0;
};

class SvmModel : public Model {
public:
    static std::unique_ptr<SvmModel> train(const ModelSpec& spec, const Matrix& x,
                                           const std::vector<int>& labels,
                                           SmoTrace* trace = nullptr);
    static std::unique_ptr<SvmModel> from_params(const ModelSpec& spec, int feature_count,
                                                 const nlohmann::json& params);

    std::vector<double> feature_importance() const override; // Unsupported
    nlohmann::json params_json() const override;

    // u(x) = sum_i coeff_i K(sv_i, x) - b
    double decision_value(std::span<const double> x) const;
    double platt_a() const { return platt_a_; }
    double platt_b() const { return platt_b_; }

protected:
    double predict_proba_checked(std::span<const double> x) const override;

private:
    SvmModel(const ModelSpec& spec, int feature_count, Matrix sv, std::vector<double> coeff,
             double b, double gamma, double platt_a, double platt_b)
        : Model(spec, feature_count),
          sv_(std::move(sv)),
          coeff_(std::move(coeff)),
          b_(b),
          gamma_(gamma),
          platt_a_(platt_a),
          platt_b_(platt_b) {}

    Matrix sv_;                 // support vectors, one per row
    std::vector<double> coeff_; // alpha_i * s_i
    double b_ = 0.0;
    double gamma_ = 0.0;
    double platt_a_ = 0.0; // P(malicious | u) = 1 / (1 + exp(a*u + b))
    double platt_b_ = 0.0;
};

// Logistic link fit on (decision value, label) pairs by Newton's method.
// Returns {a, b}. Exposed for direct testing.
std::pair<double, double> fit_platt_scaling(const std::vector<double>& decision,
                                            const std::vector<int>& labels);

} // namespace sift
