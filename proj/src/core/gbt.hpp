#pragma once

#include "model.hpp"
#include "tree.hpp"

namespace sift {

class GbtModel : public Model {
public:
    static std::unique_ptr<GbtModel> train(const ModelSpec& spec, const Matrix& x,
                                           const std::vector<int>& labels);
    static std::unique_ptr<GbtModel> from_params(const ModelSpec& spec, int feature_count,
                                                 const nlohmann::json& params);

    std::vector<double> feature_importance() const override;
    nlohmann::json params_json() const override;
    const std::vector<Tree>& trees() const { return trees_; }
    double base_score() const { return base_score_; }

    // Pre-sigmoid margin: base score plus the leaf value along each tree's
    // root-to-leaf path. Exposed for the path-sum re-evaluation oracle.
    double decision_value(std::span<const double> x) const;

protected:
    double predict_proba_checked(std::span<const double> x) const override;

private:
    GbtModel(const ModelSpec& spec, int feature_count, double base_score,
             std::vector<Tree> trees, std::vector<double> importance_raw)
        : Model(spec, feature_count),
          base_score_(base_score),
          trees_(std::move(trees)),
          importance_raw_(std::move(importance_raw)) {}

    double base_score_ = 0.0;
    std::vector<Tree> trees_;
    std::vector<double> importance_raw_; // total split gain, unnormalized
};

} // namespace sift
