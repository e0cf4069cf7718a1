#pragma once

#include "model.hpp"
#include "tree.hpp"

namespace sift {

class RandomForestModel : public Model {
public:
    static std::unique_ptr<RandomForestModel> train(const ModelSpec& spec, const Matrix& x,
                                                    const std::vector<int>& labels);
    static std::unique_ptr<RandomForestModel> from_params(const ModelSpec& spec, int feature_count,
                                                          const nlohmann::json& params);

    std::vector<double> feature_importance() const override;
    nlohmann::json params_json() const override;
    const std::vector<Tree>& trees() const { return trees_; }

protected:
    double predict_proba_checked(std::span<const double> x) const override;

private:
    RandomForestModel(const ModelSpec& spec, int feature_count, std::vector<Tree> trees,
                      std::vector<double> importance_raw)
        : Model(spec, feature_count),
          trees_(std::move(trees)),
          importance_raw_(std::move(importance_raw)) {}

    std::vector<Tree> trees_;
    std::vector<double> importance_raw_; // mean impurity decrease, unnormalized
};

} // namespace sift
