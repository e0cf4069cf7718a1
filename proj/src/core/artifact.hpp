#pragma once

#include <memory>
#include <string>
#include <vector>

#include "cv.hpp"
#include "model.hpp"

namespace sift {

inline constexpr const char* kArtifactVersion = "art1";

// Trained model plus the fitted preprocessing needed to score raw feature
// rows and to map importances back onto the full feature space.
struct ModelArtifact {
    ModelSpec spec;
    std::string schema_version;
    std::vector<std::string> feature_names; // full feature space
    std::vector<double> medians;
    std::vector<int> kept_columns;
    bool normalized = false;
    std::vector<double> zscore_mean;
    std::vector<double> zscore_std;
    std::unique_ptr<Model> model;
};

void save_model_artifact(const ModelArtifact& artifact, const std::string& path);
ModelArtifact load_model_artifact(const std::string& path);

// Importance on the full feature space (zeros for dropped columns),
// normalized to sum 1. Unsupported for svm/mlp.
std::vector<double> artifact_importance(const ModelArtifact& artifact);

void save_importance_csv(const std::vector<std::string>& names,
                         const std::vector<double>& values, const std::string& path);

} // namespace sift
