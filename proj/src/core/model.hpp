#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "matrix.hpp"

namespace sift {

enum class ModelFamily { Logreg, RandomForest, Gbt, SvmRbf, Mlp };

const char* to_string(ModelFamily family);
ModelFamily parse_model_family(const std::string& name); // logreg|rf|gbt|svm|mlp

// Normalization default per family ("auto" mode): on for margin/gradient
// models, off for the tree ensembles.
bool normalize_default(ModelFamily family);

struct LogregParams {
    double lambda = 1e-4; // L2 on weights, bias excluded
    int max_iters = 1000;
    double grad_tol = 1e-6; // infinity norm
};

struct RandomForestParams {
    int n_trees = 100;
    int max_depth = 16;
    int min_leaf = 1;
};

struct GbtParams {
    int rounds = 200;
    int max_depth = 6;
    double eta = 0.1;
    double lambda = 1.0;
    double gamma = 0.0;
};

struct SvmParams {
    double c = 1.0;
    double gamma = 0.0; // 0 -> 1/feature_count
    double tol = 1e-3;  // KKT tolerance
    int max_epochs = 1000;
};

struct MlpParams {
    double dropout = 0.3;
    double alpha = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    int epochs = 30;
    int batch_size = 128;
};

struct ModelSpec {
    ModelFamily family = ModelFamily::Gbt;
    uint64_t seed = 0;
    bool normalize = false; // resolved before training; recorded for provenance
    LogregParams logreg;
    RandomForestParams rf;
    GbtParams gbt;
    SvmParams svm;
    MlpParams mlp;

    void validate() const; // InvalidConfig on out-of-range hyperparameters
};

nlohmann::json spec_to_json(const ModelSpec& spec);
ModelSpec spec_from_json(const nlohmann::json& j);

class Model {
public:
    virtual ~Model() = default;

    // Probability of the malicious class; label 1 iff value >= 0.5.
    double predict_proba(std::span<const double> x) const;

    // Normalized to sum 1 (all-zero -> uniform); Unsupported for svm/mlp.
    virtual std::vector<double> feature_importance() const = 0;

    virtual nlohmann::json params_json() const = 0;

    const ModelSpec& spec() const { return spec_; }
    int feature_count() const { return feature_count_; }

protected:
    Model(const ModelSpec& spec, int feature_count)
        : spec_(spec), feature_count_(feature_count) {}

    virtual double predict_proba_checked(std::span<const double> x) const = 0;

    ModelSpec spec_;
    int feature_count_ = 0;
};

std::unique_ptr<Model> train_model(const ModelSpec& spec, const Matrix& x,
                                   const std::vector<int>& labels);

// Rebuilds a trained model from its serialized parameters.
std::unique_ptr<Model> model_from_params(const ModelSpec& spec, int feature_count,
                                         const nlohmann::json& params);

// Shared helper: normalizes a non-negative score vector to sum 1,
// mapping an all-zero vector to the uniform distribution.
std::vector<double> normalize_importance(std::vector<double> raw);

void require_both_classes(const std::vector<int>& labels);

} // namespace sift
