#pragma once

#include <cstdint>
#include <vector>

#include "dataset.hpp"
#include "metrics.hpp"
#include "model.hpp"
#include "smote.hpp"

namespace sift {

// Seed streams: good-row sampling uses kGoodSampleStream (dataset.hpp); fold
// f's SMOTE uses 100+f and its model 200+f; the optional final full-data fit
// uses f = fold count.
constexpr uint64_t kSmoteStreamBase = 100;
constexpr uint64_t kModelStreamBase = 200;
constexpr uint64_t kFoldShuffleStreamBase = 10; // +class label

struct FoldProvenance {
    std::vector<int> train_indices; // ascending row ids into the dataset
    std::vector<int> test_indices;
    std::vector<double> medians;    // fitted on training rows only
    std::vector<int> kept_columns;
    bool normalized = false;
    std::vector<double> zscore_mean; // per kept column; empty when not normalized
    std::vector<double> zscore_std;
    uint64_t smote_seed = 0;
    int smote_synthetic = 0;
    int smote_minority_label = 0;
    uint64_t model_seed = 0;
};

struct FoldResult {
    Confusion confusion; // malicious is the positive class
    Metrics metrics_malicious;
    Metrics metrics_good;
};

struct CVReport {
    ModelSpec spec; // seed field holds the run seed; per-fold seeds in provenance
    uint64_t seed = 0;
    int folds = 0;
    SmoteConfig smote_base; // k and ratio; per-fold seeds derived
    int dataset_rows = 0;
    int dataset_good = 0;
    int dataset_malicious = 0;
    std::string schema_version;
    std::vector<std::string> feature_names;
    std::vector<FoldResult> fold_results;
    std::vector<FoldProvenance> provenance;
    Metrics avg_malicious;
    Metrics avg_good;
    std::vector<double> importance; // full feature space; empty for svm/mlp
    double runtime_seconds = 0.0;
};

// Disjoint index sets covering all rows; per-fold class counts are within 1
// of proportional. Fold indices come back sorted ascending.
std::vector<std::vector<int>> stratified_folds(const std::vector<int>& labels, int k,
                                               uint64_t seed);

CVReport run_cv(const Dataset& dataset, const ModelSpec& spec, int k, uint64_t seed,
                const SmoteConfig& smote_base);

// Per-fold preprocessing + training, shared by run_cv and the final full-data
// fit. Returns the trained model; fills provenance and the transformed
// training matrix dimensions.
struct FittedFold {
    std::unique_ptr<Model> model;
    FoldProvenance provenance;
};
FittedFold fit_fold(const Dataset& dataset, const std::vector<int>& train_indices,
                    const ModelSpec& spec, uint64_t smote_seed, uint64_t model_seed,
                    const SmoteConfig& smote_base);

// Applies a fold's fitted transforms (never SMOTE) to arbitrary dataset rows.
Matrix transform_rows(const Dataset& dataset, const std::vector<int>& row_indices,
                      const FoldProvenance& prov);

} // namespace sift
