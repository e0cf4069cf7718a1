#pragma once

#include <string>
#include <vector>

#include "features.hpp"
#include "labels.hpp"
#include "matrix.hpp"

namespace sift {

struct Dataset {
    Matrix x;
    std::vector<int> labels; // 0 = good, 1 = malicious
    std::vector<std::string> addresses;
    std::vector<std::string> column_names;
    std::string schema_version;
};

// Joins feature rows with the label registry. All malicious rows are kept;
// good rows are sampled uniformly without replacement down to n_good_sample
// (seeded, stream kGoodSampleStream). Rows come out sorted by address.
// Registry addresses missing from the table are dropped with a warning.
constexpr uint64_t kGoodSampleStream = 50;
Dataset assemble(const FeatureTable& table, const LabelRegistry& registry,
                 uint64_t n_good_sample, uint64_t seed,
                 std::vector<std::string>* warnings = nullptr);

struct ImputeStats {
    std::vector<double> medians; // per column; all-NaN column -> 0
};

ImputeStats fit_impute(const Matrix& x);
void apply_impute(Matrix& x, const ImputeStats& stats);

// Indices (old positions) of columns whose population variance is nonzero.
std::vector<int> fit_nonzero_variance_columns(const Matrix& x);
Matrix select_columns(const Matrix& x, const std::vector<int>& kept);

struct ZscoreStats {
    std::vector<double> mean;
    std::vector<double> std; // population convention
};

ZscoreStats fit_zscore(const Matrix& x);
void apply_zscore(Matrix& x, const ZscoreStats& stats); // std=0 column -> all zeros

// Pearson correlations; diagonal 1, pairs involving a zero-variance column are 0.
Matrix correlation_matrix(const Matrix& x);
void save_correlation_csv(const Matrix& corr, const std::vector<std::string>& names,
                          const std::string& path);

} // namespace sift
