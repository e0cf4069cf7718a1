#include "cv.hpp"

#include <algorithm>

#include "errors.hpp"
#include "rng.hpp"

namespace sift {

std::vector<std::vector<int>> stratified_folds(const std::vector<int>& labels, int k,
                                               uint64_t seed) {
    if (k < 2) {
        raise(ErrorKind::InvalidConfig, "fold count must be at least 2");
    }
    std::vector<std::vector<int>> by_class(2);
    for (size_t i = 0; i < labels.size(); ++i) {
        int y = labels[i];
        if (y != 0 && y != 1) {
            raise(ErrorKind::InvalidConfig, "labels must be 0 or 1");
        }
        by_class[static_cast<size_t>(y)].push_back(static_cast<int>(i));
    }
    for (int cls = 0; cls < 2; ++cls) {
        if (by_class[static_cast<size_t>(cls)].size() < static_cast<size_t>(k)) {
            raise(ErrorKind::ClassTooSmall,
                  "class " + std::to_string(cls) + " has fewer members than folds");
        }
    }

    std::vector<std::vector<int>> folds(static_cast<size_t>(k));
    for (int cls = 0; cls < 2; ++cls) {
        auto& idx = by_class[static_cast<size_t>(cls)];
        SplitMix64 rng(derive_seed(seed, kFoldShuffleStreamBase + static_cast<uint64_t>(cls)));
        for (size_t i = idx.size() - 1; i > 0; --i) {
            size_t j = static_cast<size_t>(rng.next_below(static_cast<uint64_t>(i) + 1));
            std::swap(idx[i], idx[j]);
        }
        size_t base = idx.size() / static_cast<size_t>(k);
        size_t extra = idx.size() % static_cast<size_t>(k);
        size_t pos = 0;
        for (int f = 0; f < k; ++f) {
            size_t take = base + (static_cast<size_t>(f) < extra ? 1 : 0);
            for (size_t t = 0; t < take; ++t) {
                folds[static_cast<size_t>(f)].push_back(idx[pos++]);
            }
        }
    }
    for (auto& fold : folds) {
        std::sort(fold.begin(), fold.end());
    }
    return folds;
}

namespace {

Matrix gather_rows(const Matrix& x, const std::vector<int>& rows) {
    Matrix out;
    out.rows = static_cast<int>(rows.size());
    out.cols = x.cols;
    out.data.reserve(static_cast<size_t>(out.rows) * static_cast<size_t>(out.cols));
    for (int r : rows) {
        auto src = x.row(r);
        out.data.insert(out.data.end(), src.begin(), src.end());
    }
    return out;
}

Metrics mean_metrics(const std::vector<FoldResult>& results, bool malicious) {
    Metrics sum;
    for (const auto& fr : results) {
        const Metrics& m = malicious ? fr.metrics_malicious : fr.metrics_good;
        sum.precision += m.precision;
        sum.recall += m.recall;
        sum.accuracy += m.accuracy;
        sum.f1 += m.f1;
        sum.f2 += m.f2;
    }
    double n = static_cast<double>(results.size());
    sum.precision /= n;
    sum.recall /= n;
    sum.accuracy /= n;
    sum.f1 /= n;
    sum.f2 /= n;
    return sum;
}

} // namespace

FittedFold fit_fold(const Dataset& dataset, const std::vector<int>& train_indices,
                    const ModelSpec& spec, uint64_t smote_seed, uint64_t model_seed,
                    const SmoteConfig& smote_base) {
    FittedFold out;
    out.provenance.train_indices = train_indices;
    out.provenance.normalized = spec.normalize;
    out.provenance.smote_seed = smote_seed;
    out.provenance.model_seed = model_seed;

    Matrix train = gather_rows(dataset.x, train_indices);
    std::vector<int> train_labels;
    train_labels.reserve(train_indices.size());
    for (int r : train_indices) {
        train_labels.push_back(dataset.labels[static_cast<size_t>(r)]);
    }

    ImputeStats medians = fit_impute(train);
    apply_impute(train, medians);
    out.provenance.medians = medians.medians;

    out.provenance.kept_columns = fit_nonzero_variance_columns(train);
    train = select_columns(train, out.provenance.kept_columns);

    if (spec.normalize) {
        ZscoreStats stats = fit_zscore(train);
        apply_zscore(train, stats);
        out.provenance.zscore_mean = stats.mean;
        out.provenance.zscore_std = stats.std;
    }

    SmoteConfig smote_cfg = smote_base;
    smote_cfg.seed = smote_seed;
    SmoteResult oversampled = smote(train, train_labels, smote_cfg);
    out.provenance.smote_synthetic = oversampled.synthetic_count;
    out.provenance.smote_minority_label = oversampled.minority_label;

    ModelSpec fold_spec = spec;
    fold_spec.seed = model_seed;
    out.model = train_model(fold_spec, oversampled.x, oversampled.labels);
    return out;
}

Matrix transform_rows(const Dataset& dataset, const std::vector<int>& row_indices,
                      const FoldProvenance& prov) {
    Matrix rows = gather_rows(dataset.x, row_indices);
    ImputeStats medians{prov.medians};
    apply_impute(rows, medians);
    rows = select_columns(rows, prov.kept_columns);
    if (prov.normalized) {
        apply_zscore(rows, ZscoreStats{prov.zscore_mean, prov.zscore_std});
    }
    return rows;
}

CVReport run_cv(const Dataset& dataset, const ModelSpec& spec, int k, uint64_t seed,
                const SmoteConfig& smote_base) {
    spec.validate();
    size_t n = dataset.labels.size();
    if (dataset.x.rows != static_cast<int>(n) || dataset.addresses.size() != n) {
        raise(ErrorKind::DimensionMismatch, "dataset row counts disagree");
    }

    CVReport report;
    report.spec = spec;
    report.spec.seed = seed;
    report.seed = seed;
    report.folds = k;
    report.smote_base = smote_base;
    report.dataset_rows = static_cast<int>(n);
    for (int y : dataset.labels) {
        if (y == 1) ++report.dataset_malicious;
        else ++report.dataset_good;
    }
    report.schema_version = dataset.schema_version;
    report.feature_names = dataset.column_names;

    auto folds = stratified_folds(dataset.labels, k, seed);

    int p = dataset.x.cols;
    std::vector<double> importance_sum(static_cast<size_t>(p), 0.0);
    bool has_importance = spec.family == ModelFamily::Logreg ||
                          spec.family == ModelFamily::RandomForest ||
                          spec.family == ModelFamily::Gbt;

    std::vector<char> in_test(n);
    for (int f = 0; f < k; ++f) {
        const auto& test_idx = folds[static_cast<size_t>(f)];
        std::fill(in_test.begin(), in_test.end(), 0);
        for (int r : test_idx) in_test[static_cast<size_t>(r)] = 1;
        std::vector<int> train_idx;
        train_idx.reserve(n - test_idx.size());
        for (size_t r = 0; r < n; ++r) {
            if (!in_test[r]) train_idx.push_back(static_cast<int>(r));
        }

        uint64_t smote_seed = derive_seed(seed, kSmoteStreamBase + static_cast<uint64_t>(f));
        uint64_t model_seed = derive_seed(seed, kModelStreamBase + static_cast<uint64_t>(f));
        FittedFold fitted = fit_fold(dataset, train_idx, spec, smote_seed, model_seed, smote_base);
        fitted.provenance.test_indices = test_idx;

        Matrix test = transform_rows(dataset, test_idx, fitted.provenance);
        FoldResult result;
        for (int r = 0; r < test.rows; ++r) {
            double proba = fitted.model->predict_proba(test.row(r));
            bool predicted = proba >= 0.5; // a tie counts as malicious
            bool actual = dataset.labels[static_cast<size_t>(test_idx[static_cast<size_t>(r)])] == 1;
            if (predicted && actual) ++result.confusion.tp;
            else if (predicted && !actual) ++result.confusion.fp;
            else if (!predicted && actual) ++result.confusion.fn;
            else ++result.confusion.tn;
        }
        result.metrics_malicious = compute_metrics(result.confusion);
        result.metrics_good = compute_metrics(swap_classes(result.confusion));

        if (has_importance) {
            auto fold_imp = fitted.model->feature_importance();
            const auto& kept = fitted.provenance.kept_columns;
            for (size_t i = 0; i < kept.size(); ++i) {
                importance_sum[static_cast<size_t>(kept[i])] += fold_imp[i];
            }
        }
        report.fold_results.push_back(result);
        report.provenance.push_back(std::move(fitted.provenance));
    }

    report.avg_malicious = mean_metrics(report.fold_results, true);
    report.avg_good = mean_metrics(report.fold_results, false);
    if (has_importance) {
        for (double& v : importance_sum) v /= static_cast<double>(k);
        report.importance = normalize_importance(std::move(importance_sum));
    }
    return report;
}

} // namespace sift
