#include "chainsift.h"

#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/artifact.hpp"
#include "core/cv.hpp"
#include "core/dataset.hpp"
#include "core/errors.hpp"
#include "core/features.hpp"
#include "core/labels.hpp"
#include "core/ndjson.hpp"
#include "core/report.hpp"
#include "core/rng.hpp"
#include "core/schema.hpp"
#include "core/synth.hpp"

struct sift_corpus {
    std::vector<sift::DecodedEvent> events;
    sift::LabelRegistry registry;
    bool has_labels = false;
    uint64_t skipped = 0;
};

struct sift_schema {
    sift::FeatureSchema schema;
};

struct sift_features {
    sift::FeatureTable table;
};

struct sift_report {
    nlohmann::json json;
};

namespace {

thread_local std::string t_last_error;

sift_status status_of(const sift::Error& e) {
    return e.category() == sift::ErrorCategory::Input ? SIFT_ERROR_INPUT
                                                      : SIFT_ERROR_VALIDATION;
}

template <typename Fn>
sift_status guarded(Fn&& fn) {
    try {
        fn();
        return SIFT_OK;
    } catch (const sift::Error& e) {
        t_last_error = e.what();
        return status_of(e);
    } catch (const std::exception& e) {
        t_last_error = e.what();
        return SIFT_ERROR_VALIDATION;
    }
}

sift_status null_arg(const char* what) {
    t_last_error = std::string("null argument: ") + what;
    return SIFT_ERROR_INPUT;
}

bool resolve_normalize(const char* mode, sift::ModelFamily family) {
    std::string m = mode == nullptr ? "auto" : mode;
    if (m == "auto") return sift::normalize_default(family);
    if (m == "on") return true;
    if (m == "off") return false;
    sift::raise(sift::ErrorKind::InvalidConfig, "normalize must be auto, on, or off: '" + m + "'");
}

// Keeps only the transactional block so the ablation run sees nothing else.
sift::FeatureTable restrict_to_transactional(const sift::FeatureTable& table) {
    std::vector<int> keep;
    for (size_t j = 0; j < table.column_names.size(); ++j) {
        if (table.column_names[j].rfind("txn_", 0) == 0) keep.push_back(static_cast<int>(j));
    }
    if (keep.empty()) {
        sift::raise(sift::ErrorKind::SchemaMismatch, "no transactional columns in feature table");
    }
    sift::FeatureTable out;
    out.addresses = table.addresses;
    for (int j : keep) out.column_names.push_back(table.column_names[static_cast<size_t>(j)]);
    out.x = sift::select_columns(table.x, keep);
    return out;
}

} // namespace

extern "C" {

const char* sift_version(void) { return "0.1.0"; }

const char* sift_last_error(void) { return t_last_error.c_str(); }

/* ---- corpus ---- */

sift_status sift_synth_corpus(uint64_t seed, int64_t n_good, int64_t n_malicious,
                              int fraud_profile_on, sift_corpus** out) {
    if (out == nullptr) return null_arg("out");
    return guarded([&] {
        sift::SynthConfig config;
        config.seed = seed;
        config.n_good = n_good;
        config.n_malicious = n_malicious;
        config.fraud_profile_on = fraud_profile_on != 0;
        sift::SynthCorpus corpus = sift::generate_corpus(config);
        auto handle = std::make_unique<sift_corpus>();
        handle->events = std::move(corpus.events);
        handle->registry = std::move(corpus.registry);
        handle->has_labels = true;
        *out = handle.release();
    });
}

sift_status sift_corpus_load(const char* events_path, int skip_unknown, sift_corpus** out) {
    if (events_path == nullptr) return null_arg("events_path");
    if (out == nullptr) return null_arg("out");
    return guarded([&] {
        sift::ReadResult result = sift::read_events(events_path, skip_unknown != 0);
        auto handle = std::make_unique<sift_corpus>();
        handle->events = std::move(result.events);
        handle->skipped = result.skipped_unknown;
        *out = handle.release();
    });
}

sift_status sift_corpus_save_events(const sift_corpus* corpus, const char* path) {
    if (corpus == nullptr) return null_arg("corpus");
    if (path == nullptr) return null_arg("path");
    return guarded([&] { sift::write_events(corpus->events, path); });
}

sift_status sift_corpus_save_labels(const sift_corpus* corpus, const char* path) {
    if (corpus == nullptr) return null_arg("corpus");
    if (path == nullptr) return null_arg("path");
    return guarded([&] {
        if (!corpus->has_labels) {
            sift::raise(sift::ErrorKind::InvalidConfig,
                        "corpus carries no labels; load them separately");
        }
        sift::save_label_registry(corpus->registry, path);
    });
}

int64_t sift_corpus_event_count(const sift_corpus* corpus) {
    return corpus == nullptr ? -1 : static_cast<int64_t>(corpus->events.size());
}

int64_t sift_corpus_skipped_count(const sift_corpus* corpus) {
    return corpus == nullptr ? -1 : static_cast<int64_t>(corpus->skipped);
}

void sift_corpus_free(sift_corpus* corpus) { delete corpus; }

/* ---- schema ---- */

sift_status sift_schema_derive(const sift_corpus* corpus, sift_schema** out) {
    if (corpus == nullptr) return null_arg("corpus");
    if (out == nullptr) return null_arg("out");
    return guarded([&] {
        auto handle = std::make_unique<sift_schema>();
        handle->schema = sift::derive_token_schema(corpus->events);
        *out = handle.release();
    });
}

sift_status sift_schema_save(const sift_schema* schema, const char* path) {
    if (schema == nullptr) return null_arg("schema");
    if (path == nullptr) return null_arg("path");
    return guarded([&] { sift::save_schema(schema->schema, path); });
}

sift_status sift_schema_load(const char* path, sift_schema** out) {
    if (path == nullptr) return null_arg("path");
    if (out == nullptr) return null_arg("out");
    return guarded([&] {
        auto handle = std::make_unique<sift_schema>();
        handle->schema = sift::load_schema(path);
        *out = handle.release();
    });
}

int sift_schema_feature_count(const sift_schema* schema) {
    return schema == nullptr ? -1 : static_cast<int>(schema->schema.names.size());
}

void sift_schema_free(sift_schema* schema) { delete schema; }

/* ---- features ---- */

sift_status sift_features_extract(const sift_corpus* corpus, const sift_schema* schema,
                                  sift_features** out) {
    if (corpus == nullptr) return null_arg("corpus");
    if (schema == nullptr) return null_arg("schema");
    if (out == nullptr) return null_arg("out");
    return guarded([&] {
        std::vector<sift::AddressHistory> histories = sift::build_histories(corpus->events);
        std::vector<sift::FeatureVector> vectors =
            sift::extract_features(histories, schema->schema);
        auto handle = std::make_unique<sift_features>();
        handle->table = sift::to_feature_table(vectors, schema->schema);
        *out = handle.release();
    });
}

sift_status sift_features_save(const sift_features* features, const char* path) {
    if (features == nullptr) return null_arg("features");
    if (path == nullptr) return null_arg("path");
    return guarded([&] { sift::save_feature_table(features->table, path); });
}

sift_status sift_features_load(const char* path, sift_features** out) {
    if (path == nullptr) return null_arg("path");
    if (out == nullptr) return null_arg("out");
    return guarded([&] {
        auto handle = std::make_unique<sift_features>();
        handle->table = sift::load_feature_matrix(path);
        *out = handle.release();
    });
}

sift_status sift_features_save_correlation(const sift_features* features, const char* path) {
    if (features == nullptr) return null_arg("features");
    if (path == nullptr) return null_arg("path");
    return guarded([&] {
        sift::Matrix corr = sift::correlation_matrix(features->table.x);
        sift::save_correlation_csv(corr, features->table.column_names, path);
    });
}

sift_status sift_features_save_distribution(const sift_features* features, const char* path) {
    if (features == nullptr) return null_arg("features");
    if (path == nullptr) return null_arg("path");
    return guarded([&] { sift::save_distribution_summary(features->table, path); });
}

int64_t sift_features_row_count(const sift_features* features) {
    return features == nullptr ? -1 : static_cast<int64_t>(features->table.addresses.size());
}

void sift_features_free(sift_features* features) { delete features; }

/* ---- evaluation ---- */

void sift_eval_options_init(sift_eval_options* options) {
    if (options == nullptr) return;
    options->model = "gbt";
    options->folds = 5;
    options->seed = 42;
    options->smote_k = 5;
    options->smote_ratio = 1.0;
    options->normalize = "auto";
    options->good_sample = 10000;
    options->transactional_only = 0;
    options->record_runtime = 0;
    options->model_out = nullptr;
}

sift_status sift_eval(const char* features_csv, const char* labels_csv,
                      const sift_eval_options* options, sift_report** out) {
    if (features_csv == nullptr) return null_arg("features_csv");
    if (labels_csv == nullptr) return null_arg("labels_csv");
    if (options == nullptr) return null_arg("options");
    if (out == nullptr) return null_arg("out");
    return guarded([&] {
        auto started = std::chrono::steady_clock::now();

        sift::FeatureTable table = sift::load_feature_matrix(features_csv);
        if (options->transactional_only != 0) {
            table = restrict_to_transactional(table);
        }
        sift::LabelRegistry registry = sift::load_label_registry(labels_csv);
        sift::Dataset dataset =
            sift::assemble(table, registry, options->good_sample, options->seed);

        sift::ModelSpec spec;
        spec.family = sift::parse_model_family(options->model == nullptr ? "" : options->model);
        spec.seed = options->seed;
        spec.normalize = resolve_normalize(options->normalize, spec.family);
        spec.validate();

        sift::SmoteConfig smote_base;
        smote_base.k_neighbors = options->smote_k;
        smote_base.target_ratio = options->smote_ratio;

        sift::CVReport report =
            sift::run_cv(dataset, spec, options->folds, options->seed, smote_base);

        if (options->model_out != nullptr && options->model_out[0] != '\0') {
            std::vector<int> all(dataset.labels.size());
            std::iota(all.begin(), all.end(), 0);
            uint64_t fold = static_cast<uint64_t>(options->folds);
            sift::FittedFold fitted = sift::fit_fold(
                dataset, all, spec,
                sift::derive_seed(options->seed, sift::kSmoteStreamBase + fold),
                sift::derive_seed(options->seed, sift::kModelStreamBase + fold), smote_base);
            sift::ModelArtifact artifact;
            artifact.spec = fitted.model->spec();
            artifact.schema_version = dataset.schema_version;
            artifact.feature_names = dataset.column_names;
            artifact.medians = fitted.provenance.medians;
            artifact.kept_columns = fitted.provenance.kept_columns;
            artifact.normalized = fitted.provenance.normalized;
            artifact.zscore_mean = fitted.provenance.zscore_mean;
            artifact.zscore_std = fitted.provenance.zscore_std;
            artifact.model = std::move(fitted.model);
            sift::save_model_artifact(artifact, options->model_out);
        }

        if (options->record_runtime != 0) {
            report.runtime_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
                    .count();
        }

        auto handle = std::make_unique<sift_report>();
        handle->json = sift::report_to_json(report);
        *out = handle.release();
    });
}

/* ---- reports ---- */

sift_status sift_report_save(const sift_report* report, const char* path) {
    if (report == nullptr) return null_arg("report");
    if (path == nullptr) return null_arg("path");
    return guarded([&] {
        std::ofstream outfile(path, std::ios::binary);
        if (!outfile) {
            sift::raise(sift::ErrorKind::Io, std::string("cannot open '") + path + "'");
        }
        outfile << report->json.dump(2) << '\n';
        if (!outfile) {
            sift::raise(sift::ErrorKind::Io, std::string("failed writing '") + path + "'");
        }
    });
}

sift_status sift_report_load(const char* path, sift_report** out) {
    if (path == nullptr) return null_arg("path");
    if (out == nullptr) return null_arg("out");
    return guarded([&] {
        auto handle = std::make_unique<sift_report>();
        handle->json = sift::load_report_json(path);
        *out = handle.release();
    });
}

sift_status sift_report_write_plots(const sift_report* report, const char* dir) {
    if (report == nullptr) return null_arg("report");
    if (dir == nullptr) return null_arg("dir");
    return guarded([&] {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) {
            sift::raise(sift::ErrorKind::Io,
                        std::string("cannot create '") + dir + "': " + ec.message());
        }
        sift::write_plot_csvs(report->json, dir);
    });
}

sift_status sift_report_average(const sift_report* report, const char* cls, const char* metric,
                                double* out) {
    if (report == nullptr) return null_arg("report");
    if (cls == nullptr) return null_arg("cls");
    if (metric == nullptr) return null_arg("metric");
    if (out == nullptr) return null_arg("out");
    return guarded([&] {
        std::string c = cls;
        std::string m = metric;
        if (c != "good" && c != "malicious") {
            sift::raise(sift::ErrorKind::InvalidConfig, "class must be good or malicious: '" + c + "'");
        }
        if (m != "precision" && m != "recall" && m != "accuracy" && m != "f1" && m != "f2") {
            sift::raise(sift::ErrorKind::InvalidConfig, "unknown metric: '" + m + "'");
        }
        const nlohmann::json& averages = report->json.at("averages");
        *out = averages.at("metrics_" + c).at(m).get<double>();
    });
}

void sift_report_free(sift_report* report) { delete report; }

/* ---- importance ---- */

sift_status sift_importance_export(const char* artifact_path, const char* csv_path) {
    if (artifact_path == nullptr) return null_arg("artifact_path");
    if (csv_path == nullptr) return null_arg("csv_path");
    return guarded([&] {
        sift::ModelArtifact artifact = sift::load_model_artifact(artifact_path);
        std::vector<double> importance = sift::artifact_importance(artifact);
        sift::save_importance_csv(artifact.feature_names, importance, csv_path);
    });
}

} // extern "C"
