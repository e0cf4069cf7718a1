#include "artifact.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

#include "errors.hpp"
#include "schema.hpp"

namespace sift {

void save_model_artifact(const ModelArtifact& artifact, const std::string& path) {
    nlohmann::json j{{"container_version", kArtifactVersion},
                     {"spec", spec_to_json(artifact.spec)},
                     {"schema_version", artifact.schema_version},
                     {"feature_names", artifact.feature_names},
                     {"preprocess",
                      {{"medians", artifact.medians},
                       {"kept_columns", artifact.kept_columns},
                       {"normalized", artifact.normalized},
                       {"zscore_mean", artifact.zscore_mean},
                       {"zscore_std", artifact.zscore_std}}},
                     {"feature_count", artifact.model->feature_count()},
                     {"params", artifact.model->params_json()}};
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        raise(ErrorKind::Io, "cannot open '" + path + "' for writing");
    }
    out << j.dump(2) << '\n';
    if (!out) {
        raise(ErrorKind::Io, "failed writing '" + path + "'");
    }
}

ModelArtifact load_model_artifact(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        raise(ErrorKind::Io, "cannot open model artifact '" + path + "'");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorKind::MalformedRecord, path + ": " + e.what());
    }
    try {
        if (j.value("container_version", "") != kArtifactVersion) {
            raise(ErrorKind::SchemaMismatch, path + ": unsupported artifact container version");
        }
        if (j.at("schema_version").get<std::string>() != kSchemaVersion) {
            raise(ErrorKind::SchemaMismatch, path + ": artifact built against another schema version");
        }
        ModelArtifact artifact;
        artifact.spec = spec_from_json(j.at("spec"));
        artifact.schema_version = j.at("schema_version").get<std::string>();
        artifact.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        const auto& pp = j.at("preprocess");
        artifact.medians = pp.at("medians").get<std::vector<double>>();
        artifact.kept_columns = pp.at("kept_columns").get<std::vector<int>>();
        artifact.normalized = pp.at("normalized").get<bool>();
        artifact.zscore_mean = pp.at("zscore_mean").get<std::vector<double>>();
        artifact.zscore_std = pp.at("zscore_std").get<std::vector<double>>();
        int feature_count = j.at("feature_count").get<int>();
        if (artifact.kept_columns.size() != static_cast<size_t>(feature_count)) {
            raise(ErrorKind::SchemaMismatch, path + ": kept column count does not match model");
        }
        for (int c : artifact.kept_columns) {
            if (c < 0 || static_cast<size_t>(c) >= artifact.feature_names.size()) {
                raise(ErrorKind::SchemaMismatch, path + ": kept column out of range");
            }
        }
        artifact.model = model_from_params(artifact.spec, feature_count, j.at("params"));
        return artifact;
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorKind::MalformedRecord, path + ": " + e.what());
    }
}

std::vector<double> artifact_importance(const ModelArtifact& artifact) {
    auto kept_importance = artifact.model->feature_importance();
    std::vector<double> full(artifact.feature_names.size(), 0.0);
    for (size_t i = 0; i < artifact.kept_columns.size(); ++i) {
        full[static_cast<size_t>(artifact.kept_columns[i])] = kept_importance[i];
    }
    return normalize_importance(std::move(full));
}

void save_importance_csv(const std::vector<std::string>& names,
                         const std::vector<double>& values, const std::string& path) {
    if (names.size() != values.size()) {
        raise(ErrorKind::DimensionMismatch, "importance names and values disagree");
    }
    std::vector<size_t> order(names.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return values[a] > values[b]; });
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        raise(ErrorKind::Io, "cannot open '" + path + "' for writing");
    }
    out << "feature,value\n";
    char buf[32];
    for (size_t i : order) {
        auto res = std::to_chars(buf, buf + sizeof(buf), values[i]);
        out << names[i] << ',' << std::string_view(buf, static_cast<size_t>(res.ptr - buf))
            << '\n';
    }
    if (!out) {
        raise(ErrorKind::Io, "failed writing '" + path + "'");
    }
}

} // namespace sift
