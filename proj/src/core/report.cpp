#include "report.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>

#include "errors.hpp"
#include "metrics.hpp"

namespace sift {

namespace {

nlohmann::json metrics_to_json(const Metrics& m) {
    return {{"precision", m.precision},
            {"recall", m.recall},
            {"accuracy", m.accuracy},
            {"f1", m.f1},
            {"f2", m.f2}};
}

nlohmann::json confusion_to_json(const Confusion& c) {
    return {{"tp", c.tp}, {"tn", c.tn}, {"fp", c.fp}, {"fn", c.fn}};
}

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        raise(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
    }
    return out;
}

} // namespace

nlohmann::json report_to_json(const CVReport& report) {
    nlohmann::json folds = nlohmann::json::array();
    for (const auto& fr : report.fold_results) {
        folds.push_back({{"confusion_good", confusion_to_json(swap_classes(fr.confusion))},
                         {"confusion_malicious", confusion_to_json(fr.confusion)},
                         {"metrics_good", metrics_to_json(fr.metrics_good)},
                         {"metrics_malicious", metrics_to_json(fr.metrics_malicious)}});
    }

    // descending by weight, ties by schema position
    nlohmann::json importance = nlohmann::json::array();
    if (!report.importance.empty()) {
        std::vector<size_t> order(report.importance.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
            return report.importance[a] > report.importance[b];
        });
        for (size_t i : order) {
            importance.push_back(
                {{"feature", report.feature_names[i]}, {"value", report.importance[i]}});
        }
    }

    nlohmann::json prov_folds = nlohmann::json::array();
    for (const auto& fp : report.provenance) {
        nlohmann::json jf = {{"train_indices", fp.train_indices},
                             {"test_indices", fp.test_indices},
                             {"medians", fp.medians},
                             {"kept_columns", fp.kept_columns},
                             {"normalized", fp.normalized},
                             {"smote_seed", fp.smote_seed},
                             {"smote_synthetic", fp.smote_synthetic},
                             {"smote_minority_label", fp.smote_minority_label},
                             {"model_seed", fp.model_seed}};
        if (fp.normalized) {
            jf["zscore_mean"] = fp.zscore_mean;
            jf["zscore_std"] = fp.zscore_std;
        }
        prov_folds.push_back(std::move(jf));
    }

    return nlohmann::json{
        {"format_version", kReportFormatVersion},
        {"spec", spec_to_json(report.spec)},
        {"seed", report.seed},
        {"folds", folds},
        {"averages",
         {{"metrics_good", metrics_to_json(report.avg_good)},
          {"metrics_malicious", metrics_to_json(report.avg_malicious)}}},
        {"importance", importance},
        {"provenance",
         {{"dataset",
           {{"rows", report.dataset_rows},
            {"good", report.dataset_good},
            {"malicious", report.dataset_malicious},
            {"schema_version", report.schema_version}}},
          {"smote", {{"k_neighbors", report.smote_base.k_neighbors},
                     {"target_ratio", report.smote_base.target_ratio}}},
          {"fold_count", report.folds},
          {"feature_names", report.feature_names},
          {"folds", prov_folds}}},
        {"runtime_seconds", report.runtime_seconds}};
}

void save_report(const CVReport& report, const std::string& path) {
    auto out = open_out(path);
    out << report_to_json(report).dump(2) << '\n';
    if (!out) {
        raise(ErrorKind::Io, "failed writing '" + path + "'");
    }
}

nlohmann::json load_report_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        raise(ErrorKind::Io, "cannot open report '" + path + "'");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorKind::MalformedRecord, path + ": " + e.what());
    }
    if (!j.is_object() || j.value("format_version", "") != kReportFormatVersion) {
        raise(ErrorKind::SchemaMismatch, path + ": unsupported report format");
    }
    return j;
}

void write_plot_csvs(const nlohmann::json& report, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        raise(ErrorKind::Io, "cannot create directory '" + dir + "'");
    }
    std::string model = report.at("spec").at("family").get<std::string>();
    static constexpr const char* kMetricNames[] = {"precision", "recall", "accuracy", "f1", "f2"};
    static constexpr const char* kClasses[] = {"good", "malicious"};

    {
        auto out = open_out(fs::path(dir) / "metrics.csv");
        out << "metric,class,model,fold,value\n";
        const auto& folds = report.at("folds");
        for (size_t f = 0; f < folds.size(); ++f) {
            for (const char* cls : kClasses) {
                const auto& m = folds[f].at(std::string("metrics_") + cls);
                for (const char* name : kMetricNames) {
                    out << name << ',' << cls << ',' << model << ',' << f << ','
                        << format_double(m.at(name).get<double>()) << '\n';
                }
            }
        }
        for (const char* cls : kClasses) {
            const auto& m = report.at("averages").at(std::string("metrics_") + cls);
            for (const char* name : kMetricNames) {
                out << name << ',' << cls << ',' << model << ",avg,"
                    << format_double(m.at(name).get<double>()) << '\n';
            }
        }
    }
    {
        auto out = open_out(fs::path(dir) / "confusion.csv");
        out << "fold,class,tp,fp,fn,tn\n";
        const auto& folds = report.at("folds");
        for (size_t f = 0; f < folds.size(); ++f) {
            for (const char* cls : kClasses) {
                const auto& c = folds[f].at(std::string("confusion_") + cls);
                out << f << ',' << cls << ',' << c.at("tp").get<uint64_t>() << ','
                    << c.at("fp").get<uint64_t>() << ',' << c.at("fn").get<uint64_t>() << ','
                    << c.at("tn").get<uint64_t>() << '\n';
            }
        }
    }
    {
        auto out = open_out(fs::path(dir) / "importance.csv");
        out << "feature,model,value\n";
        for (const auto& entry : report.at("importance")) {
            out << entry.at("feature").get<std::string>() << ',' << model << ','
                << format_double(entry.at("value").get<double>()) << '\n';
        }
    }
}

} // namespace sift
