#include "dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include "errors.hpp"
#include "rng.hpp"
#include "stats.hpp"

namespace sift {

namespace {

void append_double(std::string& out, double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

} // namespace

Dataset assemble(const FeatureTable& table, const LabelRegistry& registry,
                 uint64_t n_good_sample, uint64_t seed,
                 std::vector<std::string>* warnings) {
    std::unordered_map<std::string, int> row_of;
    row_of.reserve(table.addresses.size());
    for (size_t i = 0; i < table.addresses.size(); ++i) {
        row_of.emplace(table.addresses[i], static_cast<int>(i));
    }

    // registry entries are a sorted map, so these lists come out address-ordered
    std::vector<std::pair<std::string, int>> good;
    std::vector<std::pair<std::string, int>> malicious;
    for (const auto& [address, entry] : registry.entries) {
        auto it = row_of.find(address);
        if (it == row_of.end()) {
            if (warnings) {
                warnings->push_back("label for '" + address + "' has no feature row; dropped");
            }
            continue;
        }
        if (entry.label == Label::Malicious) {
            malicious.emplace_back(address, it->second);
        } else {
            good.emplace_back(address, it->second);
        }
    }
    if (malicious.empty()) {
        raise(ErrorKind::NoMaliciousRows, "no malicious rows after joining labels with features");
    }

    if (good.size() > n_good_sample) {
        SplitMix64 rng(derive_seed(seed, kGoodSampleStream));
        for (size_t i = good.size() - 1; i > 0; --i) {
            size_t j = static_cast<size_t>(rng.next_below(static_cast<uint64_t>(i) + 1));
            std::swap(good[i], good[j]);
        }
        good.resize(static_cast<size_t>(n_good_sample));
        std::sort(good.begin(), good.end());
    }

    std::vector<std::pair<std::string, int>> rows; // (address, table row), interleaved by address
    rows.reserve(good.size() + malicious.size());
    std::vector<int> row_labels;
    {
        std::vector<std::pair<std::string, int>> merged;
        merged.reserve(good.size() + malicious.size());
        std::vector<int> merged_labels;
        size_t gi = 0, mi = 0;
        while (gi < good.size() || mi < malicious.size()) {
            bool take_good = mi == malicious.size() ||
                             (gi < good.size() && good[gi].first < malicious[mi].first);
            if (take_good) {
                merged.push_back(good[gi++]);
                merged_labels.push_back(0);
            } else {
                merged.push_back(malicious[mi++]);
                merged_labels.push_back(1);
            }
        }
        rows = std::move(merged);
        row_labels = std::move(merged_labels);
    }

    Dataset ds;
    ds.schema_version = kSchemaVersion;
    ds.column_names = table.column_names;
    ds.x.rows = static_cast<int>(rows.size());
    ds.x.cols = table.x.cols;
    ds.x.data.reserve(static_cast<size_t>(ds.x.rows) * static_cast<size_t>(ds.x.cols));
    for (const auto& [address, row] : rows) {
        auto src = table.x.row(row);
        ds.x.data.insert(ds.x.data.end(), src.begin(), src.end());
        ds.addresses.push_back(address);
    }
    ds.labels = std::move(row_labels);
    return ds;
}

ImputeStats fit_impute(const Matrix& x) {
    ImputeStats stats;
    stats.medians.resize(static_cast<size_t>(x.cols));
    std::vector<double> col;
    for (int c = 0; c < x.cols; ++c) {
        col.clear();
        for (int r = 0; r < x.rows; ++r) {
            double v = x.at(r, c);
            if (!std::isnan(v)) col.push_back(v);
        }
        stats.medians[static_cast<size_t>(c)] = col.empty() ? 0.0 : vec_median(col);
    }
    return stats;
}

void apply_impute(Matrix& x, const ImputeStats& stats) {
    if (stats.medians.size() != static_cast<size_t>(x.cols)) {
        raise(ErrorKind::DimensionMismatch, "imputation stats do not match column count");
    }
    for (int r = 0; r < x.rows; ++r) {
        for (int c = 0; c < x.cols; ++c) {
            double& v = x.at(r, c);
            if (std::isnan(v)) v = stats.medians[static_cast<size_t>(c)];
        }
    }
}

std::vector<int> fit_nonzero_variance_columns(const Matrix& x) {
    std::vector<int> kept;
    for (int c = 0; c < x.cols; ++c) {
        bool varies = false;
        if (x.rows > 0) {
            double first = x.at(0, c);
            for (int r = 1; r < x.rows; ++r) {
                if (x.at(r, c) != first) {
                    varies = true;
                    break;
                }
            }
        }
        if (varies) kept.push_back(c);
    }
    if (kept.empty()) {
        raise(ErrorKind::AllColumnsDropped, "every column has zero variance");
    }
    return kept;
}

Matrix select_columns(const Matrix& x, const std::vector<int>& kept) {
    Matrix out;
    out.rows = x.rows;
    out.cols = static_cast<int>(kept.size());
    out.data.resize(static_cast<size_t>(out.rows) * static_cast<size_t>(out.cols));
    for (int r = 0; r < x.rows; ++r) {
        for (size_t k = 0; k < kept.size(); ++k) {
            out.at(r, static_cast<int>(k)) = x.at(r, kept[k]);
        }
    }
    return out;
}

ZscoreStats fit_zscore(const Matrix& x) {
    ZscoreStats stats;
    stats.mean.resize(static_cast<size_t>(x.cols));
    stats.std.resize(static_cast<size_t>(x.cols));
    std::vector<double> col;
    for (int c = 0; c < x.cols; ++c) {
        col.clear();
        for (int r = 0; r < x.rows; ++r) col.push_back(x.at(r, c));
        stats.mean[static_cast<size_t>(c)] = vec_mean(col);
        stats.std[static_cast<size_t>(c)] = vec_pop_std(col);
    }
    return stats;
}

void apply_zscore(Matrix& x, const ZscoreStats& stats) {
    if (stats.mean.size() != static_cast<size_t>(x.cols)) {
        raise(ErrorKind::DimensionMismatch, "normalization stats do not match column count");
    }
    for (int r = 0; r < x.rows; ++r) {
        for (int c = 0; c < x.cols; ++c) {
            double sd = stats.std[static_cast<size_t>(c)];
            double& v = x.at(r, c);
            v = sd == 0.0 ? 0.0 : (v - stats.mean[static_cast<size_t>(c)]) / sd;
        }
    }
}

Matrix correlation_matrix(const Matrix& x) {
    if (x.rows < 2) {
        raise(ErrorKind::TooFewRows, "correlation needs at least two rows");
    }
    int p = x.cols;
    double n = static_cast<double>(x.rows);

    std::vector<double> mean(static_cast<size_t>(p), 0.0);
    for (int r = 0; r < x.rows; ++r) {
        for (int c = 0; c < p; ++c) mean[static_cast<size_t>(c)] += x.at(r, c);
    }
    for (double& m : mean) m /= n;

    // centered copy keeps the covariance accumulation one pass
    Matrix centered = x;
    for (int r = 0; r < x.rows; ++r) {
        for (int c = 0; c < p; ++c) centered.at(r, c) -= mean[static_cast<size_t>(c)];
    }
    std::vector<double> sd(static_cast<size_t>(p), 0.0);
    for (int r = 0; r < x.rows; ++r) {
        for (int c = 0; c < p; ++c) {
            double v = centered.at(r, c);
            sd[static_cast<size_t>(c)] += v * v;
        }
    }
    for (double& s : sd) s = std::sqrt(s / n);

    Matrix corr;
    corr.rows = p;
    corr.cols = p;
    corr.data.assign(static_cast<size_t>(p) * static_cast<size_t>(p), 0.0);
    for (int i = 0; i < p; ++i) {
        corr.at(i, i) = 1.0;
        if (sd[static_cast<size_t>(i)] == 0.0) continue;
        for (int j = i + 1; j < p; ++j) {
            if (sd[static_cast<size_t>(j)] == 0.0) continue;
            double cov = 0.0;
            for (int r = 0; r < x.rows; ++r) {
                cov += centered.at(r, i) * centered.at(r, j);
            }
            cov /= n;
            double rho = cov / (sd[static_cast<size_t>(i)] * sd[static_cast<size_t>(j)]);
            rho = std::clamp(rho, -1.0, 1.0);
            corr.at(i, j) = rho;
            corr.at(j, i) = rho;
        }
    }
    return corr;
}

void save_correlation_csv(const Matrix& corr, const std::vector<std::string>& names,
                          const std::string& path) {
    if (corr.rows != corr.cols || names.size() != static_cast<size_t>(corr.cols)) {
        raise(ErrorKind::DimensionMismatch, "correlation matrix and names disagree");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        raise(ErrorKind::Io, "cannot open '" + path + "' for writing");
    }
    std::string line = "feature";
    for (const auto& name : names) {
        line += ',';
        line += name;
    }
    out << line << '\n';
    for (int i = 0; i < corr.rows; ++i) {
        line = names[static_cast<size_t>(i)];
        for (int j = 0; j < corr.cols; ++j) {
            line += ',';
            append_double(line, corr.at(i, j));
        }
        out << line << '\n';
    }
    if (!out) {
        raise(ErrorKind::Io, "failed writing '" + path + "'");
    }
}

} // namespace sift
