#include "features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "errors.hpp"
#include "stats.hpp"

namespace sift {

namespace {

constexpr uint64_t kWindowBlocks = 1000;

size_t dominant_chain_index(const AddressHistory& history) {
    std::array<uint64_t, kChainCount> counts{};
    for (const auto& ev : history.events) {
        ++counts[static_cast<size_t>(ev.chain)];
    }
    // Chain enum order equals lexicographic name order, so the first maximum
    // is the lexicographically smallest tie.
    size_t best = 0;
    for (size_t c = 1; c < kChainCount; ++c) {
        if (counts[c] > counts[best]) best = c;
    }
    return best;
}

struct UsdAccumulator {
    uint64_t tx_count = 0;
    std::vector<double> outgoing_usd;

    void emit(std::vector<double>& out) const {
        out.push_back(static_cast<double>(tx_count));
        double sum = 0.0;
        for (double v : outgoing_usd) sum += v;
        out.push_back(outgoing_usd.empty() ? 0.0 : sum);
        out.push_back(vec_mean(outgoing_usd));
        out.push_back(vec_pop_std(outgoing_usd));
    }
};

// Window counts are kept sparse; zero windows inside the span union enter the
// statistics through the span size alone, so arbitrary block heights cannot
// blow up memory.
struct WindowStats {
    double min_count = 0.0;
    double max_count = 0.0;
    double std_count = 0.0;
};

WindowStats window_stats(const std::map<uint64_t, uint64_t>& counts, uint64_t span_windows) {
    WindowStats out;
    if (span_windows == 0 || counts.empty()) {
        return out;
    }
    uint64_t total = 0;
    uint64_t max_c = 0;
    uint64_t min_nonzero = UINT64_MAX;
    for (const auto& kv : counts) {
        total += kv.second;
        max_c = std::max(max_c, kv.second);
        min_nonzero = std::min(min_nonzero, kv.second);
    }
    uint64_t nonzero_windows = counts.size();
    double n = static_cast<double>(span_windows);
    double mu = static_cast<double>(total) / n;
    double ss = 0.0;
    for (const auto& kv : counts) {
        double d = static_cast<double>(kv.second) - mu;
        ss += d * d;
    }
    ss += static_cast<double>(span_windows - nonzero_windows) * mu * mu;
    out.min_count = nonzero_windows < span_windows ? 0.0 : static_cast<double>(min_nonzero);
    out.max_count = static_cast<double>(max_c);
    out.std_count = std::sqrt(ss / n);
    return out;
}

// Number of distinct window indices in the union of per-chain [lo, hi] spans.
uint64_t union_window_count(std::vector<std::pair<uint64_t, uint64_t>> spans) {
    if (spans.empty()) return 0;
    std::sort(spans.begin(), spans.end());
    uint64_t total = 0;
    uint64_t cur_lo = spans[0].first;
    uint64_t cur_hi = spans[0].second;
    for (size_t i = 1; i < spans.size(); ++i) {
        if (spans[i].first <= cur_hi + 1) {
            cur_hi = std::max(cur_hi, spans[i].second);
        } else {
            total += cur_hi - cur_lo + 1;
            cur_lo = spans[i].first;
            cur_hi = spans[i].second;
        }
    }
    total += cur_hi - cur_lo + 1;
    return total;
}

void format_double(std::string& out, double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

} // namespace

std::array<double, kTransactionalFeatures> transactional_features(const AddressHistory& history) {
    if (history.events.empty()) {
        raise(ErrorKind::EmptyHistory, "transactional features need at least one event");
    }
    const auto& events = history.events;
    double n = static_cast<double>(events.size());

    uint64_t successes = 0;
    std::vector<double> gas;
    gas.reserve(events.size());
    for (const auto& ev : events) {
        if (ev.success) ++successes;
        gas.push_back(ev.gas_fee_usd);
    }

    size_t dominant = dominant_chain_index(history);
    std::vector<double> blocks;
    uint64_t min_block = UINT64_MAX;
    uint64_t max_block = 0;
    for (const auto& ev : events) {
        if (static_cast<size_t>(ev.chain) != dominant) continue;
        blocks.push_back(static_cast<double>(ev.block_height));
        min_block = std::min(min_block, ev.block_height);
        max_block = std::max(max_block, ev.block_height);
    }
    double age = static_cast<double>(max_block - min_block);

    return {
        n,
        static_cast<double>(successes) / n,
        vec_pop_std(blocks),
        age,
        age == 0.0 ? n : n / age,
        vec_mean(gas),
        vec_max(gas),
        vec_pop_std(gas),
    };
}

std::vector<double> defi_features(const AddressHistory& history, const FeatureSchema& schema) {
    if (history.events.empty()) {
        raise(ErrorKind::EmptyHistory, "DeFi features need at least one event");
    }
    validate_schema(schema);

    std::vector<double> out;
    out.reserve(kDefiFeatureCount);

    // event_stats: sum/mean/std of per-event USD value per event type
    std::array<std::vector<double>, kEventTypeCount> usd_by_event;
    std::vector<double> protocol_fees;
    std::vector<double> gas_fees;
    std::array<UsdAccumulator, kProtocolCount> by_protocol;
    std::array<UsdAccumulator, kChainCount> by_chain;
    std::vector<double> token_counts(kTokenFeatures, 0.0);

    for (const auto& ev : history.events) {
        usd_by_event[static_cast<size_t>(ev.event_type)].push_back(ev.value_usd);
        protocol_fees.push_back(ev.protocol_fee_usd);
        gas_fees.push_back(ev.gas_fee_usd);

        auto& proto = by_protocol[static_cast<size_t>(ev.protocol)];
        auto& chain = by_chain[static_cast<size_t>(ev.chain)];
        ++proto.tx_count;
        ++chain.tx_count;
        if (ev.direction == Direction::Outgoing) {
            proto.outgoing_usd.push_back(ev.value_usd);
            chain.outgoing_usd.push_back(ev.value_usd);
        }
        token_counts[static_cast<size_t>(schema.token_slot(ev.token))] += 1.0;
    }

    for (const auto& usd : usd_by_event) {
        double sum = 0.0;
        for (double v : usd) sum += v;
        out.push_back(usd.empty() ? 0.0 : sum);
        out.push_back(vec_mean(usd));
        out.push_back(vec_pop_std(usd));
    }

    for (const auto* fees : {&protocol_fees, &gas_fees}) {
        out.push_back(vec_min(*fees));
        out.push_back(vec_max(*fees));
        out.push_back(vec_pop_std(*fees));
        out.push_back(vec_mean(*fees));
        out.push_back(vec_median(*fees));
    }

    for (const auto& acc : by_protocol) acc.emit(out);
    for (const auto& acc : by_chain) acc.emit(out);

    // windowed: per-chain active spans in absolute 1000-block windows
    std::array<std::pair<uint64_t, uint64_t>, kChainCount> chain_span;
    std::array<bool, kChainCount> chain_active{};
    for (const auto& ev : history.events) {
        size_t ci = static_cast<size_t>(ev.chain);
        uint64_t w = ev.block_height / kWindowBlocks;
        if (!chain_active[ci]) {
            chain_active[ci] = true;
            chain_span[ci] = {w, w};
        } else {
            chain_span[ci].first = std::min(chain_span[ci].first, w);
            chain_span[ci].second = std::max(chain_span[ci].second, w);
        }
    }
    std::vector<std::pair<uint64_t, uint64_t>> spans;
    for (size_t c = 0; c < kChainCount; ++c) {
        if (chain_active[c]) spans.push_back(chain_span[c]);
    }
    uint64_t span_windows = union_window_count(std::move(spans));

    std::array<std::map<uint64_t, uint64_t>, kEventTypeCount * kWindowedProtocolCount> pair_counts;
    for (const auto& ev : history.events) {
        int proto = static_cast<int>(ev.protocol);
        if (proto >= kWindowedProtocolCount) continue;
        size_t pair = static_cast<size_t>(ev.event_type) * kWindowedProtocolCount + static_cast<size_t>(proto);
        ++pair_counts[pair][ev.block_height / kWindowBlocks];
    }
    for (const auto& counts : pair_counts) {
        WindowStats ws = window_stats(counts, span_windows);
        out.push_back(ws.min_count);
        out.push_back(ws.max_count);
        out.push_back(ws.std_count);
    }

    out.insert(out.end(), token_counts.begin(), token_counts.end());

    return out;
}

std::vector<FeatureVector> extract_features(const std::vector<AddressHistory>& histories,
                                            const FeatureSchema& schema) {
    validate_schema(schema);
    std::vector<FeatureVector> vectors;
    vectors.reserve(histories.size());
    for (const auto& history : histories) {
        FeatureVector fv;
        fv.address = history.address;
        fv.schema_version = schema.version;
        auto txn = transactional_features(history);
        fv.values.assign(txn.begin(), txn.end());
        auto defi = defi_features(history, schema);
        fv.values.insert(fv.values.end(), defi.begin(), defi.end());
        vectors.push_back(std::move(fv));
    }
    return vectors;
}

FeatureTable to_feature_table(const std::vector<FeatureVector>& vectors,
                              const FeatureSchema& schema) {
    FeatureTable table;
    table.column_names = schema.names;
    table.x.rows = static_cast<int>(vectors.size());
    table.x.cols = static_cast<int>(schema.names.size());
    table.x.data.reserve(static_cast<size_t>(table.x.rows) * static_cast<size_t>(table.x.cols));
    for (const auto& fv : vectors) {
        if (fv.values.size() != schema.names.size()) {
            raise(ErrorKind::SchemaMismatch, "feature vector length does not match schema");
        }
        table.addresses.push_back(fv.address);
        table.x.data.insert(table.x.data.end(), fv.values.begin(), fv.values.end());
    }
    return table;
}

void save_feature_table(const FeatureTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        raise(ErrorKind::Io, "cannot open '" + path + "' for writing");
    }
    std::string line = "address";
    for (const auto& name : table.column_names) {
        line += ',';
        line += name;
    }
    line += '\n';
    out << line;
    for (int r = 0; r < table.x.rows; ++r) {
        line = table.addresses[static_cast<size_t>(r)];
        for (int c = 0; c < table.x.cols; ++c) {
            line += ',';
            format_double(line, table.x.at(r, c));
        }
        line += '\n';
        out << line;
    }
    if (!out) {
        raise(ErrorKind::Io, "failed writing '" + path + "'");
    }
}

void save_feature_matrix(const std::vector<FeatureVector>& vectors, const FeatureSchema& schema,
                         const std::string& path) {
    save_feature_table(to_feature_table(vectors, schema), path);
}

FeatureTable load_feature_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        raise(ErrorKind::Io, "cannot open feature matrix '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        raise(ErrorKind::MalformedRow, "feature matrix '" + path + "' is empty");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();

    FeatureTable table;
    {
        std::stringstream header(line);
        std::string cell;
        bool first = true;
        while (std::getline(header, cell, ',')) {
            if (first) {
                if (cell != "address") {
                    raise(ErrorKind::MalformedRow, "first column of '" + path + "' must be 'address'");
                }
                first = false;
            } else {
                table.column_names.push_back(cell);
            }
        }
    }
    int cols = static_cast<int>(table.column_names.size());
    if (cols == 0) {
        raise(ErrorKind::MalformedRow, "feature matrix '" + path + "' has no feature columns");
    }

    std::vector<double> values;
    uint64_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        size_t pos = line.find(',');
        if (pos == std::string::npos) {
            raise(ErrorKind::MalformedRow, path + ":" + std::to_string(line_no) + ": expected feature columns");
        }
        table.addresses.push_back(line.substr(0, pos));
        int seen = 0;
        size_t start = pos + 1;
        while (start <= line.size()) {
            size_t end = line.find(',', start);
            if (end == std::string::npos) end = line.size();
            double v = 0.0;
            auto res = std::from_chars(line.data() + start, line.data() + end, v);
            if (res.ec != std::errc() || res.ptr != line.data() + end) {
                raise(ErrorKind::MalformedRow,
                      path + ":" + std::to_string(line_no) + ": bad numeric cell");
            }
            values.push_back(v);
            ++seen;
            start = end + 1;
        }
        if (seen != cols) {
            raise(ErrorKind::MalformedRow,
                  path + ":" + std::to_string(line_no) + ": expected " + std::to_string(cols) + " cells");
        }
    }
    table.x.rows = static_cast<int>(table.addresses.size());
    table.x.cols = cols;
    table.x.data = std::move(values);
    return table;
}

void save_distribution_summary(const FeatureTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        raise(ErrorKind::Io, "cannot open '" + path + "' for writing");
    }
    out << "feature,min,q1,median,q3,max,mean,std\n";
    for (int c = 0; c < table.x.cols; ++c) {
        std::vector<double> col;
        col.reserve(static_cast<size_t>(table.x.rows));
        for (int r = 0; r < table.x.rows; ++r) {
            col.push_back(table.x.at(r, c));
        }
        std::vector<double> sorted = col;
        std::sort(sorted.begin(), sorted.end());
        auto quantile = [&](double q) {
            if (sorted.empty()) return 0.0;
            double pos = q * static_cast<double>(sorted.size() - 1);
            size_t lo = static_cast<size_t>(pos);
            size_t hi = std::min(lo + 1, sorted.size() - 1);
            double frac = pos - static_cast<double>(lo);
            return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
        };
        std::string line = table.column_names[static_cast<size_t>(c)];
        for (double v : {quantile(0.0), quantile(0.25), quantile(0.5), quantile(0.75), quantile(1.0),
                         vec_mean(col), vec_pop_std(col)}) {
            line += ',';
            format_double(line, v);
        }
        out << line << '\n';
    }
    if (!out) {
        raise(ErrorKind::Io, "failed writing '" + path + "'");
    }
}

} // namespace sift
