#include "schema.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "errors.hpp"

namespace sift {

namespace {

using nlohmann::json;

std::string sanitize(const std::string& s) {
    std::string out = s;
    for (char& c : out) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
        if (!ok) c = '_';
    }
    return out;
}

std::string pad_token_name(int slot) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%s%02d", kPadTokenPrefix, slot);
    return buf;
}

} // namespace

FeatureSchema make_schema(std::vector<std::string> top_tokens) {
    if (static_cast<int>(top_tokens.size()) > kTopTokens) {
        raise(ErrorKind::SchemaMismatch, "more than 99 top tokens");
    }
    for (int slot = static_cast<int>(top_tokens.size()); slot < kTopTokens; ++slot) {
        top_tokens.push_back(pad_token_name(slot));
    }

    FeatureSchema schema;
    schema.version = kSchemaVersion;
    schema.top_tokens = std::move(top_tokens);
    schema.names.reserve(kFeatureCount);

    auto add_group = [&](const std::string& group, int length) {
        schema.group_offsets[group] = GroupSpan{static_cast<int>(schema.names.size()) - length, length};
    };

    schema.names.insert(schema.names.end(),
                        {"txn_count", "txn_success_share", "txn_block_height_std",
                         "txn_wallet_age_blocks", "txn_count_per_age", "txn_gas_fee_mean",
                         "txn_gas_fee_max", "txn_gas_fee_std"});
    add_group("transactional", kTransactionalFeatures);

    for (auto event : event_type_names()) {
        std::string base = "evt_" + std::string(event) + "_usd_";
        schema.names.push_back(base + "sum");
        schema.names.push_back(base + "mean");
        schema.names.push_back(base + "std");
    }
    add_group("event_stats", kEventStatFeatures);

    for (const char* fee : {"protocol", "gas"}) {
        for (const char* stat : {"min", "max", "std", "mean", "median"}) {
            schema.names.push_back(std::string("fee_") + fee + "_" + stat);
        }
    }
    add_group("fee_stats", kFeeStatFeatures);

    for (auto proto : protocol_names()) {
        std::string base = "proto_" + sanitize(std::string(proto)) + "_";
        schema.names.push_back(base + "tx_count");
        schema.names.push_back(base + "out_usd_sum");
        schema.names.push_back(base + "out_usd_mean");
        schema.names.push_back(base + "out_usd_std");
    }
    add_group("protocol_stats", kProtocolStatFeatures);

    for (auto chain : chain_names()) {
        std::string base = "chain_" + sanitize(std::string(chain)) + "_";
        schema.names.push_back(base + "tx_count");
        schema.names.push_back(base + "out_usd_sum");
        schema.names.push_back(base + "out_usd_mean");
        schema.names.push_back(base + "out_usd_std");
    }
    add_group("chain_stats", kChainStatFeatures);

    for (auto event : event_type_names()) {
        for (int p = 0; p < kWindowedProtocolCount; ++p) {
            std::string base = "win_" + std::string(event) + "_" +
                               sanitize(std::string(protocol_names()[static_cast<size_t>(p)])) + "_";
            schema.names.push_back(base + "min");
            schema.names.push_back(base + "max");
            schema.names.push_back(base + "std");
        }
    }
    add_group("windowed", kWindowedFeatures);

    for (int slot = 0; slot < kTopTokens; ++slot) {
        char prefix[8];
        std::snprintf(prefix, sizeof(prefix), "tok%02d_", slot);
        schema.names.push_back(prefix + sanitize(schema.top_tokens[static_cast<size_t>(slot)]) + "_count");
    }
    schema.names.push_back("tok99_long_tail_count");
    add_group("tokens", kTokenFeatures);

    for (int slot = 0; slot < kTopTokens; ++slot) {
        const std::string& tok = schema.top_tokens[static_cast<size_t>(slot)];
        if (!tok.starts_with(kPadTokenPrefix)) {
            schema.token_slots.emplace(tok, slot);
        }
    }

    validate_schema(schema);
    return schema;
}

FeatureSchema derive_token_schema(const std::vector<DecodedEvent>& events) {
    if (events.empty()) {
        raise(ErrorKind::EmptyCorpus, "cannot derive a token schema from an empty corpus");
    }
    std::unordered_map<std::string, uint64_t> counts;
    for (const auto& ev : events) {
        ++counts[ev.token];
    }
    std::vector<std::pair<std::string, uint64_t>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (static_cast<int>(ranked.size()) > kTopTokens) {
        ranked.resize(kTopTokens);
    }
    std::vector<std::string> top;
    top.reserve(ranked.size());
    for (auto& [token, count] : ranked) {
        top.push_back(std::move(token));
    }
    return make_schema(std::move(top));
}

void validate_schema(const FeatureSchema& schema) {
    if (static_cast<int>(schema.names.size()) != kFeatureCount) {
        raise(ErrorKind::SchemaMismatch, "schema must have exactly 422 feature names");
    }
    if (static_cast<int>(schema.top_tokens.size()) != kTopTokens) {
        raise(ErrorKind::SchemaMismatch, "schema must have exactly 99 top tokens");
    }
    std::unordered_set<std::string> unique_names(schema.names.begin(), schema.names.end());
    if (unique_names.size() != schema.names.size()) {
        raise(ErrorKind::SchemaMismatch, "feature names must be unique");
    }
    std::unordered_set<std::string> unique_tokens(schema.top_tokens.begin(), schema.top_tokens.end());
    if (unique_tokens.size() != schema.top_tokens.size()) {
        raise(ErrorKind::SchemaMismatch, "top tokens must be distinct");
    }
    int total = 0;
    for (const auto& [group, span] : schema.group_offsets) {
        total += span.length;
    }
    if (total != kFeatureCount) {
        raise(ErrorKind::SchemaMismatch, "group lengths must sum to 422");
    }
}

void save_schema(const FeatureSchema& schema, const std::string& path) {
    json obj;
    obj["version"] = schema.version;
    obj["names"] = schema.names;
    json groups;
    for (const auto& [group, span] : schema.group_offsets) {
        groups[group] = {span.offset, span.length};
    }
    obj["group_offsets"] = groups;
    obj["top_tokens"] = schema.top_tokens;

    std::ofstream out(path, std::ios::binary);
    if (!out) {
        raise(ErrorKind::Io, "cannot open '" + path + "' for writing");
    }
    out << obj.dump(2) << '\n';
    if (!out) {
        raise(ErrorKind::Io, "failed writing '" + path + "'");
    }
}

FeatureSchema load_schema(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        raise(ErrorKind::Io, "cannot open schema file '" + path + "'");
    }
    json obj = json::parse(in, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
        raise(ErrorKind::SchemaMismatch, "schema file '" + path + "' is not valid JSON");
    }
    try {
        if (obj.at("version").get<std::string>() != kSchemaVersion) {
            raise(ErrorKind::SchemaMismatch, "unsupported schema version in '" + path + "'");
        }
        std::vector<std::string> tokens = obj.at("top_tokens").get<std::vector<std::string>>();
        FeatureSchema schema = make_schema(std::move(tokens));
        if (schema.names != obj.at("names").get<std::vector<std::string>>()) {
            raise(ErrorKind::SchemaMismatch, "feature names in '" + path + "' do not match the layout");
        }
        return schema;
    } catch (const json::exception& e) {
        raise(ErrorKind::SchemaMismatch, "schema file '" + path + "': " + e.what());
    }
}

} // namespace sift
