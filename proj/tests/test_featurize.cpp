#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "core/errors.hpp"
#include "core/features.hpp"
#include "core/schema.hpp"
#include "core/synth.hpp"
#include "helpers.hpp"
#include "oracle_features.hpp"

using namespace sift;
using sift::testing::EventSpec;
using sift::testing::TempDir;
using sift::testing::make_event;
using sift::testing::oracle_features;

namespace {

int idx(const FeatureSchema& schema, const std::string& name) {
    auto it = std::find(schema.names.begin(), schema.names.end(), name);
    REQUIRE(it != schema.names.end());
    return static_cast<int>(it - schema.names.begin());
}

bool close(double a, double b, double rel = 1e-9) {
    return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

FeatureSchema tiny_schema() { return make_schema({"T000", "T001", "T002"}); }

} // namespace

TEST_CASE("schema has the documented shape") {
    auto schema = tiny_schema();
    CHECK(schema.version == kSchemaVersion);
    REQUIRE(schema.names.size() == 422);

    std::set<std::string> unique(schema.names.begin(), schema.names.end());
    CHECK(unique.size() == 422);

    const std::vector<std::pair<std::string, std::pair<int, int>>> expected{
        {"transactional", {0, 8}},   {"event_stats", {8, 24}}, {"fee_stats", {32, 10}},
        {"protocol_stats", {42, 92}}, {"chain_stats", {134, 44}}, {"windowed", {178, 144}},
        {"tokens", {322, 100}},
    };
    REQUIRE(schema.group_offsets.size() == expected.size());
    int defi_total = 0;
    for (const auto& [group, span] : expected) {
        REQUIRE(schema.group_offsets.count(group) == 1);
        CHECK(schema.group_offsets.at(group).offset == span.first);
        CHECK(schema.group_offsets.at(group).length == span.second);
        if (group != "transactional") defi_total += span.second;
    }
    CHECK(defi_total == 414);
    CHECK(kFeatureCount == 422);

    REQUIRE(schema.top_tokens.size() == 99);
    CHECK(schema.top_tokens[0] == "T000");
    CHECK(schema.top_tokens[3].rfind(kPadTokenPrefix, 0) == 0); // padded slot
    CHECK(schema.token_slot("T001") == 1);
    CHECK(schema.token_slot("NOT_A_TOKEN") == 99);
}

TEST_CASE("token ranking is count-desc with lexicographic ties") {
    std::vector<DecodedEvent> events;
    int hash = 0;
    auto push = [&](const std::string& token, int count) {
        for (int i = 0; i < count; ++i) {
            events.push_back(
                make_event({.token = token, .tx_hash = "0x" + std::to_string(hash++)}));
        }
    };
    push("ZZZ", 5);
    push("AAA", 2);
    push("MMM", 2); // ties with AAA; AAA sorts first
    push("QQQ", 1);

    auto schema = derive_token_schema(events);
    CHECK(schema.top_tokens[0] == "ZZZ");
    CHECK(schema.top_tokens[1] == "AAA");
    CHECK(schema.top_tokens[2] == "MMM");
    CHECK(schema.top_tokens[3] == "QQQ");
    CHECK(schema.top_tokens[4].rfind(kPadTokenPrefix, 0) == 0);

    CHECK_THROWS_AS((void)derive_token_schema({}), Error);
}

TEST_CASE("token ranking keeps only the top 99") {
    std::vector<DecodedEvent> events;
    int hash = 0;
    for (int t = 0; t < 120; ++t) {
        char token[8];
        std::snprintf(token, sizeof(token), "T%03d", t);
        for (int i = 0; i < 121 - t; ++i) { // strictly decreasing counts
            events.push_back(
                make_event({.token = token, .tx_hash = "0x" + std::to_string(hash++)}));
        }
    }
    auto schema = derive_token_schema(events);
    CHECK(schema.top_tokens.front() == "T000");
    CHECK(schema.top_tokens.back() == "T098");
    CHECK(schema.token_slot("T099") == 99); // rank 100 lands in the long tail
    CHECK(schema.token_slot("T119") == 99);
}

TEST_CASE("schema file round trip") {
    TempDir dir;
    auto path = dir.file("schema.json");
    auto schema = tiny_schema();
    save_schema(schema, path);
    auto loaded = load_schema(path);
    CHECK(loaded.version == schema.version);
    CHECK(loaded.names == schema.names);
    CHECK(loaded.top_tokens == schema.top_tokens);
    REQUIRE(loaded.group_offsets.size() == schema.group_offsets.size());
    for (const auto& [group, span] : schema.group_offsets) {
        CHECK(loaded.group_offsets.at(group).offset == span.offset);
        CHECK(loaded.group_offsets.at(group).length == span.length);
    }
    CHECK(loaded.token_slot("T002") == 2);
}

TEST_CASE("transactional worked examples") {
    SUBCASE("single event uses the age-zero rule") {
        AddressHistory h{"0xaa", {make_event({.block_height = 100, .gas_fee_usd = 2.0})}};
        auto f = transactional_features(h);
        CHECK(f == std::array<double, 8>{1, 1.0, 0, 0, 1, 2.0, 2.0, 0});
    }
    SUBCASE("two-event example") {
        AddressHistory h{"0xaa",
                         {make_event({.block_height = 100, .tx_hash = "0x1", .gas_fee_usd = 1.0}),
                          make_event({.block_height = 300, .tx_hash = "0x2", .gas_fee_usd = 3.0})}};
        auto f = transactional_features(h);
        CHECK(f[0] == 2);
        CHECK(f[1] == 1.0);
        CHECK(f[2] == 100);  // population std of {100, 300}
        CHECK(f[3] == 200);
        CHECK(f[4] == 0.01); // 2 / 200
        CHECK(f[5] == 2.0);
        CHECK(f[6] == 3.0);
        CHECK(f[7] == 1.0);
    }
    SUBCASE("success share is a plain ratio") {
        AddressHistory h{"0xaa",
                         {make_event({.block_height = 1, .tx_hash = "0x1"}),
                          make_event({.block_height = 2, .tx_hash = "0x2"}),
                          make_event({.block_height = 3, .tx_hash = "0x3"}),
                          make_event({.block_height = 4, .tx_hash = "0x4", .success = false})}};
        CHECK(transactional_features(h)[1] == 0.75);
    }
    SUBCASE("empty history is rejected") {
        AddressHistory h{"0xaa", {}};
        CHECK_THROWS_AS((void)transactional_features(h), Error);
    }
}

TEST_CASE("block stats come from the dominant chain") {
    // Two Ethereum events vs one Arbitrum event: Ethereum dominates.
    AddressHistory h{
        "0xaa",
        {make_event({.chain = Chain::Arbitrum, .block_height = 1, .tx_hash = "0x1"}),
         make_event({.chain = Chain::Ethereum, .block_height = 100, .tx_hash = "0x2"}),
         make_event({.chain = Chain::Ethereum, .block_height = 300, .tx_hash = "0x3"})}};
    auto f = transactional_features(h);
    CHECK(f[0] == 3);
    CHECK(f[2] == 100);
    CHECK(f[3] == 200);

    // One event each: the tie goes to the lexicographically smaller chain.
    AddressHistory tie{
        "0xbb",
        {make_event({.chain = Chain::Ethereum, .block_height = 700, .tx_hash = "0x1"}),
         make_event({.chain = Chain::Arbitrum, .block_height = 10, .tx_hash = "0x2"})}};
    auto g = transactional_features(tie);
    CHECK(g[3] == 0); // Arbitrum span is a single block
    CHECK(g[4] == 2); // age-zero rule
}

TEST_CASE("defi worked example: single Aave deposit") {
    auto schema = tiny_schema();
    AddressHistory h{"0xaa", {make_event({.token = "T000",
                                          .block_height = 1500,
                                          .value_usd = 50.0,
                                          .protocol_fee_usd = 0.25})}};
    auto fv = extract_features({h}, schema);
    REQUIRE(fv.size() == 1);
    const auto& v = fv[0].values;
    REQUIRE(v.size() == 422);

    CHECK(v[static_cast<size_t>(idx(schema, "evt_deposit_usd_sum"))] == 50.0);
    CHECK(v[static_cast<size_t>(idx(schema, "evt_deposit_usd_mean"))] == 50.0);
    CHECK(v[static_cast<size_t>(idx(schema, "evt_deposit_usd_std"))] == 0.0);
    CHECK(v[static_cast<size_t>(idx(schema, "evt_swap_usd_sum"))] == 0.0);

    CHECK(v[static_cast<size_t>(idx(schema, "proto_Aave_tx_count"))] == 1.0);
    CHECK(v[static_cast<size_t>(idx(schema, "proto_Aave_out_usd_sum"))] == 50.0);
    CHECK(v[static_cast<size_t>(idx(schema, "proto_Aave_out_usd_mean"))] == 50.0);
    CHECK(v[static_cast<size_t>(idx(schema, "proto_Aave_out_usd_std"))] == 0.0);
    CHECK(v[static_cast<size_t>(idx(schema, "proto_Curve_tx_count"))] == 0.0);

    CHECK(v[static_cast<size_t>(idx(schema, "chain_Ethereum_tx_count"))] == 1.0);
    CHECK(v[static_cast<size_t>(idx(schema, "chain_BSC_tx_count"))] == 0.0);

    CHECK(v[static_cast<size_t>(idx(schema, "win_deposit_Aave_min"))] == 1.0);
    CHECK(v[static_cast<size_t>(idx(schema, "win_deposit_Aave_max"))] == 1.0);
    CHECK(v[static_cast<size_t>(idx(schema, "win_deposit_Aave_std"))] == 0.0);
    CHECK(v[static_cast<size_t>(idx(schema, "win_swap_Aave_max"))] == 0.0);

    CHECK(v[static_cast<size_t>(idx(schema, "fee_protocol_min"))] == 0.25);
    CHECK(v[static_cast<size_t>(idx(schema, "fee_protocol_median"))] == 0.25);

    CHECK(v[static_cast<size_t>(idx(schema, "tok00_T000_count"))] == 1.0);
    CHECK(v[static_cast<size_t>(idx(schema, "tok99_long_tail_count"))] == 0.0);
}

TEST_CASE("defi worked example: sparse deposit windows") {
    auto schema = tiny_schema();
    AddressHistory h{"0xaa",
                     {make_event({.block_height = 0, .tx_hash = "0x1"}),
                      make_event({.block_height = 10, .tx_hash = "0x2"}),
                      make_event({.block_height = 2500, .tx_hash = "0x3"})}};
    auto fv = extract_features({h}, schema);
    const auto& v = fv[0].values;

    // Window counts over indices 0..2 are [2, 0, 1].
    CHECK(v[static_cast<size_t>(idx(schema, "win_deposit_Aave_min"))] == 0.0);
    CHECK(v[static_cast<size_t>(idx(schema, "win_deposit_Aave_max"))] == 2.0);
    CHECK(close(v[static_cast<size_t>(idx(schema, "win_deposit_Aave_std"))],
                std::sqrt(2.0 / 3.0)));
}

TEST_CASE("defi worked example: fee statistics") {
    auto schema = tiny_schema();
    std::vector<DecodedEvent> events;
    for (int i = 0; i < 4; ++i) {
        events.push_back(make_event({.block_height = 100 + static_cast<uint64_t>(i),
                                     .tx_hash = "0x" + std::to_string(i),
                                     .gas_fee_usd = 1.0 + i}));
    }
    AddressHistory h{"0xaa", events};
    auto fv = extract_features({h}, schema);
    const auto& v = fv[0].values;

    CHECK(v[static_cast<size_t>(idx(schema, "fee_gas_min"))] == 1.0);
    CHECK(v[static_cast<size_t>(idx(schema, "fee_gas_max"))] == 4.0);
    CHECK(close(v[static_cast<size_t>(idx(schema, "fee_gas_std"))], std::sqrt(1.25)));
    CHECK(v[static_cast<size_t>(idx(schema, "fee_gas_mean"))] == 2.5);
    CHECK(v[static_cast<size_t>(idx(schema, "fee_gas_median"))] == 2.5);
}

TEST_CASE("engine matches the brute-force oracle on synthetic addresses") {
    SynthConfig config;
    config.seed = 404;
    config.n_good = 30;
    config.n_malicious = 10;
    auto corpus = generate_corpus(config);
    auto schema = derive_token_schema(corpus.events);
    auto histories = build_histories(corpus.events);
    auto engine = extract_features(histories, schema);
    REQUIRE(engine.size() == histories.size());

    for (size_t i = 0; i < histories.size(); ++i) {
        auto expected = oracle_features(histories[i].events, schema);
        REQUIRE(expected.size() == 422);
        for (size_t j = 0; j < 422; ++j) {
            if (!close(engine[i].values[j], expected[j])) {
                CAPTURE(histories[i].address);
                CAPTURE(schema.names[j]);
                CHECK(engine[i].values[j] == doctest::Approx(expected[j]).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("multichain windows merge by absolute index") {
    auto schema = tiny_schema();
    // Ethereum spans windows 0..2, Arbitrum windows 2..3; window 2 is shared,
    // so the union is {0,1,2,3} and its deposit counts are [1,0,2,1].
    AddressHistory h{
        "0xaa",
        {make_event({.chain = Chain::Ethereum, .block_height = 100, .tx_hash = "0x1"}),
         make_event({.chain = Chain::Ethereum, .block_height = 2100, .tx_hash = "0x2"}),
         make_event({.chain = Chain::Arbitrum, .block_height = 2200, .tx_hash = "0x3"}),
         make_event({.chain = Chain::Arbitrum, .block_height = 3100, .tx_hash = "0x4"})}};
    auto fv = extract_features({h}, schema);
    const auto& v = fv[0].values;

    auto expected = oracle_features(h.events, schema);
    CHECK(v[static_cast<size_t>(idx(schema, "win_deposit_Aave_min"))] == 0.0);
    CHECK(v[static_cast<size_t>(idx(schema, "win_deposit_Aave_max"))] == 2.0);
    CHECK(close(v[static_cast<size_t>(idx(schema, "win_deposit_Aave_std"))],
                expected[static_cast<size_t>(idx(schema, "win_deposit_Aave_std"))]));
}

TEST_CASE("extraction ignores event order") {
    SynthConfig config;
    config.seed = 500;
    config.n_good = 10;
    config.n_malicious = 5;
    auto corpus = generate_corpus(config);
    auto schema = derive_token_schema(corpus.events);

    auto baseline = extract_features(build_histories(corpus.events), schema);

    std::mt19937 rng(7);
    auto shuffled = corpus.events;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    auto again = extract_features(build_histories(shuffled), schema);

    REQUIRE(again.size() == baseline.size());
    for (size_t i = 0; i < baseline.size(); ++i) {
        CHECK(again[i].address == baseline[i].address);
        CHECK(again[i].values == baseline[i].values); // bit-identical
    }
}

TEST_CASE("count features partition the event count") {
    SynthConfig config;
    config.seed = 321;
    config.n_good = 20;
    config.n_malicious = 10;
    auto corpus = generate_corpus(config);
    auto schema = derive_token_schema(corpus.events);
    auto histories = build_histories(corpus.events);
    auto vectors = extract_features(histories, schema);

    auto proto_span = schema.group_offsets.at("protocol_stats");
    auto chain_span = schema.group_offsets.at("chain_stats");
    auto token_span = schema.group_offsets.at("tokens");

    for (size_t i = 0; i < vectors.size(); ++i) {
        double n = static_cast<double>(histories[i].events.size());
        const auto& v = vectors[i].values;

        double proto_total = 0.0;
        for (int p = 0; p < kProtocolCount; ++p) {
            proto_total += v[static_cast<size_t>(proto_span.offset + 4 * p)];
        }
        double chain_total = 0.0;
        for (int c = 0; c < kChainCount; ++c) {
            chain_total += v[static_cast<size_t>(chain_span.offset + 4 * c)];
        }
        double token_total = 0.0;
        for (int t = 0; t < 100; ++t) {
            token_total += v[static_cast<size_t>(token_span.offset + t)];
        }
        CHECK(proto_total == n);
        CHECK(chain_total == n);
        CHECK(token_total == n);
        CHECK(v[0] == n);

        // Per-pair windowed invariant: max >= min >= 0.
        auto win = schema.group_offsets.at("windowed");
        for (int pair = 0; pair < 48; ++pair) {
            double mn = v[static_cast<size_t>(win.offset + 3 * pair)];
            double mx = v[static_cast<size_t>(win.offset + 3 * pair + 1)];
            CHECK(mx >= mn);
            CHECK(mn >= 0.0);
        }
        CHECK(v[1] >= 0.0);
        CHECK(v[1] <= 1.0);
        CHECK(v[3] >= 0.0);
    }
}

TEST_CASE("feature matrix file round trip is bit exact") {
    TempDir dir;
    SynthConfig config;
    config.seed = 99;
    config.n_good = 15;
    config.n_malicious = 5;
    auto corpus = generate_corpus(config);
    auto schema = derive_token_schema(corpus.events);
    auto vectors = extract_features(build_histories(corpus.events), schema);
    auto table = to_feature_table(vectors, schema);

    auto path = dir.file("features.csv");
    save_feature_table(table, path);
    auto loaded = load_feature_matrix(path);

    CHECK(loaded.addresses == table.addresses);
    CHECK(loaded.column_names == table.column_names);
    REQUIRE(loaded.x.rows == table.x.rows);
    REQUIRE(loaded.x.cols == table.x.cols);
    CHECK(loaded.x.data == table.x.data); // shortest round-trip serialization

    CHECK_THROWS_AS((void)load_feature_matrix(dir.file("missing.csv")), Error);

    auto bad = dir.file("bad.csv");
    {
        std::ofstream out(bad);
        out << "address,f1\n0xaa,notanumber\n";
    }
    try {
        (void)load_feature_matrix(bad);
        FAIL("expected MalformedRow");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::MalformedRow);
    }
}

TEST_CASE("distribution summary quantiles") {
    TempDir dir;
    FeatureTable table;
    table.addresses = {"0xa", "0xb", "0xc", "0xd"};
    table.column_names = {"f"};
    table.x.rows = 4;
    table.x.cols = 1;
    table.x.data = {1.0, 2.0, 3.0, 4.0};

    auto path = dir.file("dist.csv");
    save_distribution_summary(table, path);

    std::ifstream in(path);
    std::string header, row;
    REQUIRE(std::getline(in, header));
    REQUIRE(std::getline(in, row));
    CHECK(header == "feature,min,q1,median,q3,max,mean,std");
    // Linear interpolation: q1 = 1.75, median = 2.5, q3 = 3.25.
    CHECK(row.rfind("f,1,1.75,2.5,3.25,4,2.5,", 0) == 0);
}
