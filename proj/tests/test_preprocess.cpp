#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <vector>

#include "core/dataset.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"
#include "core/smote.hpp"
#include "helpers.hpp"

using namespace sift;
using sift::testing::TempDir;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Matrix make_matrix(int rows, int cols, std::vector<double> data) {
    Matrix m;
    m.rows = rows;
    m.cols = cols;
    m.data = std::move(data);
    return m;
}

FeatureTable small_table() {
    FeatureTable table;
    table.addresses = {"0xa", "0xb", "0xc", "0xd", "0xe"};
    table.column_names = {"f0", "f1"};
    table.x = make_matrix(5, 2,
                          {
                              1.0, 10.0, //
                              2.0, 20.0, //
                              3.0, 30.0, //
                              4.0, 40.0, //
                              5.0, 50.0, //
                          });
    return table;
}

LabelRegistry small_registry() {
    LabelRegistry reg;
    reg.add("0xa", Label::Good, "s");
    reg.add("0xb", Label::Good, "s");
    reg.add("0xc", Label::Good, "s");
    reg.add("0xd", Label::Malicious, "s");
    reg.add("0xe", Label::Malicious, "s");
    return reg;
}

} // namespace

TEST_CASE("assemble joins labels with feature rows in address order") {
    auto ds = assemble(small_table(), small_registry(), 100, 1);
    CHECK(ds.addresses == std::vector<std::string>{"0xa", "0xb", "0xc", "0xd", "0xe"});
    CHECK(ds.labels == std::vector<int>{0, 0, 0, 1, 1});
    CHECK(ds.x.rows == 5);
    CHECK(ds.x.cols == 2);
    CHECK(ds.x.at(3, 0) == 4.0);
    CHECK(ds.schema_version == std::string(kSchemaVersion));
    CHECK(ds.column_names == std::vector<std::string>{"f0", "f1"});
}

TEST_CASE("assemble samples good rows deterministically") {
    auto a = assemble(small_table(), small_registry(), 2, 7);
    CHECK(a.x.rows == 4); // 2 sampled good + 2 malicious
    CHECK(std::count(a.labels.begin(), a.labels.end(), 0) == 2);
    CHECK(std::count(a.labels.begin(), a.labels.end(), 1) == 2);
    CHECK(std::is_sorted(a.addresses.begin(), a.addresses.end()));

    auto b = assemble(small_table(), small_registry(), 2, 7);
    CHECK(a.addresses == b.addresses);
    CHECK(a.x.data == b.x.data);

    auto c = assemble(small_table(), small_registry(), 2, 8);
    CHECK(a.addresses != c.addresses); // different seed picks another sample
}

TEST_CASE("assemble warns on labels without rows and requires malicious ones") {
    auto registry = small_registry();
    registry.add("0xff", Label::Good, "s"); // no feature row
    std::vector<std::string> warnings;
    auto ds = assemble(small_table(), registry, 100, 1, &warnings);
    CHECK(ds.x.rows == 5);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("0xff") != std::string::npos);

    LabelRegistry good_only;
    good_only.add("0xa", Label::Good, "s");
    try {
        (void)assemble(small_table(), good_only, 100, 1);
        FAIL("expected NoMaliciousRows");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::NoMaliciousRows);
    }
}

TEST_CASE("imputation uses per-column training medians") {
    auto x = make_matrix(4, 2,
                         {
                             1.0, kNaN, //
                             kNaN, 4.0, //
                             3.0, 8.0,  //
                             5.0, kNaN, //
                         });
    auto stats = fit_impute(x);
    // Medians over present values: {1,3,5} -> 3; {4,8} -> 6.
    CHECK(stats.medians == std::vector<double>{3.0, 6.0});

    apply_impute(x, stats);
    CHECK(x.at(1, 0) == 3.0);
    CHECK(x.at(0, 1) == 6.0);
    CHECK(x.at(3, 1) == 6.0);
    CHECK(x.at(0, 0) == 1.0);

    auto all_nan = make_matrix(2, 1, {kNaN, kNaN});
    CHECK(fit_impute(all_nan).medians == std::vector<double>{0.0});
}

TEST_CASE("variance filter drops constant columns") {
    auto x = make_matrix(3, 4,
                         {
                             1.0, 7.0, 2.0, 0.0, //
                             2.0, 7.0, 2.0, 0.0, //
                             3.0, 7.0, 5.0, 0.0, //
                         });
    auto kept = fit_nonzero_variance_columns(x);
    CHECK(kept == std::vector<int>{0, 2});

    auto filtered = select_columns(x, kept);
    CHECK(filtered.rows == 3);
    CHECK(filtered.cols == 2);
    CHECK(filtered.at(2, 1) == 5.0);

    auto constant = make_matrix(2, 2, {1.0, 2.0, 1.0, 2.0});
    try {
        (void)fit_nonzero_variance_columns(constant);
        FAIL("expected AllColumnsDropped");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::AllColumnsDropped);
    }
}

TEST_CASE("zscore standardizes with population std") {
    auto x = make_matrix(2, 2,
                         {
                             2.0, 5.0, //
                             4.0, 5.0, //
                         });
    auto stats = fit_zscore(x);
    CHECK(stats.mean == std::vector<double>{3.0, 5.0});
    CHECK(stats.std == std::vector<double>{1.0, 0.0});

    apply_zscore(x, stats);
    CHECK(x.at(0, 0) == -1.0);
    CHECK(x.at(1, 0) == 1.0);
    CHECK(x.at(0, 1) == 0.0); // zero-variance column maps to zeros
    CHECK(x.at(1, 1) == 0.0);

    auto other = make_matrix(1, 1, {9.0});
    CHECK_THROWS_AS(apply_zscore(other, stats), Error); // dimension mismatch
}

TEST_CASE("correlation matrix matches the reference computation") {
    // Third column anti-correlates, fourth is constant.
    auto x = make_matrix(4, 4,
                         {
                             1.0, 2.0, 10.0, 5.0, //
                             2.0, 4.0, 8.0, 5.0,  //
                             3.0, 6.0, 6.0, 5.0,  //
                             4.0, 8.0, 1.0, 5.0,  //
                         });
    auto corr = correlation_matrix(x);
    REQUIRE(corr.rows == 4);
    REQUIRE(corr.cols == 4);

    for (int j = 0; j < 4; ++j) CHECK(corr.at(j, j) == 1.0);
    CHECK(corr.at(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(corr.at(0, 2) == doctest::Approx(-0.9693630921740696).epsilon(1e-12));
    CHECK(corr.at(1, 2) == doctest::Approx(-0.9693630921740696).epsilon(1e-12));
    CHECK(corr.at(0, 3) == 0.0); // zero-variance pairs are defined as 0
    CHECK(corr.at(3, 0) == 0.0);
    CHECK(corr.at(2, 1) == corr.at(1, 2)); // symmetry

    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            CHECK(corr.at(i, j) >= -1.0);
            CHECK(corr.at(i, j) <= 1.0);
        }
    }

    auto one_row = make_matrix(1, 2, {1.0, 2.0});
    try {
        (void)correlation_matrix(one_row);
        FAIL("expected TooFewRows");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::TooFewRows);
    }
}

TEST_CASE("correlation csv export") {
    TempDir dir;
    auto x = make_matrix(3, 2, {1.0, 1.0, 2.0, 2.0, 3.0, 3.0});
    auto corr = correlation_matrix(x);
    auto path = dir.file("corr.csv");
    save_correlation_csv(corr, {"a", "b"}, path);

    std::ifstream in(path);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "feature,a,b");
    REQUIRE(std::getline(in, line));
    CHECK(line == "a,1,1");
}

TEST_CASE("smote interpolates along minority segments") {
    // Minority class 1 on a line; every synthetic point must sit between a
    // base point and one of its k nearest minority neighbors.
    Matrix x = make_matrix(8, 2,
                           {
                               0.0, 0.0,   //
                               10.0, 0.0,  //
                               20.0, 0.0,  //
                               30.0, 0.0,  //
                               40.0, 0.0,  //
                               1.0, 1.0,   //
                               2.0, 2.0,   //
                               3.0, 3.0,   //
                           });
    std::vector<int> labels{0, 0, 0, 0, 0, 1, 1, 1};

    SmoteConfig config;
    config.k_neighbors = 2;
    config.target_ratio = 1.0;
    config.seed = 5;
    auto result = smote(x, labels, config);

    CHECK(result.minority_label == 1);
    CHECK(result.synthetic_count == 2); // floor(1.0*5) - 3
    REQUIRE(result.x.rows == 10);
    REQUIRE(result.labels.size() == 10);

    // Originals are preserved verbatim, synthetics appended with the
    // minority label.
    for (int i = 0; i < 8; ++i) {
        CHECK(result.labels[static_cast<size_t>(i)] == labels[static_cast<size_t>(i)]);
        for (int j = 0; j < 2; ++j) CHECK(result.x.at(i, j) == x.at(i, j));
    }
    for (int i = 8; i < 10; ++i) {
        CHECK(result.labels[static_cast<size_t>(i)] == 1);
        // All minority points sit on the y=x diagonal between 1 and 3, so any
        // valid interpolation does too.
        double a = result.x.at(i, 0), b = result.x.at(i, 1);
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
        CHECK(a >= 1.0);
        CHECK(a <= 3.0);
    }
}

TEST_CASE("smote draw-by-draw reconstruction") {
    // Replays the generator's documented draw order: base row, neighbor
    // pick, then delta.
    Matrix x = make_matrix(6, 3,
                           {
                               0.0, 0.0, 0.0,    //
                               50.0, 50.0, 50.0, //
                               60.0, 40.0, 55.0, //
                               1.0, 2.0, 3.0,    //
                               2.0, 3.0, 4.0,    //
                               9.0, 9.0, 9.0,    //
                           });
    std::vector<int> labels{0, 0, 0, 1, 1, 1};
    SmoteConfig config;
    config.k_neighbors = 5; // clamps to n_min - 1 = 2
    config.target_ratio = 1.0;
    config.seed = 99;

    auto result = smote(x, labels, config);
    CHECK(result.synthetic_count == 0); // already balanced: floor(3) - 3

    config.target_ratio = 0.99; // floor(2.97)=2 -> no growth either
    auto same = smote(x, labels, config);
    CHECK(same.synthetic_count == 0);

    // Force growth by lowering the minority count.
    std::vector<int> fewer{0, 0, 0, 1, 1, 0};
    auto grown = smote(x, fewer, config);
    CHECK(grown.synthetic_count == 1); // floor(0.99*4)=3 minus 2
    REQUIRE(grown.x.rows == 7);

    std::vector<int> minority_rows{3, 4};
    SplitMix64 rng(99);
    uint64_t base_pick = rng.next_below(2);
    uint64_t neighbor_pick = rng.next_below(1); // k_eff = 1
    double delta = rng.next_double();
    CHECK(neighbor_pick == 0);
    int base = minority_rows[static_cast<size_t>(base_pick)];
    int other = minority_rows[1 - static_cast<size_t>(base_pick)];
    for (int j = 0; j < 3; ++j) {
        double expected = x.at(base, j) + delta * (x.at(other, j) - x.at(base, j));
        CHECK(grown.x.at(6, j) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("smote respects the configured ratio") {
    SplitMix64 seeder(1234);
    Matrix x = make_matrix(40, 4, std::vector<double>(160, 0.0));
    for (double& v : x.data) v = seeder.next_double() * 10.0;
    std::vector<int> labels(40, 0);
    for (int i = 0; i < 6; ++i) labels[static_cast<size_t>(i)] = 1;

    for (double ratio : {0.25, 0.5, 1.0}) {
        SmoteConfig config;
        config.k_neighbors = 3;
        config.target_ratio = ratio;
        config.seed = 7;
        auto result = smote(x, labels, config);
        int expected = static_cast<int>(ratio * 34) - 6;
        if (expected < 0) expected = 0;
        CHECK(result.synthetic_count == expected);
        CHECK(result.x.rows == 40 + expected);

        int minority_after = 0;
        for (int label : result.labels) minority_after += label;
        CHECK(minority_after == 6 + expected);
    }
}

TEST_CASE("smote picks class 1 on ties and validates config") {
    Matrix x = make_matrix(4, 1, {0.0, 1.0, 10.0, 11.0});
    std::vector<int> tied{0, 0, 1, 1};
    SmoteConfig config;
    config.seed = 3;
    auto result = smote(x, tied, config);
    CHECK(result.minority_label == 1);

    std::vector<int> tiny{0, 0, 0, 1};
    try {
        (void)smote(x, tiny, config);
        FAIL("expected MinorityTooSmall");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::MinorityTooSmall);
    }

    SmoteConfig bad_k;
    bad_k.k_neighbors = 0;
    CHECK_THROWS_AS((void)smote(x, tied, bad_k), Error);
    SmoteConfig bad_ratio;
    bad_ratio.target_ratio = 1.5;
    CHECK_THROWS_AS((void)smote(x, tied, bad_ratio), Error);
    SmoteConfig zero_ratio;
    zero_ratio.target_ratio = 0.0;
    CHECK_THROWS_AS((void)smote(x, tied, zero_ratio), Error);
}

TEST_CASE("smote synthetics stay inside the minority bounding box") {
    SplitMix64 seeder(777);
    Matrix x = make_matrix(60, 5, std::vector<double>(300, 0.0));
    for (double& v : x.data) v = seeder.next_double() * 100.0 - 50.0;
    std::vector<int> labels(60, 0);
    for (int i = 0; i < 9; ++i) labels[static_cast<size_t>(i * 6)] = 1;

    SmoteConfig config;
    config.k_neighbors = 4;
    config.target_ratio = 0.8;
    config.seed = 21;
    auto result = smote(x, labels, config);
    REQUIRE(result.synthetic_count > 0);

    std::vector<double> lo(5, 1e300), hi(5, -1e300);
    for (int i = 0; i < 60; ++i) {
        if (labels[static_cast<size_t>(i)] != 1) continue;
        for (int j = 0; j < 5; ++j) {
            lo[static_cast<size_t>(j)] = std::min(lo[static_cast<size_t>(j)], x.at(i, j));
            hi[static_cast<size_t>(j)] = std::max(hi[static_cast<size_t>(j)], x.at(i, j));
        }
    }
    for (int i = 60; i < result.x.rows; ++i) {
        for (int j = 0; j < 5; ++j) {
            CHECK(result.x.at(i, j) >= lo[static_cast<size_t>(j)] - 1e-9);
            CHECK(result.x.at(i, j) <= hi[static_cast<size_t>(j)] + 1e-9);
        }
    }

    // Determinism: same config, same synthetics.
    auto again = smote(x, labels, config);
    CHECK(again.x.data == result.x.data);
}

TEST_CASE("smote neighbor lists are exact k nearest with index ties") {
    Matrix minority = make_matrix(4, 1, {0.0, 1.0, 2.0, 3.0});
    auto lists = minority_neighbor_lists(minority, 2);
    REQUIRE(lists.size() == 4);
    CHECK(lists[0] == std::vector<int>{1, 2});
    // Row 1 is equidistant from rows 0 and 2; the smaller index wins.
    CHECK(lists[1] == std::vector<int>{0, 2});
    CHECK(lists[2] == std::vector<int>{1, 3});
    CHECK(lists[3] == std::vector<int>{2, 1});
}
