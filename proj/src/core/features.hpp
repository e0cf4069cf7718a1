#pragma once

#include <array>
#include <string>
#include <vector>

#include "event.hpp"
#include "matrix.hpp"
#include "schema.hpp"

namespace sift {

struct FeatureVector {
    std::string address;
    std::vector<double> values; // length 422, ordered per FeatureSchema
    std::string schema_version;
};

// The 8 transactional features, in order: tx count, success share,
// block-height std, wallet age (max-min block), tx count / age, and
// mean/max/std of gas fees. Block statistics use the address's dominant
// chain (most events, ties to the lexicographically smaller chain name)
// since block numbers are incomparable across chains; age 0 makes the rate
// feature equal the tx count. Throws EmptyHistory.
std::array<double, kTransactionalFeatures> transactional_features(const AddressHistory& history);

// The 414 DeFi features in schema order:
//   event_stats | fee_stats | protocol_stats | chain_stats | windowed | tokens
// Windowed counts live on absolute floor(height/1000) windows restricted to
// the union of the address's per-chain active spans; counts on the same
// window index are summed across chains before min/max/std.
std::vector<double> defi_features(const AddressHistory& history, const FeatureSchema& schema);

std::vector<FeatureVector> extract_features(const std::vector<AddressHistory>& histories,
                                            const FeatureSchema& schema);

// Feature matrix CSV: first column `address`, then 422 columns named per the
// schema. Doubles are written in shortest round-trip form.
void save_feature_matrix(const std::vector<FeatureVector>& vectors, const FeatureSchema& schema,
                         const std::string& path);

struct FeatureTable {
    std::vector<std::string> addresses;
    std::vector<std::string> column_names;
    Matrix x;
};

FeatureTable to_feature_table(const std::vector<FeatureVector>& vectors,
                              const FeatureSchema& schema);
void save_feature_table(const FeatureTable& table, const std::string& path);

FeatureTable load_feature_matrix(const std::string& path);

// Tidy per-column distribution summary (min, q1, median, q3, max, mean, std)
// for boxplot-style exports.
void save_distribution_summary(const FeatureTable& table, const std::string& path);

} // namespace sift
