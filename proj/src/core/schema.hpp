#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "event.hpp"

namespace sift {

inline constexpr int kTransactionalFeatures = 8;
inline constexpr int kEventStatFeatures = kEventTypeCount * 3;                     // 24
inline constexpr int kFeeStatFeatures = 10;
inline constexpr int kProtocolStatFeatures = kProtocolCount * 4;                   // 92
inline constexpr int kChainStatFeatures = kChainCount * 4;                         // 44
inline constexpr int kWindowedFeatures = kEventTypeCount * kWindowedProtocolCount * 3; // 144
inline constexpr int kTokenFeatures = 100;
inline constexpr int kDefiFeatureCount = kEventStatFeatures + kFeeStatFeatures +
                                         kProtocolStatFeatures + kChainStatFeatures +
                                         kWindowedFeatures + kTokenFeatures;       // 414
inline constexpr int kFeatureCount = kTransactionalFeatures + kDefiFeatureCount;   // 422
inline constexpr int kTopTokens = 99;

inline constexpr const char* kSchemaVersion = "fv1";

// Slots for tokens that small corpora cannot fill; they never match a real
// token and always score 0.
inline constexpr const char* kPadTokenPrefix = "__pad_";

struct GroupSpan {
    int offset = 0;
    int length = 0;
};

struct FeatureSchema {
    std::string version;
    std::vector<std::string> names;                // exactly 422, unique
    std::map<std::string, GroupSpan> group_offsets;
    std::vector<std::string> top_tokens;           // exactly 99

    // token id -> slot 0..98; built at construction, not serialized
    std::unordered_map<std::string, int> token_slots;

    int token_slot(const std::string& token) const {
        auto it = token_slots.find(token);
        return it == token_slots.end() ? kTopTokens : it->second;
    }
};

// Builds the full schema from an ordered top-token list (pads to 99 slots if
// shorter; throws SchemaMismatch if longer).
FeatureSchema make_schema(std::vector<std::string> top_tokens);

// Top 99 tokens by corpus-wide event count, ties broken by lexicographically
// smaller token id. Throws EmptyCorpus.
FeatureSchema derive_token_schema(const std::vector<DecodedEvent>& events);

void validate_schema(const FeatureSchema& schema); // throws SchemaMismatch

void save_schema(const FeatureSchema& schema, const std::string& path);
FeatureSchema load_schema(const std::string& path);

} // namespace sift
