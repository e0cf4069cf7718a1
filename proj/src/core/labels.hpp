#pragma once

#include <map>
#include <string>
#include <vector>

namespace sift {

enum class Label : uint8_t { Good = 0, Malicious = 1 };

struct LabelEntry {
    Label label;
    std::string source;
};

struct LabelRegistry {
    // Ordered by address so iteration is deterministic.
    std::map<std::string, LabelEntry> entries;
    std::vector<std::string> warnings;

    // Malicious wins on conflicting duplicates; the conflict is recorded as a
    // warning. Same-label duplicates keep the first source.
    void add(std::string address, Label label, std::string source);
};

// CSV with header `address,label,source`; label is case-insensitive. The
// source column may contain commas (everything after the second comma).
LabelRegistry load_label_registry(const std::string& path);

void save_label_registry(const LabelRegistry& registry, const std::string& path);

} // namespace sift
