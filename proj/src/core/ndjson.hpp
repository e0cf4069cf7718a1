#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "event.hpp"

namespace sift {

// Parses one line of the newline-delimited event format. Throws
// MalformedRecord / UnknownEnumValue / NegativeValue. Unknown extra keys are
// ignored; addresses are lowercased.
DecodedEvent parse_event_record(std::string_view line);

// Single-line JSON with exactly the interchange field names. Doubles use the
// shortest representation that round-trips, so parse(serialize(e)) == e.
std::string serialize_event(const DecodedEvent& event);

struct ReadResult {
    std::vector<DecodedEvent> events;
    uint64_t skipped_unknown = 0; // only populated when skip_unknown is set
};

// Reads a whole event file. With skip_unknown, records whose chain/protocol/
// event_type fall outside the closed universes are counted and dropped
// instead of failing the load. Blank lines are ignored.
ReadResult read_events(const std::string& path, bool skip_unknown = false);

void write_events(const std::vector<DecodedEvent>& events, const std::string& path);

} // namespace sift
