#include "ndjson.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include <json.hpp>

#include "errors.hpp"

namespace sift {

namespace {

using nlohmann::json;

std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

const json& require_field(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        raise(ErrorKind::MalformedRecord, std::string("missing field '") + key + "'");
    }
    return *it;
}

std::string require_string(const json& obj, const char* key) {
    const json& v = require_field(obj, key);
    if (!v.is_string()) {
        raise(ErrorKind::MalformedRecord, std::string("field '") + key + "' must be a string");
    }
    return v.get<std::string>();
}

double require_nonneg_number(const json& obj, const char* key) {
    const json& v = require_field(obj, key);
    if (!v.is_number()) {
        raise(ErrorKind::MalformedRecord, std::string("field '") + key + "' must be a number");
    }
    double d = v.get<double>();
    if (d < 0.0) {
        raise(ErrorKind::NegativeValue, std::string("field '") + key + "' is negative");
    }
    return d;
}

} // namespace

DecodedEvent parse_event_record(std::string_view line) {
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
        raise(ErrorKind::MalformedRecord, "line is not a JSON object");
    }

    DecodedEvent ev;
    ev.tx_hash = require_string(obj, "tx_hash");
    ev.address = lowercase(require_string(obj, "address"));
    if (ev.address.empty()) {
        raise(ErrorKind::MalformedRecord, "address is empty");
    }

    std::string chain = require_string(obj, "chain");
    if (auto c = parse_chain(chain)) {
        ev.chain = *c;
    } else {
        raise(ErrorKind::UnknownEnumValue, "unknown chain '" + chain + "'");
    }
    std::string protocol = require_string(obj, "protocol");
    if (auto p = parse_protocol(protocol)) {
        ev.protocol = *p;
    } else {
        raise(ErrorKind::UnknownEnumValue, "unknown protocol '" + protocol + "'");
    }
    std::string event_type = require_string(obj, "event_type");
    if (auto e = parse_event_type(event_type)) {
        ev.event_type = *e;
    } else {
        raise(ErrorKind::UnknownEnumValue, "unknown event_type '" + event_type + "'");
    }

    ev.token = require_string(obj, "token");
    ev.value_usd = require_nonneg_number(obj, "value_usd");

    std::string direction = require_string(obj, "direction");
    if (auto d = parse_direction(direction)) {
        ev.direction = *d;
    } else {
        raise(ErrorKind::MalformedRecord, "direction must be 'outgoing' or 'incoming'");
    }

    ev.protocol_fee_usd = require_nonneg_number(obj, "protocol_fee_usd");
    ev.gas_fee_usd = require_nonneg_number(obj, "gas_fee_usd");

    const json& bh = require_field(obj, "block_height");
    if (bh.is_number_integer() && bh.get<int64_t>() < 0) {
        raise(ErrorKind::NegativeValue, "field 'block_height' is negative");
    }
    if (!bh.is_number_unsigned() && !bh.is_number_integer()) {
        raise(ErrorKind::MalformedRecord, "field 'block_height' must be an integer");
    }
    ev.block_height = bh.get<uint64_t>();

    const json& success = require_field(obj, "success");
    if (!success.is_boolean()) {
        raise(ErrorKind::MalformedRecord, "field 'success' must be a boolean");
    }
    ev.success = success.get<bool>();

    return ev;
}

std::string serialize_event(const DecodedEvent& event) {
    json obj;
    obj["tx_hash"] = event.tx_hash;
    obj["address"] = event.address;
    obj["chain"] = to_string(event.chain);
    obj["protocol"] = to_string(event.protocol);
    obj["event_type"] = to_string(event.event_type);
    obj["token"] = event.token;
    obj["value_usd"] = event.value_usd;
    obj["direction"] = to_string(event.direction);
    obj["protocol_fee_usd"] = event.protocol_fee_usd;
    obj["gas_fee_usd"] = event.gas_fee_usd;
    obj["block_height"] = event.block_height;
    obj["success"] = event.success;
    return obj.dump();
}

ReadResult read_events(const std::string& path, bool skip_unknown) {
    std::ifstream in(path);
    if (!in) {
        raise(ErrorKind::Io, "cannot open event file '" + path + "'");
    }
    ReadResult result;
    std::string line;
    uint64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            result.events.push_back(parse_event_record(line));
        } catch (const Error& e) {
            if (skip_unknown && e.kind() == ErrorKind::UnknownEnumValue) {
                ++result.skipped_unknown;
                continue;
            }
            raise(e.kind(), path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return result;
}

void write_events(const std::vector<DecodedEvent>& events, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        raise(ErrorKind::Io, "cannot open '" + path + "' for writing");
    }
    for (const auto& ev : events) {
        out << serialize_event(ev) << '\n';
    }
    if (!out) {
        raise(ErrorKind::Io, "failed writing '" + path + "'");
    }
}

} // namespace sift
