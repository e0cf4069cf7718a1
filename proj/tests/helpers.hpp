#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "core/event.hpp"

namespace sift::testing {

// Self-cleaning scratch directory for file round-trip tests.
struct TempDir {
    std::filesystem::path path;

    TempDir() {
        auto base = std::filesystem::temp_directory_path();
        std::random_device rd;
        path = base / ("chainsift_test_" + std::to_string(rd()) + "_" + std::to_string(rd()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path / name).string(); }
};

struct EventSpec {
    std::string address = "0xabc";
    Chain chain = Chain::Ethereum;
    Protocol protocol = Protocol::Aave;
    EventType event_type = EventType::Deposit;
    std::string token = "T000";
    uint64_t block_height = 1000;
    std::string tx_hash = "0x01";
    double value_usd = 100.0;
    double gas_fee_usd = 1.0;
    double protocol_fee_usd = 0.1;
    Direction direction = Direction::Outgoing;
    bool success = true;
};

inline DecodedEvent make_event(const EventSpec& s) {
    DecodedEvent e;
    e.address = s.address;
    e.chain = s.chain;
    e.protocol = s.protocol;
    e.event_type = s.event_type;
    e.token = s.token;
    e.block_height = s.block_height;
    e.tx_hash = s.tx_hash;
    e.value_usd = s.value_usd;
    e.gas_fee_usd = s.gas_fee_usd;
    e.protocol_fee_usd = s.protocol_fee_usd;
    e.direction = s.direction;
    e.success = s.success;
    return e;
}

} // namespace sift::testing
