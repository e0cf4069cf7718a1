#pragma once

#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

#include "enums.hpp"

namespace sift {

// One decoded DeFi interaction as seen from the acting wallet.
struct DecodedEvent {
    std::string tx_hash;
    std::string address; // lowercased
    Chain chain = Chain::Ethereum;
    Protocol protocol = Protocol::Aave;
    EventType event_type = EventType::Deposit;
    std::string token;
    double value_usd = 0.0;
    Direction direction = Direction::Outgoing;
    double protocol_fee_usd = 0.0;
    double gas_fee_usd = 0.0;
    uint64_t block_height = 0;
    bool success = true;

    friend bool operator==(const DecodedEvent&, const DecodedEvent&) = default;
};

// Per-chain ordering with tx_hash as the deterministic tie-break.
inline bool event_order_less(const DecodedEvent& a, const DecodedEvent& b) {
    return std::tie(a.chain, a.block_height, a.tx_hash) <
           std::tie(b.chain, b.block_height, b.tx_hash);
}

struct AddressHistory {
    std::string address;
    std::vector<DecodedEvent> events; // sorted by (chain, block_height, tx_hash)
};

// Groups events per address. Output histories sorted by address; each history
// holds the sort invariant. Permutation-invariant in the input.
std::vector<AddressHistory> build_histories(std::vector<DecodedEvent> events);

} // namespace sift
