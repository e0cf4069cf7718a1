#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace sift {

// Closed universes. Feature layout depends on these counts and orders;
// changing either is a schema version change.

enum class Chain : uint8_t {
    Arbitrum, Aurora, Avalanche, Bsc, Cronos, Ethereum,
    Fantom, Matic, Moonbeam, Moonriver, Optimism,
};
inline constexpr int kChainCount = 11;

// Six major protocols first (the windowed-feature set), then the long tail.
enum class Protocol : uint8_t {
    Aave, Balancer, Compound, Curve, Lido, Yearn,
    ZeroVix, Apeswapfinance, Aurigami, Bastion, Benqi, Frax, Geist,
    Granary, Instadapp, Ironbank, Moonwell, Radiant, Scream, Strike,
    Tectonic, Traderjoe, Valas,
};
inline constexpr int kProtocolCount = 23;
inline constexpr int kWindowedProtocolCount = 6;

enum class EventType : uint8_t {
    AddLiquidity, RemoveLiquidity, Borrow, Deposit,
    Liquidation, Repay, Swap, Withdraw,
};
inline constexpr int kEventTypeCount = 8;

enum class Direction : uint8_t { Outgoing, Incoming };

const std::array<std::string_view, kChainCount>& chain_names();
const std::array<std::string_view, kProtocolCount>& protocol_names();
const std::array<std::string_view, kEventTypeCount>& event_type_names();

std::string_view to_string(Chain c);
std::string_view to_string(Protocol p);
std::string_view to_string(EventType e);
std::string_view to_string(Direction d);

std::optional<Chain> parse_chain(std::string_view s);
std::optional<Protocol> parse_protocol(std::string_view s);
std::optional<EventType> parse_event_type(std::string_view s);
std::optional<Direction> parse_direction(std::string_view s);

} // namespace sift
