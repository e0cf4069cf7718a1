#include "enums.hpp"

namespace sift {

namespace {

constexpr std::array<std::string_view, kChainCount> kChainNames = {
    "Arbitrum", "Aurora", "Avalanche", "BSC", "Cronos", "Ethereum",
    "Fantom", "Matic", "Moonbeam", "Moonriver", "Optimism",
};

constexpr std::array<std::string_view, kProtocolCount> kProtocolNames = {
    "Aave", "Balancer", "Compound", "Curve", "Lido", "Yearn",
    "0vix", "Apeswapfinance", "Aurigami", "Bastion", "Benqi", "Frax", "Geist",
    "Granary", "Instadapp", "Ironbank", "Moonwell", "Radiant", "Scream", "Strike",
    "Tectonic", "Traderjoe", "Valas",
};

constexpr std::array<std::string_view, kEventTypeCount> kEventTypeNames = {
    "add_liquidity", "remove_liquidity", "borrow", "deposit",
    "liquidation", "repay", "swap", "withdraw",
};

template <typename E, size_t N>
std::optional<E> parse_name(const std::array<std::string_view, N>& names, std::string_view s) {
    for (size_t i = 0; i < N; ++i) {
        if (names[i] == s) return static_cast<E>(i);
    }
    return std::nullopt;
}

} // namespace

const std::array<std::string_view, kChainCount>& chain_names() { return kChainNames; }
const std::array<std::string_view, kProtocolCount>& protocol_names() { return kProtocolNames; }
const std::array<std::string_view, kEventTypeCount>& event_type_names() { return kEventTypeNames; }

std::string_view to_string(Chain c) { return kChainNames[static_cast<size_t>(c)]; }
std::string_view to_string(Protocol p) { return kProtocolNames[static_cast<size_t>(p)]; }
std::string_view to_string(EventType e) { return kEventTypeNames[static_cast<size_t>(e)]; }
std::string_view to_string(Direction d) { return d == Direction::Outgoing ? "outgoing" : "incoming"; }

std::optional<Chain> parse_chain(std::string_view s) { return parse_name<Chain>(kChainNames, s); }
std::optional<Protocol> parse_protocol(std::string_view s) { return parse_name<Protocol>(kProtocolNames, s); }
std::optional<EventType> parse_event_type(std::string_view s) { return parse_name<EventType>(kEventTypeNames, s); }

std::optional<Direction> parse_direction(std::string_view s) {
    if (s == "outgoing") return Direction::Outgoing;
    if (s == "incoming") return Direction::Incoming;
    return std::nullopt;
}

} // namespace sift
