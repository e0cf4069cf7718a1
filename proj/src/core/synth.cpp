#include "synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "errors.hpp"
#include "rng.hpp"

namespace sift {

namespace {

constexpr std::array<double, kChainCount> kChainWeights = {
    0.09, 0.03, 0.08, 0.12, 0.04, 0.35, 0.06, 0.10, 0.03, 0.03, 0.07,
};

size_t pick_weighted(SplitMix64& rng, const double* weights, size_t n) {
    double total = 0.0;
    for (size_t i = 0; i < n; ++i) total += weights[i];
    double r = rng.next_double() * total;
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i) {
        acc += weights[i];
        if (r < acc) return i;
    }
    return n - 1;
}

std::string hex_of(uint64_t v, int nibbles) {
    static const char* digits = "0123456789abcdef";
    std::string s(static_cast<size_t>(nibbles), '0');
    for (int i = nibbles - 1; i >= 0 && v != 0; --i) {
        s[static_cast<size_t>(i)] = digits[v & 0xF];
        v >>= 4;
    }
    return s;
}

std::string make_address(uint64_t index, SplitMix64& rng) {
    return "0x" + hex_of(index, 8) + hex_of(rng.next_u64(), 16) + hex_of(rng.next_u64(), 16);
}

std::string make_tx_hash(uint64_t addr_index, uint64_t event_index, SplitMix64& rng) {
    return "0x" + hex_of(addr_index, 16) + hex_of(event_index, 16) + hex_of(rng.next_u64(), 16) +
           hex_of(rng.next_u64(), 16);
}

std::string token_name(int index) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "T%03d", index);
    return buf;
}

double lognormal(SplitMix64& rng, double log_median, double sigma) {
    return std::exp(rng.next_normal() * sigma + log_median);
}

Direction direction_for(EventType type, SplitMix64& rng) {
    switch (type) {
        case EventType::AddLiquidity:
        case EventType::Deposit:
        case EventType::Repay:
        case EventType::Liquidation:
            return Direction::Outgoing;
        case EventType::RemoveLiquidity:
        case EventType::Borrow:
        case EventType::Withdraw:
            return Direction::Incoming;
        case EventType::Swap:
            return rng.next_double() < 0.5 ? Direction::Outgoing : Direction::Incoming;
    }
    return Direction::Outgoing;
}

struct TokenSampler {
    std::vector<double> cumulative;

    explicit TokenSampler(int universe) {
        cumulative.resize(static_cast<size_t>(universe));
        double acc = 0.0;
        for (int i = 0; i < universe; ++i) {
            acc += 1.0 / (i + 1.0); // Zipf-like long tail
            cumulative[static_cast<size_t>(i)] = acc;
        }
    }

    int sample(SplitMix64& rng) const {
        double r = rng.next_double() * cumulative.back();
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
        return static_cast<int>(it - cumulative.begin());
    }
};

void generate_address(const SynthConfig& cfg, const TokenSampler& tokens, uint64_t index,
                      bool malicious, std::vector<DecodedEvent>& out) {
    SplitMix64 rng(derive_seed(cfg.seed, index));
    const FraudProfile& prof = cfg.profile;
    const bool fraudulent = malicious && cfg.fraud_profile_on;

    std::string address = make_address(index, rng);
    int n_events = cfg.events_min +
                   static_cast<int>(rng.next_below(static_cast<uint64_t>(cfg.events_max - cfg.events_min + 1)));

    // One primary chain, sometimes a secondary carrying ~20% of events.
    Chain primary = static_cast<Chain>(pick_weighted(rng, kChainWeights.data(), kChainCount));
    bool has_secondary = rng.next_double() < 0.30;
    Chain secondary = primary;
    if (has_secondary) {
        secondary = static_cast<Chain>(rng.next_below(kChainCount));
        if (secondary == primary) has_secondary = false;
    }

    std::vector<Chain> event_chain(static_cast<size_t>(n_events), primary);
    if (has_secondary) {
        for (auto& c : event_chain) {
            if (rng.next_double() < 0.20) c = secondary;
        }
        event_chain[0] = primary; // primary stays dominant for small counts
    }

    // Per-chain spans; block positions inside each span. Malicious activity
    // clusters in bursts, with the span endpoints pinned so max-min matches
    // the benign distribution.
    std::array<uint64_t, kChainCount> span_start{};
    std::array<uint64_t, kChainCount> span_len{};
    std::array<bool, kChainCount> span_init{};
    std::array<std::vector<uint64_t>, kChainCount> burst_centers;
    auto chain_span = [&](Chain c) {
        size_t ci = static_cast<size_t>(c);
        if (!span_init[ci]) {
            span_init[ci] = true;
            span_start[ci] = 1'000'000 + rng.next_below(30'000'000);
            span_len[ci] = 20'000 + rng.next_below(380'000);
            if (fraudulent) {
                int nb = 1 + static_cast<int>(rng.next_below(static_cast<uint64_t>(prof.malicious_bursts_max)));
                for (int b = 0; b < nb; ++b) {
                    burst_centers[ci].push_back(span_start[ci] + rng.next_below(span_len[ci] + 1));
                }
            }
        }
        return ci;
    };

    std::array<int, kChainCount> seen_on_chain{};
    std::vector<uint64_t> heights(static_cast<size_t>(n_events));
    for (int i = 0; i < n_events; ++i) {
        size_t ci = chain_span(event_chain[static_cast<size_t>(i)]);
        uint64_t lo = span_start[ci];
        uint64_t len = span_len[ci];
        uint64_t h;
        if (fraudulent && !burst_centers[ci].empty() && seen_on_chain[ci] >= 2) {
            const auto& centers = burst_centers[ci];
            uint64_t center = centers[rng.next_below(centers.size())];
            uint64_t w = prof.burst_half_width_blocks;
            uint64_t off = rng.next_below(2 * w + 1);
            h = center + off >= w ? center + off - w : 0;
            h = std::clamp<uint64_t>(h, lo, lo + len);
        } else if (seen_on_chain[ci] == 0) {
            h = lo; // pin span start
        } else if (seen_on_chain[ci] == 1) {
            h = lo + len; // pin span end
        } else {
            h = lo + rng.next_below(len + 1);
        }
        seen_on_chain[ci]++;
        heights[static_cast<size_t>(i)] = h;
    }

    // Malicious addresses concentrate on two major protocols and a small token pool.
    std::array<Protocol, 2> focus_protocols = {
        static_cast<Protocol>(rng.next_below(kWindowedProtocolCount)),
        static_cast<Protocol>(rng.next_below(kWindowedProtocolCount)),
    };
    std::vector<int> token_pool;
    for (int t = 0; t < prof.malicious_token_pool; ++t) {
        token_pool.push_back(static_cast<int>(rng.next_below(static_cast<uint64_t>(prof.token_universe))));
    }

    // Benign protocol weights: 60% over the six majors, the rest spread flat.
    std::array<double, kProtocolCount> good_proto_weights{};
    for (int p = 0; p < kProtocolCount; ++p) {
        good_proto_weights[static_cast<size_t>(p)] =
            p < kWindowedProtocolCount ? 0.60 / kWindowedProtocolCount
                                       : 0.40 / (kProtocolCount - kWindowedProtocolCount);
    }

    const auto& mix = fraudulent ? prof.malicious_event_mix : prof.good_event_mix;
    double success_rate = fraudulent ? prof.malicious_success_rate : prof.good_success_rate;

    for (int i = 0; i < n_events; ++i) {
        DecodedEvent ev;
        ev.address = address;
        ev.tx_hash = make_tx_hash(index, static_cast<uint64_t>(i), rng);
        ev.chain = event_chain[static_cast<size_t>(i)];
        ev.block_height = heights[static_cast<size_t>(i)];
        ev.event_type = static_cast<EventType>(pick_weighted(rng, mix.data(), kEventTypeCount));

        if (fraudulent && rng.next_double() < prof.malicious_protocol_focus) {
            ev.protocol = focus_protocols[rng.next_below(2)];
        } else {
            ev.protocol = static_cast<Protocol>(pick_weighted(rng, good_proto_weights.data(), kProtocolCount));
        }

        int token_idx;
        if (fraudulent && rng.next_double() < prof.malicious_token_focus) {
            token_idx = token_pool[rng.next_below(token_pool.size())];
        } else {
            token_idx = tokens.sample(rng);
        }
        ev.token = token_name(token_idx);

        ev.value_usd = lognormal(rng, std::log(300.0), 1.2);
        ev.direction = direction_for(ev.event_type, rng);
        ev.protocol_fee_usd = ev.value_usd * 0.003 * (0.5 + rng.next_double());
        ev.gas_fee_usd = lognormal(rng, std::log(5.0), 0.8);
        ev.success = rng.next_double() < success_rate;
        out.push_back(std::move(ev));
    }
}

} // namespace

SynthCorpus generate_corpus(const SynthConfig& config) {
    if (config.n_good < 0 || config.n_malicious < 0) {
        raise(ErrorKind::InvalidConfig, "address counts must be non-negative");
    }
    if (config.n_good + config.n_malicious == 0) {
        raise(ErrorKind::InvalidConfig, "requested an empty corpus");
    }
    if (config.events_min < 1 || config.events_min > config.events_max) {
        raise(ErrorKind::InvalidConfig, "need 1 <= events_min <= events_max");
    }
    for (double w : config.profile.good_event_mix) {
        if (w < 0.0) raise(ErrorKind::InvalidConfig, "event mix weights must be non-negative");
    }
    for (double w : config.profile.malicious_event_mix) {
        if (w < 0.0) raise(ErrorKind::InvalidConfig, "event mix weights must be non-negative");
    }
    if (config.profile.token_universe < 1 || config.profile.malicious_token_pool < 1) {
        raise(ErrorKind::InvalidConfig, "token universe and pool must be positive");
    }

    SynthCorpus corpus;
    TokenSampler tokens(config.profile.token_universe);
    int64_t total = config.n_good + config.n_malicious;
    for (int64_t i = 0; i < total; ++i) {
        bool malicious = i >= config.n_good;
        size_t first = corpus.events.size();
        generate_address(config, tokens, static_cast<uint64_t>(i), malicious, corpus.events);
        corpus.registry.add(corpus.events[first].address,
                            malicious ? Label::Malicious : Label::Good, "synthetic");
    }
    return corpus;
}

} // namespace sift
