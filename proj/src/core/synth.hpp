#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "event.hpp"
#include "labels.hpp"

namespace sift {

// Distributional knobs separating malicious addresses from benign ones. The
// signal is spread over the event-type mix, per-window burstiness, protocol
// focus, and token concentration rather than any single flag feature, so a
// classifier has to aggregate evidence. Wallet age, event counts, gas costs
// and success rates are kept close between classes on purpose.
struct FraudProfile {
    // Event-type weights in enum order: add_liquidity, remove_liquidity,
    // borrow, deposit, liquidation, repay, swap, withdraw.
    std::array<double, kEventTypeCount> good_event_mix{0.10, 0.08, 0.07, 0.28,
                                                       0.01, 0.06, 0.30, 0.10};
    std::array<double, kEventTypeCount> malicious_event_mix{0.02, 0.03, 0.14, 0.10,
                                                            0.22, 0.04, 0.15, 0.30};
    // Minimum gap between the classes' mean liquidation-event share that the
    // profile guarantees at default scale (the mix gap above is 0.21; the
    // margin leaves room for sampling noise).
    double liquidation_share_margin = 0.15;

    double good_success_rate = 0.97;
    double malicious_success_rate = 0.92;

    // Malicious activity lands in a few tight bursts instead of spreading
    // over the wallet's span; endpoints are pinned so age stays comparable.
    int malicious_bursts_max = 3;
    uint64_t burst_half_width_blocks = 800;

    // Share of malicious events routed to the address's two focus protocols
    // (drawn from the six majors).
    double malicious_protocol_focus = 0.80;

    int token_universe = 150;
    int malicious_token_pool = 3;
    double malicious_token_focus = 0.85;
};

struct SynthConfig {
    uint64_t seed = 0;
    int64_t n_good = 0;
    int64_t n_malicious = 0;
    int events_min = 4;
    int events_max = 60;
    bool fraud_profile_on = true;
    FraudProfile profile;
};

struct SynthCorpus {
    std::vector<DecodedEvent> events;
    LabelRegistry registry;
};

// Deterministic under config.seed: identical config produces bit-identical
// events and registry. Per-address streams are derived from (seed, index), so
// output is independent of generation order. Throws InvalidConfig.
SynthCorpus generate_corpus(const SynthConfig& config);

} // namespace sift
