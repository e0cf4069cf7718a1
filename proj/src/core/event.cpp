#include "event.hpp"

#include <algorithm>
#include <unordered_map>

namespace sift {

std::vector<AddressHistory> build_histories(std::vector<DecodedEvent> events) {
    std::unordered_map<std::string, size_t> index;
    std::vector<AddressHistory> histories;
    for (auto& ev : events) {
        auto [it, inserted] = index.try_emplace(ev.address, histories.size());
        if (inserted) {
            histories.push_back(AddressHistory{ev.address, {}});
        }
        histories[it->second].events.push_back(std::move(ev));
    }
    std::sort(histories.begin(), histories.end(),
              [](const AddressHistory& a, const AddressHistory& b) { return a.address < b.address; });
    for (auto& h : histories) {
        std::sort(h.events.begin(), h.events.end(), event_order_less);
    }
    return histories;
}

} // namespace sift
