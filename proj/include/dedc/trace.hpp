#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "dedc/diagnostic.hpp"

namespace dedc {

inline constexpr std::uint32_t kDefaultTickMs = 10;

struct PinEvent {
    std::uint32_t time_ms = 0;
    int pin = 0;
    int level = 0;  // 0 or 1
};

/// Scripted environment for a simulation run.
///
///     # comment
///     tick 10
///     pin 2 low
///     at 500 pin 2 high
///     end 2000
struct TraceScript {
    std::uint32_t tick_ms = kDefaultTickMs;
    std::map<int, int> initial_levels;
    std::vector<PinEvent> events;  // sorted by time, file order among equal times
    std::uint32_t end_ms = 0;
};

Checked<TraceScript> parse_trace(std::string_view text);

}  // namespace dedc
