#include "dedc/trace.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <string>

namespace dedc {

namespace {

std::optional<std::uint32_t> parse_uint(const std::string& s) {
    std::uint32_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<int> parse_level(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "high" || s == "1") return 1;
    if (s == "low" || s == "0") return 0;
    return std::nullopt;
}

}  // namespace

Checked<TraceScript> parse_trace(std::string_view text) {
    Checked<TraceScript> result;
    TraceScript script;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    bool saw_tick = false, saw_end = false;
    auto fail = [&](const std::string& msg) { result.diagnostics.push_back(Diagnostic::error({line_no, 1}, msg)); };

    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream words(line);
        std::vector<std::string> w;
        for (std::string s; words >> s;) w.push_back(s);
        if (w.empty()) continue;

        if (w[0] == "tick" && w.size() == 2) {
            auto v = parse_uint(w[1]);
            if (!v || *v == 0) {
                fail("tick must be a positive number of milliseconds");
            } else if (saw_tick) {
                fail("tick given more than once");
            } else {
                script.tick_ms = *v;
                saw_tick = true;
            }
        } else if (w[0] == "end" && w.size() == 2) {
            auto v = parse_uint(w[1]);
            if (!v) {
                fail("end must be a number of milliseconds");
            } else if (saw_end) {
                fail("end given more than once");
            } else {
                script.end_ms = *v;
                saw_end = true;
            }
        } else if (w[0] == "pin" && w.size() == 3) {
            auto pin = parse_uint(w[1]);
            auto level = parse_level(w[2]);
            if (!pin || !level) {
                fail("expected `pin <n> high|low`");
            } else {
                script.initial_levels[static_cast<int>(*pin)] = *level;
            }
        } else if (w[0] == "at" && w.size() == 5 && w[2] == "pin") {
            auto t = parse_uint(w[1]);
            auto pin = parse_uint(w[3]);
            auto level = parse_level(w[4]);
            if (!t || !pin || !level) {
                fail("expected `at <ms> pin <n> high|low`");
            } else {
                script.events.push_back({*t, static_cast<int>(*pin), *level});
            }
        } else {
            fail("unrecognized trace line: " + line);
        }
    }
    std::stable_sort(script.events.begin(), script.events.end(),
                     [](const PinEvent& a, const PinEvent& b) { return a.time_ms < b.time_ms; });
    result.value = std::move(script);
    return result;
}

}  // namespace dedc
