#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace aoifleet {

// One line of the run's event log. Payload keys are event-specific; the
// serialized form sorts keys, so logs are byte-stable for identical runs.
struct Event {
    double t = 0.0;
    std::string kind;
    std::int64_t subject = -1;
    nlohmann::json payload = nlohmann::json::object();

    std::string to_line() const {
        nlohmann::json j = payload;
        j["t"] = t;
        j["kind"] = kind;
        j["subject"] = subject;
        return j.dump();
    }
};

inline std::string serialize_events(const std::vector<Event>& events) {
    std::string out;
    for (const Event& e : events) {
        out += e.to_line();
        out += '\n';
    }
    return out;
}

}  // namespace aoifleet
