#pragma once

#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quakeml/estimation.hpp"
#include "quakeml/geo.hpp"

namespace quakeml {

struct Smartphone {
    std::string id;
    GeoPoint location;
    bool active = true;
};

struct DetectorConfig {
    double radius_km = 30.0;
    double window_s = 10.0;
    double ratio_threshold = 0.25;  // triggers / active within the area
    std::size_t min_triggers = 4;   // keeps df = n - 3 >= 1 downstream
};

struct Detection {
    GeoPoint center;
    double detection_time_s = 0.0;
    std::vector<Trigger> triggers;  // concurring sub-list, time order
    std::size_t active_count = 0;
};

// Incremental detector: one writer feeds triggers in non-decreasing time
// order; the sliding window and per-candidate counts are maintained as
// triggers arrive. Candidate area centers are the triggering smartphones'
// locations currently in the window.
class StreamingDetector {
public:
    StreamingDetector(std::span<const Smartphone> roster, DetectorConfig cfg);

    // Feed the next trigger; returns a detection the first time the ratio
    // condition is met. Throws InvalidInput on out-of-order times.
    std::optional<Detection> push(const Trigger& trigger);

    std::size_t window_size() const { return window_.size(); }

private:
    struct Entry {
        Trigger trigger;
        GeoPointRad rad;
        std::size_t count = 0;   // triggers in window within radius of this anchor
        std::size_t active = 0;  // active roster phones within radius
    };

    DetectorConfig cfg_;
    std::vector<GeoPointRad> active_points_;
    std::deque<Entry> window_;
    double last_time_ = -std::numeric_limits<double>::infinity();
    bool first_ = true;
};

// Batch replay over a time-sorted stream; returns the first detection, or
// nullopt when the stream ends without one. Behavioural reference for the
// streaming wrapper.
std::optional<Detection> detect(std::span<const Trigger> stream,
                                std::span<const Smartphone> roster,
                                const DetectorConfig& cfg);

}  // namespace quakeml
