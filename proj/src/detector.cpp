#include "quakeml/detector.hpp"

#include <algorithm>

#include "quakeml/errors.hpp"

namespace quakeml {

StreamingDetector::StreamingDetector(std::span<const Smartphone> roster,
                                     DetectorConfig cfg)
    : cfg_(cfg) {
    if (!(cfg.radius_km > 0.0) || !(cfg.window_s > 0.0) ||
        !(cfg.ratio_threshold > 0.0 && cfg.ratio_threshold <= 1.0) ||
        cfg.min_triggers < 1)
        throw InvalidInput("StreamingDetector: invalid config");
    active_points_.reserve(roster.size());
    for (const auto& p : roster)
        if (p.active) active_points_.emplace_back(p.location);
}

std::optional<Detection> StreamingDetector::push(const Trigger& trigger) {
    if (!first_ && trigger.time_s < last_time_)
        throw InvalidInput("StreamingDetector: trigger stream not sorted by time");
    first_ = false;
    last_time_ = trigger.time_s;

    const double cutoff = trigger.time_s - cfg_.window_s;

    // Evict triggers that left the window; every surviving candidate that
    // counted them gives the count back.
    while (!window_.empty() && window_.front().trigger.time_s < cutoff) {
        const GeoPointRad gone = window_.front().rad;
        window_.pop_front();
        for (auto& e : window_)
            if (epicentral_distance_fast(e.rad, gone) <= cfg_.radius_km)
                --e.count;
    }

    Entry fresh{trigger, GeoPointRad(trigger.location), 1, 0};
    for (auto& e : window_) {
        const double d = epicentral_distance_fast(e.rad, fresh.rad);
        if (d <= cfg_.radius_km) {
            ++e.count;
            ++fresh.count;
        }
    }
    for (const auto& p : active_points_)
        if (epicentral_distance_fast(p, fresh.rad) <= cfg_.radius_km)
            ++fresh.active;
    window_.push_back(fresh);

    // First candidate (earliest anchor, then smallest id) whose area passes
    // the ratio condition.
    const Entry* hit = nullptr;
    for (const auto& e : window_) {
        if (e.count < cfg_.min_triggers || e.active == 0) continue;
        if (static_cast<double>(e.count) <=
            cfg_.ratio_threshold * static_cast<double>(e.active))
            continue;
        if (hit == nullptr ||
            e.trigger.time_s < hit->trigger.time_s ||
            (e.trigger.time_s == hit->trigger.time_s && e.trigger.id < hit->trigger.id))
            hit = &e;
    }
    if (hit == nullptr) return std::nullopt;

    Detection det;
    det.center = hit->trigger.location;
    det.detection_time_s = trigger.time_s;
    det.active_count = hit->active;
    for (const auto& e : window_)
        if (epicentral_distance_fast(e.rad, hit->rad) <= cfg_.radius_km)
            det.triggers.push_back(e.trigger);
    return det;
}

std::optional<Detection> detect(std::span<const Trigger> stream,
                                std::span<const Smartphone> roster,
                                const DetectorConfig& cfg) {
    for (std::size_t i = 1; i < stream.size(); ++i)
        if (stream[i].time_s < stream[i - 1].time_s)
            throw InvalidInput("detect: trigger stream not sorted by time");

    StreamingDetector sd(roster, cfg);
    for (const auto& t : stream)
        if (auto det = sd.push(t)) return det;
    return std::nullopt;
}

}  // namespace quakeml
