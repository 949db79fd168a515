#pragma once

#include <cmath>
#include <string>

#include "quakeml/errors.hpp"

namespace quakeml {

inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

// A point on the sphere, degrees at the API boundary.
struct GeoPoint {
    double lat = 0.0;  // degrees, [-90, 90]
    double lon = 0.0;  // degrees, [-180, 180]

    bool valid() const {
        return std::isfinite(lat) && std::isfinite(lon) &&
               lat >= -90.0 && lat <= 90.0 && lon >= -180.0 && lon <= 180.0;
    }
};

struct EarthModel {
    double radius_km = kEarthRadiusKm;
};

enum class WaveLabel { primary, secondary };

// Seismic wave speed. All triggers of one detection are assumed to respond
// to the same wave, so speeds come in exactly two flavours.
struct WaveSpeed {
    double v_kms = 7.8;
    WaveLabel label = WaveLabel::primary;

    static WaveSpeed primary(double v = 7.8) { return {v, WaveLabel::primary}; }
    static WaveSpeed secondary(double v = 4.5) { return {v, WaveLabel::secondary}; }
};

inline const char* wave_label_name(WaveLabel l) {
    return l == WaveLabel::primary ? "primary" : "secondary";
}

// Great-circle (haversine) distance in km between two surface points.
// Symmetric, non-negative, bounded by pi * R.
double epicentral_distance(const GeoPoint& a, const GeoPoint& b,
                           const EarthModel& earth = {});

// Chord distance in km between a hypocentre at `depth_km` below the
// epicentre and a surface point at epicentral distance `epi_dist_km`:
//   sqrt(d^2 + 4 R (R - d) sin^2(D / (2R)))
double hypocentral_distance(double epi_dist_km, double depth_km,
                            const EarthModel& earth = {});

// Expected triggering time: hypocentral distance over wave speed plus the
// origin time.
double expected_trigger_time(double hypo_dist_km, const WaveSpeed& v,
                             double t_origin_s);

// Precomputed radian coordinates for the hot distance loops.
struct GeoPointRad {
    double lat_rad;
    double cos_lat;
    double lon_rad;

    explicit GeoPointRad(const GeoPoint& p)
        : lat_rad(deg2rad(p.lat)), cos_lat(std::cos(deg2rad(p.lat))),
          lon_rad(deg2rad(p.lon)) {}
};

// Haversine on prepared operands; no validation, for inner loops.
inline double epicentral_distance_fast(const GeoPointRad& a, const GeoPointRad& b,
                                       double radius_km = kEarthRadiusKm) {
    const double sdlat = std::sin(0.5 * (b.lat_rad - a.lat_rad));
    const double sdlon = std::sin(0.5 * (b.lon_rad - a.lon_rad));
    double h = sdlat * sdlat + a.cos_lat * b.cos_lat * sdlon * sdlon;
    if (h > 1.0) h = 1.0;
    return 2.0 * radius_km * std::asin(std::sqrt(h));
}

}  // namespace quakeml
