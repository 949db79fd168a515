#include "quakeml/geo.hpp"

#include <cmath>

namespace quakeml {

double epicentral_distance(const GeoPoint& a, const GeoPoint& b,
                           const EarthModel& earth) {
    if (!a.valid() || !b.valid())
        throw InvalidInput("epicentral_distance: coordinates out of range or non-finite");
    if (earth.radius_km <= 0.0)
        throw InvalidInput("epicentral_distance: earth radius must be positive");

    const double lat1 = deg2rad(a.lat);
    const double lat2 = deg2rad(b.lat);
    const double sdlat = std::sin(0.5 * (lat2 - lat1));
    const double sdlon = std::sin(0.5 * deg2rad(b.lon - a.lon));

    double h = sdlat * sdlat + std::cos(lat1) * std::cos(lat2) * sdlon * sdlon;
    if (h > 1.0) h = 1.0;  // guard rounding at the antipode
    return 2.0 * earth.radius_km * std::asin(std::sqrt(h));
}

double hypocentral_distance(double epi_dist_km, double depth_km,
                            const EarthModel& earth) {
    const double r = earth.radius_km;
    if (!(std::isfinite(epi_dist_km) && std::isfinite(depth_km)))
        throw InvalidInput("hypocentral_distance: non-finite input");
    if (epi_dist_km < 0.0 || epi_dist_km > kPi * r)
        throw InvalidInput("hypocentral_distance: epicentral distance outside [0, pi*R]");
    if (depth_km < 0.0 || depth_km >= r)
        throw InvalidInput("hypocentral_distance: depth outside [0, R)");

    const double s = std::sin(epi_dist_km / (2.0 * r));
    return std::sqrt(depth_km * depth_km + 4.0 * r * (r - depth_km) * s * s);
}

double expected_trigger_time(double hypo_dist_km, const WaveSpeed& v,
                             double t_origin_s) {
    if (!(hypo_dist_km >= 0.0))
        throw InvalidInput("expected_trigger_time: negative distance");
    if (!(v.v_kms > 0.0))
        throw InvalidInput("expected_trigger_time: wave speed must be positive");
    return hypo_dist_km / v.v_kms + t_origin_s;
}

}  // namespace quakeml
