#pragma once

#include <cmath>
#include <limits>
#include <numbers>

namespace ctlnav {

// All dB <-> linear conversions go through these two functions.
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double linear)
{
    if (linear <= 0.0)
        return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(linear);
}

inline double watts_to_dbm(double watts) { return linear_to_db(watts) + 30.0; }

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

// Wraps an angle in degrees to [-180, 180).
inline double wrap_degrees(double deg)
{
    double w = std::fmod(deg + 180.0, 360.0);
    if (w < 0.0)
        w += 360.0;
    return w - 180.0;
}

} // namespace ctlnav
