#pragma once

#include <algorithm>
#include <cmath>

#include "ctlnav/core/geometry.hpp"
#include "ctlnav/radiomap/city.hpp"

namespace ctlnav {

// Slab test of segment a->b against the closed box [lo, hi]. Touching a face,
// edge or corner counts as a hit.
inline bool segment_hits_box(const Vec3& a, const Vec3& b, const Vec3& lo, const Vec3& hi)
{
    double t0 = 0.0, t1 = 1.0;
    const double origin[3] = {a.x, a.y, a.z};
    const double dir[3] = {b.x - a.x, b.y - a.y, b.z - a.z};
    const double mins[3] = {lo.x, lo.y, lo.z};
    const double maxs[3] = {hi.x, hi.y, hi.z};
    for (int k = 0; k < 3; ++k) {
        if (dir[k] == 0.0) {
            if (origin[k] < mins[k] || origin[k] > maxs[k])
                return false;
            continue;
        }
        double ta = (mins[k] - origin[k]) / dir[k];
        double tb = (maxs[k] - origin[k]) / dir[k];
        if (ta > tb)
            std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1)
            return false;
    }
    return true;
}

inline bool is_los(const Vec3& uav, const Vec3& bs_antenna, const CityMap& city)
{
    for (const auto& b : city.buildings) {
        const Vec3 lo{b.footprint.x0, b.footprint.y0, 0.0};
        const Vec3 hi{b.footprint.x1, b.footprint.y1, b.height};
        if (segment_hits_box(uav, bs_antenna, lo, hi))
            return false;
    }
    return true;
}

} // namespace ctlnav
