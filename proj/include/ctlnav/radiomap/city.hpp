#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ctlnav/core/errors.hpp"
#include "ctlnav/core/geometry.hpp"

namespace ctlnav {

enum class EnvId { env1 = 1, env2 = 2, env3 = 3 };

inline std::string to_string(EnvId id) { return "env" + std::to_string(static_cast<int>(id)); }

inline EnvId env_id_from_string(const std::string& s)
{
    if (s == "env1") return EnvId::env1;
    if (s == "env2") return EnvId::env2;
    if (s == "env3") return EnvId::env3;
    throw ParseError("unknown environment id '" + s + "'");
}

// Three-sector macro site. A tx_power of zero marks a failed station: it
// neither serves nor interferes.
struct BaseStation {
    Vec2 position;
    double height = 20.0;                          // antenna height above ground, m
    double tx_power_w = 40.0;                      // per sector
    std::array<double, 3> sector_azimuth_deg{0.0, 120.0, 240.0};
    double downtilt_deg = 10.0;

    Vec3 antenna() const { return {position.x, position.y, height}; }
    bool active() const { return tx_power_w > 0.0; }
};

struct Building {
    Rect footprint;
    double height = 0.0;
};

struct CityMap {
    double extent_x = 2000.0;
    double extent_y = 2000.0;
    std::vector<Building> buildings;
    std::vector<BaseStation> base_stations;
    EnvId env_id = EnvId::env1;
    std::uint64_t seed = 0;

    Rect bounds() const { return {0.0, 0.0, extent_x, extent_y}; }

    double max_building_height() const
    {
        double h = 0.0;
        for (const auto& b : buildings)
            h = std::max(h, b.height);
        return h;
    }
};

inline void validate(const BaseStation& bs)
{
    if (!(bs.tx_power_w >= 0.0) || !std::isfinite(bs.tx_power_w))
        throw DomainError("base station tx power must be finite and non-negative");
    if (bs.height < 5.0 || bs.height > 25.0)
        throw DomainError("base station height must lie in [5, 25] m");
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j) {
            double a = std::fmod(bs.sector_azimuth_deg[i], 360.0);
            double b = std::fmod(bs.sector_azimuth_deg[j], 360.0);
            if (a < 0) a += 360.0;
            if (b < 0) b += 360.0;
            if (a == b)
                throw DomainError("sector azimuths must be distinct modulo 360");
        }
}

// Checks the city-level invariants; flight_altitude is the height every
// building must stay below.
inline void validate(const CityMap& city, double flight_altitude)
{
    if (!(city.extent_x > 0.0) || !(city.extent_y > 0.0))
        throw DomainError("city extent must be positive");
    const Rect bounds = city.bounds();
    for (const auto& b : city.buildings) {
        const auto& f = b.footprint;
        if (f.x0 < bounds.x0 || f.y0 < bounds.y0 || f.x1 > bounds.x1 || f.y1 > bounds.y1 || f.x0 >= f.x1 ||
            f.y0 >= f.y1)
            throw DomainError("building footprint outside map bounds or degenerate");
        if (!(b.height > 0.0) || !(b.height < flight_altitude))
            throw DomainError("building height must lie in (0, flight altitude)");
    }
    for (const auto& bs : city.base_stations) {
        validate(bs);
        if (!bounds.contains(bs.position))
            throw DomainError("base station outside map bounds");
    }
}

} // namespace ctlnav
