#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctlnav/core/errors.hpp"
#include "ctlnav/core/json_io.hpp"
#include "ctlnav/core/geometry.hpp"
#include "ctlnav/radiomap/city.hpp"
#include "ctlnav/radiomap/params.hpp"
#include "ctlnav/radiomap/sinr.hpp"

namespace ctlnav {

// Best-serving SINR sampled at cell centers on a horizontal plane. Cells are
// stored row-major with x fastest: index = iy * nx + ix.
struct RadioMap {
    Vec2 origin;
    double cell_size = 10.0;
    std::size_t nx = 0;
    std::size_t ny = 0;
    double altitude = 90.0;
    double phi_th_db = 0.0;
    std::vector<double> sinr_db;
    std::vector<std::uint8_t> outage;

    std::size_t index(std::size_t ix, std::size_t iy) const { return iy * nx + ix; }

    Vec2 cell_center(std::size_t ix, std::size_t iy) const
    {
        return {origin.x + (static_cast<double>(ix) + 0.5) * cell_size,
                origin.y + (static_cast<double>(iy) + 0.5) * cell_size};
    }

    Rect bounds() const
    {
        return {origin.x, origin.y, origin.x + static_cast<double>(nx) * cell_size,
                origin.y + static_cast<double>(ny) * cell_size};
    }

    // Cell containing p; points on the far edge belong to the last cell.
    std::pair<std::size_t, std::size_t> cell_of(Vec2 p) const
    {
        if (!bounds().contains(p))
            throw DomainError("position outside radio map");
        auto ix = static_cast<std::size_t>(std::floor((p.x - origin.x) / cell_size));
        auto iy = static_cast<std::size_t>(std::floor((p.y - origin.y) / cell_size));
        return {std::min(ix, nx - 1), std::min(iy, ny - 1)};
    }

    double sinr_at(Vec2 p) const
    {
        auto [ix, iy] = cell_of(p);
        return sinr_db[index(ix, iy)];
    }

    bool outage_at(Vec2 p) const
    {
        auto [ix, iy] = cell_of(p);
        return outage[index(ix, iy)] != 0;
    }

    double outage_fraction() const
    {
        if (outage.empty())
            return 0.0;
        return static_cast<double>(std::count(outage.begin(), outage.end(), std::uint8_t{1})) /
               static_cast<double>(outage.size());
    }

    void recompute_outage()
    {
        outage.resize(sinr_db.size());
        for (std::size_t i = 0; i < sinr_db.size(); ++i)
            outage[i] = ctlnav::outage(sinr_db[i], phi_th_db) ? 1 : 0;
    }
};

inline std::size_t cells_along(double extent, double cell_size)
{
    if (!(cell_size > 0.0))
        throw DomainError("cell size must be positive");
    const double n = std::round(extent / cell_size);
    if (n < 1.0 || std::abs(n * cell_size - extent) > 1e-9 * std::max(1.0, extent))
        throw DomainError("cell size must divide the map extent");
    return static_cast<std::size_t>(n);
}

// Deterministic-fading SINR at every cell center at the given altitude.
inline RadioMap build_radio_map(const CityMap& city, const PropagationParams& p, double altitude, double cell_size)
{
    validate(p);
    if (!(altitude > city.max_building_height()))
        throw DomainError("flight altitude must exceed the tallest building");

    RadioMap map;
    map.origin = {0.0, 0.0};
    map.cell_size = cell_size;
    map.nx = cells_along(city.extent_x, cell_size);
    map.ny = cells_along(city.extent_y, cell_size);
    map.altitude = altitude;
    map.phi_th_db = p.phi_th_db;
    map.sinr_db.resize(map.nx * map.ny);
    for (std::size_t iy = 0; iy < map.ny; ++iy)
        for (std::size_t ix = 0; ix < map.nx; ++ix) {
            const Vec2 c = map.cell_center(ix, iy);
            map.sinr_db[map.index(ix, iy)] = sinr_at(Vec3{c.x, c.y, altitude}, city, p).sinr_db;
        }
    map.recompute_outage();
    return map;
}

inline constexpr int kRadioMapFormatVersion = 1;

inline nlohmann::json to_json(const RadioMap& m)
{
    nlohmann::json values = nlohmann::json::array();
    for (double v : m.sinr_db) {
        // JSON has no infinities; a dead cell is written as null
        if (std::isfinite(v))
            values.push_back(v);
        else
            values.push_back(nullptr);
    }
    return {
        {"format", "ctlnav.radiomap"},
        {"format_version", kRadioMapFormatVersion},
        {"origin", {m.origin.x, m.origin.y}},
        {"cell_size", m.cell_size},
        {"dims", {m.nx, m.ny}},
        {"altitude", m.altitude},
        {"phi_th", m.phi_th_db},
        {"sinr_db", std::move(values)},
    };
}

inline RadioMap radio_map_from_json(const nlohmann::json& j)
{
    try {
        if (j.at("format").get<std::string>() != "ctlnav.radiomap")
            throw ParseError("not a radio map file");
        const int version = j.at("format_version").get<int>();
        if (version != kRadioMapFormatVersion)
            throw ParseError("radio map format version " + std::to_string(version) + " is not supported");
        RadioMap m;
        m.origin = {j.at("origin").at(0).get<double>(), j.at("origin").at(1).get<double>()};
        m.cell_size = j.at("cell_size").get<double>();
        m.nx = j.at("dims").at(0).get<std::size_t>();
        m.ny = j.at("dims").at(1).get<std::size_t>();
        m.altitude = j.at("altitude").get<double>();
        m.phi_th_db = j.at("phi_th").get<double>();
        const auto& values = j.at("sinr_db");
        if (!values.is_array() || values.size() != m.nx * m.ny)
            throw ParseError("radio map grid size does not match dims");
        if (!(m.cell_size > 0.0))
            throw ParseError("radio map cell size must be positive");
        m.sinr_db.reserve(values.size());
        for (const auto& v : values)
            m.sinr_db.push_back(v.is_null() ? -std::numeric_limits<double>::infinity() : v.get<double>());
        m.recompute_outage();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed radio map: ") + e.what());
    }
}

inline void save_radio_map(const std::string& path, const RadioMap& m) { write_json_file(path, to_json(m)); }

inline RadioMap load_radio_map(const std::string& path) { return radio_map_from_json(read_json_file(path)); }

} // namespace ctlnav
