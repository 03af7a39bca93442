#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "ctlnav/core/errors.hpp"
#include "ctlnav/core/geometry.hpp"
#include "ctlnav/radiomap/city.hpp"

namespace ctlnav {

// Procedural city: a street grid of square blocks, each holding at most one
// building, plus base stations at street intersections.
struct CityPreset {
    double block_pitch = 100.0;   // m between street center lines
    double street_width = 30.0;
    double fill_probability = 0.85;
    double footprint_min = 40.0;  // building side, m
    double footprint_max = 70.0;
    double height_min = 40.0;
    double height_max = 85.0;
    double bs_height_min = 20.0;
    double bs_height_max = 25.0;
    double bs_tx_power_w = 40.0;
    double bs_downtilt_deg = 10.0;
    std::vector<Vec2> bs_sites;   // fractions of the extent, snapped to intersections
};

inline CityPreset city_preset(EnvId id)
{
    CityPreset p;
    switch (id) {
    case EnvId::env1: // dense, tall downtown
        p.bs_sites = {{0.25, 0.25}, {0.75, 0.25}, {0.25, 0.75}, {0.75, 0.75}};
        break;
    case EnvId::env2: // sparse, short buildings, different sites
        p.block_pitch = 160.0;
        p.street_width = 40.0;
        p.fill_probability = 0.35;
        p.footprint_min = 25.0;
        p.footprint_max = 60.0;
        p.height_min = 10.0;
        p.height_max = 30.0;
        p.bs_height_min = 10.0;
        p.bs_height_max = 25.0;
        p.bs_sites = {{0.15, 0.3}, {0.55, 0.15}, {0.85, 0.6}, {0.4, 0.8}};
        break;
    case EnvId::env3: // low residential blocks, three sites
        p.block_pitch = 50.0;
        p.street_width = 15.0;
        p.fill_probability = 0.7;
        p.footprint_min = 12.0;
        p.footprint_max = 25.0;
        p.height_min = 5.0;
        p.height_max = 15.0;
        p.bs_height_min = 5.0;
        p.bs_height_max = 15.0;
        p.bs_sites = {{0.2, 0.7}, {0.7, 0.2}, {0.8, 0.8}};
        break;
    }
    return p;
}

inline CityMap generate_city(EnvId id, std::uint64_t seed, double extent, const CityPreset& preset)
{
    if (!(extent > 0.0))
        throw DomainError("city extent must be positive");
    if (!(preset.block_pitch > preset.street_width) || !(preset.footprint_max <= preset.block_pitch - preset.street_width))
        throw DomainError("building footprints must fit inside a block");

    std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(id));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

    CityMap city;
    city.extent_x = city.extent_y = extent;
    city.env_id = id;
    city.seed = seed;

    const double lot = preset.block_pitch - preset.street_width;
    const auto blocks = static_cast<int>(std::floor(extent / preset.block_pitch));
    for (int by = 0; by < blocks; ++by)
        for (int bx = 0; bx < blocks; ++bx) {
            // draw every variate so the layout of one block never shifts another
            const double fill = unit(rng);
            const double side_x = uniform(preset.footprint_min, preset.footprint_max);
            const double side_y = uniform(preset.footprint_min, preset.footprint_max);
            const double off_x = unit(rng);
            const double off_y = unit(rng);
            const double h = uniform(preset.height_min, preset.height_max);
            if (fill >= preset.fill_probability)
                continue;
            const double lot_x = bx * preset.block_pitch + preset.street_width / 2.0;
            const double lot_y = by * preset.block_pitch + preset.street_width / 2.0;
            const double x0 = lot_x + off_x * (lot - side_x);
            const double y0 = lot_y + off_y * (lot - side_y);
            city.buildings.push_back({{x0, y0, x0 + side_x, y0 + side_y}, h});
        }

    for (const auto& site : preset.bs_sites) {
        auto snap = [&](double frac) {
            const double k = std::round(frac * extent / preset.block_pitch);
            return std::clamp(k * preset.block_pitch, preset.block_pitch, extent - preset.block_pitch);
        };
        BaseStation bs;
        bs.position = {snap(site.x), snap(site.y)};
        bs.height = uniform(preset.bs_height_min, preset.bs_height_max);
        bs.tx_power_w = preset.bs_tx_power_w;
        bs.downtilt_deg = preset.bs_downtilt_deg;
        const double rot = uniform(0.0, 120.0);
        bs.sector_azimuth_deg = {rot, rot + 120.0, rot + 240.0};
        city.base_stations.push_back(bs);
    }
    return city;
}

inline CityMap generate_city(EnvId id, std::uint64_t seed, double extent = 2000.0)
{
    return generate_city(id, seed, extent, city_preset(id));
}

// Copy of the city with one station switched off.
inline CityMap apply_emergency(const CityMap& city, std::size_t bs_index)
{
    if (bs_index >= city.base_stations.size())
        throw std::out_of_range("apply_emergency: no base station " + std::to_string(bs_index));
    CityMap out = city;
    out.base_stations[bs_index].tx_power_w = 0.0;
    return out;
}

inline double mean_building_height(const CityMap& city)
{
    if (city.buildings.empty())
        return 0.0;
    double sum = 0.0;
    for (const auto& b : city.buildings)
        sum += b.height;
    return sum / static_cast<double>(city.buildings.size());
}

inline nlohmann::json to_json(const BaseStation& bs)
{
    return {{"x", bs.position.x},
            {"y", bs.position.y},
            {"height", bs.height},
            {"tx_power_w", bs.tx_power_w},
            {"sector_azimuth_deg", bs.sector_azimuth_deg},
            {"downtilt_deg", bs.downtilt_deg}};
}

inline BaseStation base_station_from_json(const nlohmann::json& j)
{
    BaseStation bs;
    bs.position = {j.at("x").get<double>(), j.at("y").get<double>()};
    bs.height = j.at("height").get<double>();
    bs.tx_power_w = j.value("tx_power_w", bs.tx_power_w);
    if (j.contains("sector_azimuth_deg"))
        bs.sector_azimuth_deg = j.at("sector_azimuth_deg").get<std::array<double, 3>>();
    bs.downtilt_deg = j.value("downtilt_deg", bs.downtilt_deg);
    validate(bs);
    return bs;
}

// Inspection export of the generated geometry.
inline nlohmann::json to_json(const CityMap& city)
{
    nlohmann::json buildings = nlohmann::json::array();
    for (const auto& b : city.buildings)
        buildings.push_back({{"x0", b.footprint.x0},
                             {"y0", b.footprint.y0},
                             {"x1", b.footprint.x1},
                             {"y1", b.footprint.y1},
                             {"height", b.height}});
    nlohmann::json stations = nlohmann::json::array();
    for (const auto& bs : city.base_stations)
        stations.push_back(to_json(bs));
    return {{"env_id", to_string(city.env_id)},
            {"seed", city.seed},
            {"extent", {city.extent_x, city.extent_y}},
            {"buildings", std::move(buildings)},
            {"base_stations", std::move(stations)}};
}

} // namespace ctlnav
