#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctlnav/cityworld/generate.hpp"
#include "ctlnav/cityworld/mdp.hpp"
#include "ctlnav/core/errors.hpp"
#include "ctlnav/core/hash.hpp"
#include "ctlnav/radiomap/city.hpp"
#include "ctlnav/radiomap/params.hpp"
#include "ctlnav/radiomap/radio_map.hpp"

namespace ctlnav {

enum class Profile { paper, desk };
enum class Scenario { standard, emergency };

inline Profile profile_from_string(const std::string& s)
{
    if (s == "paper") return Profile::paper;
    if (s == "desk") return Profile::desk;
    throw ParseError("unknown profile '" + s + "' (expected paper or desk)");
}

inline std::string to_string(Profile p) { return p == Profile::paper ? "paper" : "desk"; }

// Everything needed to rebuild one environment bit-for-bit.
struct EnvConfig {
    EnvId env_id = EnvId::env1;
    std::uint64_t seed = 1;
    double extent = 2000.0;
    double cell_size = 10.0;
    CityPreset buildings = city_preset(EnvId::env1);
    std::optional<std::vector<BaseStation>> base_stations; // nullopt: generate from the preset
    std::optional<std::size_t> emergency_bs;
    MissionSpec mission;
    RewardConstants reward;
    ObservationNorm normalization;
    PropagationParams propagation;
};

// Full-scale geometry is 2 km with 10 m moves; the desk profile halves the
// extent and doubles the move so episodes stay short.
inline EnvConfig make_env_config(EnvId id, Profile profile, Scenario scenario = Scenario::standard,
                                 std::uint64_t seed = 1)
{
    EnvConfig c;
    c.env_id = id;
    c.seed = seed;
    c.buildings = city_preset(id);
    const bool desk = profile == Profile::desk;
    c.extent = desk ? 1000.0 : 2000.0;
    c.cell_size = desk ? 20.0 : 10.0;
    c.mission.step_length = c.cell_size;
    c.mission.max_steps = desk ? 100 : 200;
    c.mission.start_region = {0.0, 0.0, 200.0, 200.0};
    // Per-move change of a kilometre distance term (0.008 to 0.016) is lost
    // under the outage and step penalties; agents never find the target.
    c.reward.distance_unit_m = 100.0;
    const double scale = c.extent / 2000.0;

    Vec2 target{1000.0, 900.0};
    // Reachable within max_steps moves from every start cell.
    if (id == EnvId::env3)
        target = {700.0, 1100.0};
    if (scenario == Scenario::emergency) {
        target = {1250.0, 1300.0};
        c.emergency_bs = 0;
    }
    c.mission.target = {target.x * scale, target.y * scale};
    return c;
}

namespace detail {

inline void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> keys, const char* where)
{
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k))
            throw ParseError(std::string("unknown key '") + k + "' in " + where);
}

} // namespace detail

inline nlohmann::json to_json(const RewardConstants& r)
{
    return {{"k1", r.k1},
            {"k2", r.k2},
            {"step_penalty", r.step_penalty},
            {"arrive_reward", r.arrive_reward},
            {"distance_unit_m", r.distance_unit_m}};
}

// Applies the keys present in j on top of base. Unknown keys are an error.
inline RewardConstants reward_from_json(const nlohmann::json& j, RewardConstants base = {})
{
    detail::reject_unknown(j, {"k1", "k2", "step_penalty", "arrive_reward", "distance_unit_m"}, "reward");
    base.k1 = j.value("k1", base.k1);
    base.k2 = j.value("k2", base.k2);
    base.step_penalty = j.value("step_penalty", base.step_penalty);
    base.arrive_reward = j.value("arrive_reward", base.arrive_reward);
    base.distance_unit_m = j.value("distance_unit_m", base.distance_unit_m);
    if (!(base.distance_unit_m > 0.0))
        throw ParseError("reward.distance_unit_m must be positive");
    return base;
}

inline nlohmann::json to_json(const PropagationParams& p)
{
    return {{"backend", p.backend == PropagationBackend::simple ? "simple" : "standard"},
            {"x_los", p.x_los},
            {"x_nlos", p.x_nlos},
            {"alpha_los", p.alpha_los},
            {"alpha_nlos", p.alpha_nlos},
            {"g_max_db", p.g_max_db},
            {"theta_3db_deg", p.theta_3db_deg},
            {"phi_3db_deg", p.phi_3db_deg},
            {"slav_db", p.slav_db},
            {"am_db", p.am_db},
            {"n_elements", p.n_elements},
            {"nakagami_m_los", p.nakagami_m_los},
            {"nakagami_m_nlos", p.nakagami_m_nlos},
            {"n0_w_per_hz", p.n0_w_per_hz},
            {"bandwidth_hz", p.bandwidth_hz},
            {"phi_th_db", p.phi_th_db},
            {"simple_l0_db", p.simple_l0_db},
            {"simple_alpha", p.simple_alpha},
            {"simple_d0_m", p.simple_d0_m},
            {"simple_sigma2_dbm", p.simple_sigma2_dbm}};
}

inline PropagationParams propagation_from_json(const nlohmann::json& j, PropagationParams p = {})
{
    if (j.contains("backend")) {
        const auto b = j.at("backend").get<std::string>();
        if (b != "standard" && b != "simple")
            throw ParseError("propagation.backend must be standard or simple");
        p.backend = b == "simple" ? PropagationBackend::simple : PropagationBackend::standard;
    }
    p.x_los = j.value("x_los", p.x_los);
    p.x_nlos = j.value("x_nlos", p.x_nlos);
    p.alpha_los = j.value("alpha_los", p.alpha_los);
    p.alpha_nlos = j.value("alpha_nlos", p.alpha_nlos);
    p.g_max_db = j.value("g_max_db", p.g_max_db);
    p.theta_3db_deg = j.value("theta_3db_deg", p.theta_3db_deg);
    p.phi_3db_deg = j.value("phi_3db_deg", p.phi_3db_deg);
    p.slav_db = j.value("slav_db", p.slav_db);
    p.am_db = j.value("am_db", p.am_db);
    p.n_elements = j.value("n_elements", p.n_elements);
    p.nakagami_m_los = j.value("nakagami_m_los", p.nakagami_m_los);
    p.nakagami_m_nlos = j.value("nakagami_m_nlos", p.nakagami_m_nlos);
    p.n0_w_per_hz = j.value("n0_w_per_hz", p.n0_w_per_hz);
    p.bandwidth_hz = j.value("bandwidth_hz", p.bandwidth_hz);
    p.phi_th_db = j.value("phi_th_db", p.phi_th_db);
    p.simple_l0_db = j.value("simple_l0_db", p.simple_l0_db);
    p.simple_alpha = j.value("simple_alpha", p.simple_alpha);
    p.simple_d0_m = j.value("simple_d0_m", p.simple_d0_m);
    p.simple_sigma2_dbm = j.value("simple_sigma2_dbm", p.simple_sigma2_dbm);
    validate(p);
    return p;
}

inline nlohmann::json to_json(const EnvConfig& c)
{
    nlohmann::json sites = nlohmann::json::array();
    for (const auto& s : c.buildings.bs_sites)
        sites.push_back({s.x, s.y});
    nlohmann::json stations = "generate";
    if (c.base_stations) {
        stations = nlohmann::json::array();
        for (const auto& bs : *c.base_stations)
            stations.push_back(to_json(bs));
    }
    const auto& m = c.mission;
    return {
        {"env_id", to_string(c.env_id)},
        {"seed", c.seed},
        {"extent", c.extent},
        {"cell_size", c.cell_size},
        {"buildings",
         {{"block_pitch", c.buildings.block_pitch},
          {"street_width", c.buildings.street_width},
          {"fill_probability", c.buildings.fill_probability},
          {"footprint_min", c.buildings.footprint_min},
          {"footprint_max", c.buildings.footprint_max},
          {"height_min", c.buildings.height_min},
          {"height_max", c.buildings.height_max},
          {"bs_height_min", c.buildings.bs_height_min},
          {"bs_height_max", c.buildings.bs_height_max},
          {"bs_tx_power_w", c.buildings.bs_tx_power_w},
          {"bs_downtilt_deg", c.buildings.bs_downtilt_deg},
          {"bs_sites", std::move(sites)}}},
        {"base_stations", std::move(stations)},
        {"emergency_bs", c.emergency_bs ? nlohmann::json(*c.emergency_bs) : nlohmann::json(nullptr)},
        {"mission",
         {{"start_region", {m.start_region.x0, m.start_region.y0, m.start_region.x1, m.start_region.y1}},
          {"target", {m.target.x, m.target.y}},
          {"arrival_radius", m.arrival_radius},
          {"max_steps", m.max_steps},
          {"step_length", m.step_length},
          {"altitude", m.altitude},
          {"outage_budget", m.outage_budget}}},
        {"reward", to_json(c.reward)},
        {"normalization",
         {{"sinr_lo_db", c.normalization.sinr_lo_db},
          {"sinr_hi_db", c.normalization.sinr_hi_db},
          {"height_limit_m", c.normalization.height_limit_m}}},
        {"propagation", to_json(c.propagation)},
    };
}

// Missing keys fall back to the env preset (profile "paper" unless given).
inline EnvConfig env_config_from_json(const nlohmann::json& j)
{
    try {
        const EnvId id = env_id_from_string(j.at("env_id").get<std::string>());
        const Profile profile = profile_from_string(j.value("profile", std::string("paper")));
        const Scenario scenario =
            j.value("scenario", std::string("standard")) == "emergency" ? Scenario::emergency : Scenario::standard;
        EnvConfig c = make_env_config(id, profile, scenario, j.value("seed", std::uint64_t{1}));
        c.extent = j.value("extent", c.extent);
        c.cell_size = j.value("cell_size", c.cell_size);
        if (j.contains("buildings")) {
            const auto& b = j.at("buildings");
            auto& p = c.buildings;
            p.block_pitch = b.value("block_pitch", p.block_pitch);
            p.street_width = b.value("street_width", p.street_width);
            p.fill_probability = b.value("fill_probability", p.fill_probability);
            p.footprint_min = b.value("footprint_min", p.footprint_min);
            p.footprint_max = b.value("footprint_max", p.footprint_max);
            p.height_min = b.value("height_min", p.height_min);
            p.height_max = b.value("height_max", p.height_max);
            p.bs_height_min = b.value("bs_height_min", p.bs_height_min);
            p.bs_height_max = b.value("bs_height_max", p.bs_height_max);
            p.bs_tx_power_w = b.value("bs_tx_power_w", p.bs_tx_power_w);
            p.bs_downtilt_deg = b.value("bs_downtilt_deg", p.bs_downtilt_deg);
            if (b.contains("bs_sites")) {
                p.bs_sites.clear();
                for (const auto& s : b.at("bs_sites"))
                    p.bs_sites.push_back({s.at(0).get<double>(), s.at(1).get<double>()});
            }
        }
        if (j.contains("base_stations") && j.at("base_stations").is_array()) {
            std::vector<BaseStation> list;
            for (const auto& s : j.at("base_stations"))
                list.push_back(base_station_from_json(s));
            c.base_stations = std::move(list);
        } else if (j.contains("base_stations") && j.at("base_stations") != "generate") {
            throw ParseError("base_stations must be \"generate\" or a list");
        }
        if (j.contains("emergency_bs"))
            c.emergency_bs = j.at("emergency_bs").is_null()
                                 ? std::nullopt
                                 : std::optional<std::size_t>(j.at("emergency_bs").get<std::size_t>());
        if (j.contains("mission")) {
            const auto& m = j.at("mission");
            auto& ms = c.mission;
            if (m.contains("start_region")) {
                const auto& r = m.at("start_region");
                ms.start_region = {r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>(),
                                   r.at(3).get<double>()};
            }
            if (m.contains("target"))
                ms.target = {m.at("target").at(0).get<double>(), m.at("target").at(1).get<double>()};
            ms.arrival_radius = m.value("arrival_radius", ms.arrival_radius);
            ms.max_steps = m.value("max_steps", ms.max_steps);
            ms.step_length = m.value("step_length", ms.step_length);
            ms.altitude = m.value("altitude", ms.altitude);
            ms.outage_budget = m.value("outage_budget", ms.outage_budget);
        }
        if (j.contains("reward"))
            c.reward = reward_from_json(j.at("reward"), c.reward);
        if (j.contains("normalization")) {
            const auto& n = j.at("normalization");
            c.normalization.sinr_lo_db = n.value("sinr_lo_db", c.normalization.sinr_lo_db);
            c.normalization.sinr_hi_db = n.value("sinr_hi_db", c.normalization.sinr_hi_db);
            c.normalization.height_limit_m = n.value("height_limit_m", c.normalization.height_limit_m);
            if (!(c.normalization.sinr_hi_db > c.normalization.sinr_lo_db))
                throw ParseError("normalization needs sinr_hi_db > sinr_lo_db");
        }
        if (j.contains("propagation"))
            c.propagation = propagation_from_json(j.at("propagation"), c.propagation);
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed environment config: ") + e.what());
    } catch (const DomainError& e) {
        throw ParseError(std::string("invalid environment config: ") + e.what());
    }
}

inline std::uint64_t config_hash(const EnvConfig& c) { return fnv1a(to_json(c).dump()); }

// City, radio map and MDP built from one config.
struct World {
    EnvConfig config;
    CityMap city;
    std::shared_ptr<const RadioMap> radio_map;
    std::shared_ptr<const Environment> env;
};

inline CityMap build_city(const EnvConfig& c)
{
    CityMap city = generate_city(c.env_id, c.seed, c.extent, c.buildings);
    if (c.base_stations)
        city.base_stations = *c.base_stations;
    if (c.emergency_bs)
        city = apply_emergency(city, *c.emergency_bs);
    validate(city, c.mission.altitude);
    return city;
}

inline World build_world(const EnvConfig& c)
{
    World w;
    w.config = c;
    w.city = build_city(c);
    w.radio_map =
        std::make_shared<const RadioMap>(build_radio_map(w.city, c.propagation, c.mission.altitude, c.cell_size));
    w.env = std::make_shared<const Environment>(w.radio_map, c.mission, c.reward, c.normalization,
                                                w.city.max_building_height());
    return w;
}

} // namespace ctlnav
