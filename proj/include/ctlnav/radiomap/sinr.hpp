#pragma once

#include <cstddef>
#include <vector>

#include "ctlnav/core/errors.hpp"
#include "ctlnav/core/geometry.hpp"
#include "ctlnav/core/units.hpp"
#include "ctlnav/radiomap/antenna.hpp"
#include "ctlnav/radiomap/city.hpp"
#include "ctlnav/radiomap/fading.hpp"
#include "ctlnav/radiomap/los.hpp"
#include "ctlnav/radiomap/params.hpp"
#include "ctlnav/radiomap/propagation.hpp"

namespace ctlnav {

enum class FadingMode { deterministic, sampled };

struct SinrResult {
    double sinr_db = 0.0;
    int serving_bs = -1;     // -1 when no station radiates
    int serving_sector = -1;
    double signal_w = 0.0;
    double interference_w = 0.0;
    double noise_w = 0.0;
};

// SINR <= phi_th is an outage. NaN and -inf are outages too.
inline bool outage(double sinr_db, double phi_th_db) { return !(sinr_db > phi_th_db); }

namespace detail {

struct LinkPower {
    int bs;
    int sector;
    double power; // W, or mW for the simple backend; only ratios matter
};

template <class Rng>
double fading_draw(Rng* rng, bool los, const PropagationParams& p)
{
    if (rng == nullptr)
        return 1.0;
    return sample_fading(los ? p.nakagami_m_los : p.nakagami_m_nlos, *rng);
}

template <class Rng>
std::vector<LinkPower> link_powers(const Vec3& uav, const CityMap& city, const PropagationParams& p, Rng* rng)
{
    std::vector<LinkPower> links;
    links.reserve(city.base_stations.size() * 3);
    for (std::size_t b = 0; b < city.base_stations.size(); ++b) {
        const auto& bs = city.base_stations[b];
        if (!bs.active())
            continue;
        const Vec3 ant = bs.antenna();
        const bool los = is_los(uav, ant, city);
        const double d = distance(uav, ant);
        if (p.backend == PropagationBackend::simple) {
            const double rx_dbm =
                simple_rss(uav, bs, p.simple_l0_db, p.simple_alpha, p.simple_d0_m, 0.0);
            links.push_back({static_cast<int>(b), 0, db_to_linear(rx_dbm) * fading_draw(rng, los, p)});
            continue;
        }
        const double pl = path_loss(d, los, p);
        for (std::size_t j = 0; j < bs.sector_azimuth_deg.size(); ++j) {
            const double gain = db_to_linear(antenna_gain(bs, j, uav, p));
            links.push_back(
                {static_cast<int>(b), static_cast<int>(j), bs.tx_power_w * gain * pl * fading_draw(rng, los, p)});
        }
    }
    return links;
}

template <class Rng>
SinrResult sinr_impl(const Vec3& uav, const CityMap& city, const PropagationParams& p, Rng* rng)
{
    if (uav.x < 0.0 || uav.x > city.extent_x || uav.y < 0.0 || uav.y > city.extent_y)
        throw DomainError("sinr_at: position outside map bounds");

    const auto links = link_powers(uav, city, p, rng);
    SinrResult r;
    r.noise_w = p.backend == PropagationBackend::simple ? db_to_linear(p.simple_sigma2_dbm) : p.noise_power_w();

    // strict '>' keeps the lowest (bs, sector) on ties
    double best = 0.0;
    for (const auto& l : links)
        if (l.power > best) {
            best = l.power;
            r.serving_bs = l.bs;
            r.serving_sector = l.sector;
        }
    r.signal_w = best;
    for (const auto& l : links)
        if (l.bs != r.serving_bs)
            r.interference_w += l.power;
    r.sinr_db = linear_to_db(r.signal_w / (r.interference_w + r.noise_w));
    return r;
}

} // namespace detail

// Best-serving SINR at a UAV position, fading coefficient fixed to 1.
inline SinrResult sinr_at(const Vec3& uav, const CityMap& city, const PropagationParams& p)
{
    return detail::sinr_impl<std::mt19937_64>(uav, city, p, nullptr);
}

// Same, with one Nakagami draw per link in sampled mode.
template <class Rng>
SinrResult sinr_at(const Vec3& uav, const CityMap& city, const PropagationParams& p, FadingMode mode, Rng& rng)
{
    return detail::sinr_impl<Rng>(uav, city, p, mode == FadingMode::sampled ? &rng : nullptr);
}

} // namespace ctlnav
