#pragma once

#include <cmath>

#include "ctlnav/core/errors.hpp"
#include "ctlnav/core/geometry.hpp"
#include "ctlnav/core/units.hpp"
#include "ctlnav/radiomap/city.hpp"
#include "ctlnav/radiomap/params.hpp"

namespace ctlnav {

// Large-scale power-law gain X * d^-alpha (linear, < 1 for realistic d).
inline double path_loss(double d, bool los, const PropagationParams& p)
{
    if (!(d > 0.0))
        throw DomainError("path_loss: distance must be positive");
    return los ? p.x_los * std::pow(d, -p.alpha_los) : p.x_nlos * std::pow(d, -p.alpha_nlos);
}

// L = L0 + 10 alpha log10(d / d0), in dB.
inline double log_distance_path_loss(double d, double l0_db, double alpha, double d0)
{
    if (!(d0 > 0.0) || !(d >= d0))
        throw DomainError("log_distance_path_loss: requires d >= d0 > 0");
    return l0_db + 10.0 * alpha * std::log10(d / d0);
}

// R = P_t - L(d) + sigma2, every term in dB(m). P_t is the sector power in dBm.
inline double simple_rss(const Vec3& grid_point, const BaseStation& tx, double l0_db, double alpha, double d0,
                         double sigma2_db)
{
    const double d = distance(grid_point, tx.antenna());
    return watts_to_dbm(tx.tx_power_w) - log_distance_path_loss(d, l0_db, alpha, d0) + sigma2_db;
}

} // namespace ctlnav
