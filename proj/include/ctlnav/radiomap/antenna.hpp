#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "ctlnav/core/errors.hpp"
#include "ctlnav/core/geometry.hpp"
#include "ctlnav/core/units.hpp"
#include "ctlnav/radiomap/city.hpp"
#include "ctlnav/radiomap/params.hpp"

namespace ctlnav {

// 3GPP element pattern in dB. theta is the zenith angle relative to the
// tilted boresight (90 = on boresight), phi the azimuth offset, both degrees.
inline double element_pattern(double theta_deg, double phi_deg, const PropagationParams& p)
{
    const double v = (theta_deg - 90.0) / p.theta_3db_deg;
    const double h = phi_deg / p.phi_3db_deg;
    const double vertical = -std::min(12.0 * v * v, p.slav_db);
    const double horizontal = -std::min(12.0 * h * h, p.am_db);
    return p.g_max_db - std::min(-(vertical + horizontal), p.am_db);
}

using Complex = std::complex<double>;

// AF = 10 log10(1 + |a . w^T|) in dB.
inline double array_factor(std::span<const Complex> amplitude, std::span<const Complex> weights)
{
    if (amplitude.size() != weights.size())
        throw ShapeError("array_factor: amplitude and beam vectors differ in length");
    Complex acc{0.0, 0.0};
    for (std::size_t k = 0; k < amplitude.size(); ++k)
        acc += amplitude[k] * weights[k];
    return 10.0 * std::log10(1.0 + std::abs(acc));
}

// Unit-norm response of a half-wavelength uniform linear array laid out
// horizontally across the sector face.
inline std::vector<Complex> steering_vector(double theta_deg, double phi_deg, int n)
{
    const double u = std::sin(deg_to_rad(theta_deg)) * std::sin(deg_to_rad(phi_deg));
    const double norm = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<Complex> a(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        a[static_cast<std::size_t>(k)] = std::polar(norm, std::numbers::pi * k * u);
    return a;
}

// Boresight-aligned uniform beam; no steering.
inline std::vector<Complex> boresight_weights(int n)
{
    return std::vector<Complex>(static_cast<std::size_t>(n), Complex{1.0 / std::sqrt(static_cast<double>(n)), 0.0});
}

struct SectorAngles {
    double theta_deg; // zenith angle measured from the tilted boresight frame, 90 on boresight
    double phi_deg;   // azimuth offset from the sector boresight, [-180, 180)
};

// Angles of `target` seen from sector `sector` (0-based) of `bs`.
inline SectorAngles sector_angles(const BaseStation& bs, std::size_t sector, const Vec3& target)
{
    if (sector >= bs.sector_azimuth_deg.size())
        throw std::out_of_range("sector index must be 0, 1 or 2");
    const Vec3 src = bs.antenna();
    const double dx = target.x - src.x, dy = target.y - src.y, dz = target.z - src.z;
    const double azimuth = rad_to_deg(std::atan2(dy, dx));
    const double zenith = rad_to_deg(std::atan2(std::hypot(dx, dy), dz));
    return {std::clamp(zenith - bs.downtilt_deg, 0.0, 180.0), wrap_degrees(azimuth - bs.sector_azimuth_deg[sector])};
}

// G = A_3GPP(theta, phi) + AF(theta, phi, n), dB.
inline double antenna_gain(const BaseStation& bs, std::size_t sector, const Vec3& uav, const PropagationParams& p)
{
    const auto [theta, phi] = sector_angles(bs, sector, uav);
    const auto a = steering_vector(theta, phi, p.n_elements);
    const auto w = boresight_weights(p.n_elements);
    return element_pattern(theta, phi, p) + array_factor(a, w);
}

} // namespace ctlnav
