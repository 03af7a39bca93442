#pragma once

#include <cmath>

#include "ctlnav/core/errors.hpp"

namespace ctlnav {

enum class PropagationBackend {
    standard, // power-law LoS/NLoS + 3GPP sector antenna
    simple,   // log-distance RSS with constant noise floor
};

// Constants of the propagation, antenna and noise models. The defaults are
// typical urban-macro values at ~2 GHz.
struct PropagationParams {
    PropagationBackend backend = PropagationBackend::standard;

    // l(d) = X * d^-alpha, linear
    double x_los = 1.445e-4;   // -38.4 dB at 1 m
    double x_nlos = 3.98e-5;   // -44.0 dB at 1 m
    double alpha_los = 2.2;
    double alpha_nlos = 3.5;

    // 3GPP element pattern, dB / degrees
    double g_max_db = 8.0;
    double theta_3db_deg = 65.0;
    double phi_3db_deg = 65.0;
    double slav_db = 30.0;
    double am_db = 30.0;
    int n_elements = 8;

    double nakagami_m_los = 3.0;
    double nakagami_m_nlos = 1.0;

    double n0_w_per_hz = 4e-21;
    double bandwidth_hz = 10e6;

    double phi_th_db = 0.0; // outage when SINR <= phi_th

    // simple backend
    double simple_l0_db = 38.4;
    double simple_alpha = 2.2;
    double simple_d0_m = 1.0;
    double simple_sigma2_dbm = -104.0;

    double noise_power_w() const { return n0_w_per_hz * bandwidth_hz; }
};

inline void validate(const PropagationParams& p)
{
    if (!(p.alpha_los > 0.0) || !(p.alpha_nlos >= p.alpha_los))
        throw DomainError("path-loss exponents must satisfy alpha_nlos >= alpha_los > 0");
    if (!(p.x_los > 0.0) || !(p.x_nlos > 0.0))
        throw DomainError("path-loss intercepts must be positive");
    if (!(p.nakagami_m_los >= 0.5) || !(p.nakagami_m_nlos >= 0.5))
        throw DomainError("Nakagami shape must be >= 0.5");
    if (!(p.bandwidth_hz > 0.0) || !(p.n0_w_per_hz >= 0.0))
        throw DomainError("bandwidth must be positive and noise density non-negative");
    if (p.n_elements < 1)
        throw DomainError("antenna array needs at least one element");
    for (double v : {p.g_max_db, p.theta_3db_deg, p.phi_3db_deg, p.slav_db, p.am_db, p.phi_th_db})
        if (!std::isfinite(v))
            throw DomainError("antenna and threshold constants must be finite");
    if (!(p.theta_3db_deg > 0.0) || !(p.phi_3db_deg > 0.0))
        throw DomainError("3 dB beamwidths must be positive");
}

} // namespace ctlnav
