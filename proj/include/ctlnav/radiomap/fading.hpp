#pragma once

#include <random>

#include "ctlnav/core/errors.hpp"

namespace ctlnav {

// Nakagami-m power coefficient f^2 ~ Gamma(m, 1/m), unit mean.
template <class Rng>
double sample_fading(double m, Rng& rng)
{
    if (!(m >= 0.5))
        throw DomainError("Nakagami shape m must be >= 0.5");
    std::gamma_distribution<double> gamma(m, 1.0 / m);
    return gamma(rng);
}

} // namespace ctlnav
