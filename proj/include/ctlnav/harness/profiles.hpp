#pragma once

#include "ctlnav/agent/hyperparams.hpp"
#include "ctlnav/cityworld/env_config.hpp"

namespace ctlnav {

// Scratch training hyperparameters. The desk profile trades the 0.99/100
// criterion for 0.95/50 and caps runs at 1,500 episodes.
inline Hyperparams profile_hyperparams(Profile profile, Algorithm algo = Algorithm::ddqn)
{
    Hyperparams h;
    h.algorithm = algo;
    if (profile == Profile::desk) {
        h.success_window = 50;
        h.success_threshold = 0.95;
        h.max_episodes = 1500;
    }
    return h;
}

} // namespace ctlnav
