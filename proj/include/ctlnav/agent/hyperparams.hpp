#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctlnav/core/errors.hpp"
#include "ctlnav/neural/mlp.hpp"
#include "ctlnav/neural/optimizer.hpp"

namespace ctlnav {

enum class Algorithm { dqn, ddqn };

inline std::string to_string(Algorithm a) { return a == Algorithm::dqn ? "dqn" : "ddqn"; }

inline Algorithm algorithm_from_string(const std::string& s)
{
    if (s == "dqn") return Algorithm::dqn;
    if (s == "ddqn") return Algorithm::ddqn;
    throw ParseError("unknown algorithm '" + s + "' (expected dqn or ddqn)");
}

struct Hyperparams {
    Algorithm algorithm = Algorithm::ddqn;
    double learning_rate = 0.001;
    double epsilon_start = 1.0;
    double epsilon_decay = 0.998; // per episode
    double epsilon_min = 0.01;
    double gamma = 0.95;
    int batch_size = 64;
    int replay_capacity = 50000;
    int target_sync_period = 500; // training steps
    int min_replay = 1000;
    int success_window = 100;
    double success_threshold = 0.99;
    int max_episodes = 3000;
    double grad_clip = 10.0; // global L2 norm, <= 0 disables
    OptimizerKind optimizer = OptimizerKind::adam;
    std::vector<int> layer_dims = default_q_architecture();
};

inline void validate(const Hyperparams& h)
{
    if (!(h.gamma > 0.0 && h.gamma < 1.0))
        throw DomainError("discount must lie in (0, 1)");
    if (!(h.epsilon_decay > 0.0 && h.epsilon_decay < 1.0))
        throw DomainError("exploration decay must lie in (0, 1)");
    if (!(h.learning_rate > 0.0))
        throw DomainError("learning rate must be positive");
    if (!(h.epsilon_start >= 0.0 && h.epsilon_start <= 1.0) || !(h.epsilon_min >= 0.0 && h.epsilon_min <= 1.0))
        throw DomainError("exploration rates must lie in [0, 1]");
    if (h.batch_size <= 0 || h.replay_capacity <= 0 || h.target_sync_period <= 0 || h.min_replay < 0 ||
        h.success_window <= 0 || h.max_episodes <= 0)
        throw DomainError("batch, replay, sync, window and episode counts must be positive");
    check_dims(h.layer_dims);
}

// Learning and exploration rates for fine-tuning a transferred network.
inline Hyperparams with_transfer_rates(Hyperparams h)
{
    h.learning_rate = 0.0002;
    h.epsilon_start = 0.5;
    h.epsilon_decay = 0.995;
    return h;
}

inline nlohmann::json to_json(const Hyperparams& h)
{
    return {{"algorithm", to_string(h.algorithm)},
            {"learning_rate", h.learning_rate},
            {"epsilon_start", h.epsilon_start},
            {"epsilon_decay", h.epsilon_decay},
            {"epsilon_min", h.epsilon_min},
            {"gamma", h.gamma},
            {"batch_size", h.batch_size},
            {"replay_capacity", h.replay_capacity},
            {"target_sync_period", h.target_sync_period},
            {"min_replay", h.min_replay},
            {"success_window", h.success_window},
            {"success_threshold", h.success_threshold},
            {"max_episodes", h.max_episodes},
            {"grad_clip", h.grad_clip},
            {"optimizer", h.optimizer == OptimizerKind::adam ? "adam" : "sgd"},
            {"layer_dims", h.layer_dims}};
}

// Overrides the keys present in j; unknown keys are rejected.
inline Hyperparams hyperparams_from_json(const nlohmann::json& j, Hyperparams h = {})
{
    static const std::vector<std::string> known{
        "algorithm",     "learning_rate",  "epsilon_start",     "epsilon_decay",     "epsilon_min",
        "gamma",         "batch_size",     "replay_capacity",   "target_sync_period", "min_replay",
        "success_window", "success_threshold", "max_episodes",  "grad_clip",         "optimizer",
        "layer_dims"};
    try {
        for (const auto& [k, v] : j.items())
            if (std::find(known.begin(), known.end(), k) == known.end())
                throw ParseError("unknown hyperparameter '" + k + "'");
        if (j.contains("algorithm"))
            h.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
        h.learning_rate = j.value("learning_rate", h.learning_rate);
        h.epsilon_start = j.value("epsilon_start", h.epsilon_start);
        h.epsilon_decay = j.value("epsilon_decay", h.epsilon_decay);
        h.epsilon_min = j.value("epsilon_min", h.epsilon_min);
        h.gamma = j.value("gamma", h.gamma);
        h.batch_size = j.value("batch_size", h.batch_size);
        h.replay_capacity = j.value("replay_capacity", h.replay_capacity);
        h.target_sync_period = j.value("target_sync_period", h.target_sync_period);
        h.min_replay = j.value("min_replay", h.min_replay);
        h.success_window = j.value("success_window", h.success_window);
        h.success_threshold = j.value("success_threshold", h.success_threshold);
        h.max_episodes = j.value("max_episodes", h.max_episodes);
        h.grad_clip = j.value("grad_clip", h.grad_clip);
        if (j.contains("optimizer")) {
            const auto o = j.at("optimizer").get<std::string>();
            if (o != "adam" && o != "sgd")
                throw ParseError("optimizer must be adam or sgd");
            h.optimizer = o == "adam" ? OptimizerKind::adam : OptimizerKind::sgd;
        }
        h.layer_dims = j.value("layer_dims", h.layer_dims);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed hyperparameters: ") + e.what());
    }
    validate(h);
    return h;
}

} // namespace ctlnav
