#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ctlnav/agent/dqn.hpp"
#include "ctlnav/cityworld/mdp.hpp"

namespace ctlnav {

struct EpisodeRecord {
    int episode = 0; // 1-based
    double total_reward = 0.0;
    int steps = 0;
    bool success = false; // reached the arrival radius
    int outage_count = 0;
    double epsilon = 0.0; // after the end-of-episode decay
    double mean_sinr_db = 0.0; // over the positions reached by moves

    friend bool operator==(const EpisodeRecord&, const EpisodeRecord&) = default;
};

// Plays one epsilon-greedy episode, storing every transition and taking one
// gradient step per move once the buffer holds min_replay transitions.
inline EpisodeRecord run_episode(Agent& agent, const Environment& env)
{
    EpisodeRecord rec;
    rec.episode = agent.episodes_finished() + 1;
    Episode ep(env, env.reset(agent.rng()));
    double sinr_sum = 0.0;
    int sinr_count = 0;
    while (!ep.done()) {
        const Observation obs = env.observe(ep.state());
        const int a = agent.act(obs);
        const StepOutcome out = ep.step(static_cast<Action>(a));
        // running out of steps is a truncation, not a terminal state
        agent.remember({obs, a, out.reward, env.observe(out.next_state), out.arrived, out.outage});
        rec.total_reward += out.reward;
        rec.outage_count += out.outage ? 1 : 0;
        if (std::isfinite(out.next_state.sinr_db)) {
            sinr_sum += out.next_state.sinr_db;
            ++sinr_count;
        }
        if (agent.ready_to_train())
            agent.learn();
    }
    rec.steps = ep.steps();
    rec.success = ep.arrived();
    rec.mean_sinr_db = sinr_count ? sinr_sum / sinr_count : 0.0;
    agent.end_episode();
    rec.epsilon = agent.epsilon();
    return rec;
}

// True iff the last `window` episodes reached the target at a rate >= threshold.
inline bool training_complete(const std::vector<EpisodeRecord>& history, int window, double threshold)
{
    if (window < 1)
        throw DomainError("success window must be >= 1");
    if (history.size() < static_cast<std::size_t>(window))
        return false;
    int successes = 0;
    for (auto it = history.end() - window; it != history.end(); ++it)
        successes += it->success ? 1 : 0;
    return static_cast<double>(successes) / window >= threshold;
}

struct TrainOptions {
    int max_episodes = 3000;
    int window = 100;
    double threshold = 0.99;
    bool stop_when_complete = true;
};

inline TrainOptions train_options(const Hyperparams& hp)
{
    return {hp.max_episodes, hp.success_window, hp.success_threshold, true};
}

struct TrainResult {
    std::vector<EpisodeRecord> records;
    std::optional<int> converged_episode; // first episode where training_complete held
};

inline TrainResult train(Agent& agent, const Environment& env, const TrainOptions& opt)
{
    TrainResult r;
    for (int e = 0; e < opt.max_episodes; ++e) {
        r.records.push_back(run_episode(agent, env));
        if (!r.converged_episode && training_complete(r.records, opt.window, opt.threshold)) {
            r.converged_episode = r.records.back().episode;
            if (opt.stop_when_complete)
                break;
        }
    }
    return r;
}

struct Rollout {
    std::vector<Vec2> trajectory; // start first
    std::vector<double> sinr_db;  // per trajectory point
    std::vector<bool> outage;     // per trajectory point
    int steps = 0;
    int outage_count = 0;
    bool arrived = false;
    ConstraintReport report;
};

// Greedy (epsilon = 0) flight from `start` under the given Q-network.
inline Rollout greedy_rollout(const NetworkParams& q_net, const Environment& env, Vec2 start)
{
    Rollout r;
    Episode ep(env, env.state_at(start));
    const auto& map = env.radio_map();
    while (!ep.done()) {
        const Vector q = forward(q_net, env.observe(ep.state()));
        ep.step(static_cast<Action>(argmax(q)));
    }
    r.trajectory = ep.trajectory();
    for (const auto& p : r.trajectory) {
        r.sinr_db.push_back(map.sinr_at(p));
        r.outage.push_back(map.outage_at(p));
    }
    r.steps = ep.steps();
    r.arrived = ep.arrived();
    r.outage_count = episode_outage_count(r.trajectory, map);
    r.report = check_constraints(r.trajectory, env.mission(), map, env.max_building_height());
    return r;
}

} // namespace ctlnav
