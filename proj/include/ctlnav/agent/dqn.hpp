#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "ctlnav/agent/hyperparams.hpp"
#include "ctlnav/agent/replay.hpp"
#include "ctlnav/cityworld/mdp.hpp"
#include "ctlnav/neural/mlp.hpp"
#include "ctlnav/neural/optimizer.hpp"

namespace ctlnav {

// Index of the largest value; the lowest index wins ties.
inline int argmax(std::span<const double> q)
{
    int best = 0;
    for (int i = 1; i < static_cast<int>(q.size()); ++i)
        if (q[static_cast<std::size_t>(i)] > q[static_cast<std::size_t>(best)])
            best = i;
    return best;
}

inline int argmax(const Vector& q) { return argmax(std::span<const double>(q.data(), static_cast<std::size_t>(q.size()))); }

// Epsilon-greedy choice. One uniform draw decides explore vs exploit; a
// second picks the random action.
template <class Rng>
int select_action(std::span<const double> q, double epsilon, Rng& rng)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (unit(rng) < epsilon) {
        std::uniform_int_distribution<int> pick(0, static_cast<int>(q.size()) - 1);
        return pick(rng);
    }
    return argmax(q);
}

inline double dqn_target(const Transition& t, const NetworkParams& target_net, double gamma)
{
    if (t.done)
        return t.reward;
    const Vector q = forward(target_net, t.next_state);
    return t.reward + gamma * q.maxCoeff();
}

// The online network picks the next action, the target network values it.
inline double ddqn_target(const Transition& t, const NetworkParams& online_net, const NetworkParams& target_net,
                          double gamma)
{
    if (t.done)
        return t.reward;
    const int a = argmax(forward(online_net, t.next_state));
    const Vector q = forward(target_net, t.next_state);
    return t.reward + gamma * q(a);
}

// A DQN/DDQN learner. Owns its networks, optimizer, replay buffer and RNG.
class Agent {
public:
    Agent(const Hyperparams& hp, std::uint64_t seed) : Agent(hp, init_network(hp.layer_dims, seed), seed) {}

    Agent(const Hyperparams& hp, NetworkParams initial, std::uint64_t seed)
        : hp_(hp), online_(std::move(initial)), target_(online_), replay_(static_cast<std::size_t>(hp.replay_capacity)),
          rng_(seed ^ 0xA5A5A5A55A5A5A5AULL)
    {
        validate(hp_);
        if (online_.layer_dims != hp_.layer_dims)
            throw ShapeError("initial network does not match the configured architecture");
        if (online_.input_size() != kObservationSize || online_.output_size() != kNumActions)
            throw ShapeError("Q-network must map the 4-input observation to 4 action values");
        opt_ = make_optimizer(online_, hp_.learning_rate, hp_.optimizer);
    }

    const Hyperparams& hyperparams() const { return hp_; }
    const NetworkParams& online() const { return online_; }
    const NetworkParams& target() const { return target_; }
    const ReplayBuffer& replay() const { return replay_; }
    const OptimizerState& optimizer() const { return opt_; }
    std::mt19937_64& rng() { return rng_; }
    std::int64_t train_steps() const { return train_steps_; }
    int episodes_finished() const { return episodes_; }

    // eps_k = max(eps_min, eps0 * decay^k) after k finished episodes.
    double epsilon() const
    {
        return std::max(hp_.epsilon_min, hp_.epsilon_start * std::pow(hp_.epsilon_decay, static_cast<double>(episodes_)));
    }

    Vector q_values(const Observation& obs) const { return forward(online_, obs); }

    int act(const Observation& obs)
    {
        const Vector q = q_values(obs);
        return select_action(std::span<const double>(q.data(), kNumActions), epsilon(), rng_);
    }

    int greedy_action(const Observation& obs) const { return argmax(q_values(obs)); }

    void remember(const Transition& t) { replay_.push(t); }

    bool ready_to_train() const
    {
        return replay_.size() >= static_cast<std::size_t>(std::max(1, hp_.min_replay));
    }

    // Samples a minibatch and applies one update. Call only when ready_to_train().
    double learn() { return train_step(replay_.sample(static_cast<std::size_t>(hp_.batch_size), rng_)); }

    // Bellman targets for a batch, evaluated in one pass per network.
    std::vector<double> targets(std::span<const Transition> batch) const
    {
        const auto n = static_cast<Eigen::Index>(batch.size());
        Matrix next(kObservationSize, n);
        for (Eigen::Index j = 0; j < n; ++j)
            for (int i = 0; i < kObservationSize; ++i)
                next(i, j) = batch[static_cast<std::size_t>(j)].next_state[static_cast<std::size_t>(i)];
        const Matrix q_target = forward_batch(target_, next);
        Matrix q_online;
        if (hp_.algorithm == Algorithm::ddqn)
            q_online = forward_batch(online_, next);

        std::vector<double> y(batch.size());
        for (Eigen::Index j = 0; j < n; ++j) {
            const auto& t = batch[static_cast<std::size_t>(j)];
            if (t.done) {
                y[static_cast<std::size_t>(j)] = t.reward;
                continue;
            }
            double bootstrap;
            if (hp_.algorithm == Algorithm::ddqn) {
                Eigen::Index a = 0;
                for (Eigen::Index k = 1; k < q_online.rows(); ++k)
                    if (q_online(k, j) > q_online(a, j))
                        a = k;
                bootstrap = q_target(a, j);
            } else {
                bootstrap = q_target.col(j).maxCoeff();
            }
            y[static_cast<std::size_t>(j)] = t.reward + hp_.gamma * bootstrap;
        }
        return y;
    }

    double train_step(std::span<const Transition> batch)
    {
        if (batch.empty())
            throw DomainError("train_step: empty batch");
        const auto y = targets(batch);
        const auto n = static_cast<Eigen::Index>(batch.size());
        Matrix states(kObservationSize, n);
        std::vector<int> actions(batch.size());
        for (Eigen::Index j = 0; j < n; ++j) {
            const auto& t = batch[static_cast<std::size_t>(j)];
            for (int i = 0; i < kObservationSize; ++i)
                states(i, j) = t.state[static_cast<std::size_t>(i)];
            actions[static_cast<std::size_t>(j)] = t.action;
        }
        auto lg = loss_and_gradients(online_, states, actions, y);
        clip_global_norm(lg.gradients, hp_.grad_clip);
        optimizer_step(online_, lg.gradients, opt_);
        ++train_steps_;
        if (train_steps_ % hp_.target_sync_period == 0)
            copy_into_target(online_, target_);
        return lg.loss;
    }

    void end_episode() { ++episodes_; }

private:
    Hyperparams hp_;
    NetworkParams online_;
    NetworkParams target_;
    OptimizerState opt_;
    ReplayBuffer replay_;
    std::mt19937_64 rng_;
    std::int64_t train_steps_ = 0;
    int episodes_ = 0;
};

} // namespace ctlnav
