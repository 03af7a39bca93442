#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "ctlnav/core/errors.hpp"
#include "ctlnav/core/geometry.hpp"
#include "ctlnav/radiomap/radio_map.hpp"
#include "ctlnav/radiomap/sinr.hpp"

namespace ctlnav {

struct MissionSpec {
    Rect start_region{0.0, 0.0, 200.0, 200.0};
    Vec2 target{1000.0, 900.0};
    double arrival_radius = 30.0;
    int max_steps = 200;
    double step_length = 10.0;
    double altitude = 90.0;
    int outage_budget = 20; // evaluation only: a compliant trajectory has fewer outages
};

// R = -k1 d - k2 F - R_n + R_arrive [arrived], d in units of distance_unit_m.
struct RewardConstants {
    double k1 = 0.8;
    double k2 = 1.0;
    double step_penalty = 1.0;
    double arrive_reward = 2000.0;
    double distance_unit_m = 1000.0;

    friend bool operator==(const RewardConstants&, const RewardConstants&) = default;
};

// Affine SINR squashing into [-1, 1] plus the height scale for the altitude input.
struct ObservationNorm {
    double sinr_lo_db = -30.0;
    double sinr_hi_db = 30.0;
    double height_limit_m = 100.0;
};

enum class Action : int { forward = 0, backward = 1, left = 2, right = 3 };
inline constexpr int kNumActions = 4;
inline constexpr int kObservationSize = 4;
using Observation = std::array<double, kObservationSize>;

inline Vec2 action_direction(Action a)
{
    switch (a) {
    case Action::forward: return {0.0, 1.0};
    case Action::backward: return {0.0, -1.0};
    case Action::left: return {-1.0, 0.0};
    case Action::right: return {1.0, 0.0};
    }
    throw std::out_of_range("invalid action");
}

struct MdpState {
    Vec2 position;
    double sinr_db = 0.0;
};

struct StepOutcome {
    MdpState next_state;
    double reward = 0.0;
    bool done = false;
    bool arrived = false;
    bool outage = false;
    bool clipped = false;
};

struct RewardTerms {
    double distance;
    double outage;
    double step;
    double arrive;

    double total() const { return distance + outage + step + arrive; }
};

inline RewardTerms reward_terms(double distance_m, bool in_outage, bool arrived, const RewardConstants& rc)
{
    return {-rc.k1 * (distance_m / rc.distance_unit_m), -rc.k2 * (in_outage ? 1.0 : 0.0), -rc.step_penalty,
            arrived ? rc.arrive_reward : 0.0};
}

inline double reward(double distance_m, bool in_outage, bool arrived, const RewardConstants& rc)
{
    return reward_terms(distance_m, in_outage, arrived, rc).total();
}

// The grid MDP over one radio map: immutable and shareable between threads.
class Environment {
public:
    Environment(std::shared_ptr<const RadioMap> map, MissionSpec mission, RewardConstants rewards = {},
                ObservationNorm norm = {}, double max_building_height = 0.0)
        : map_(std::move(map)), mission_(mission), rewards_(rewards), norm_(norm),
          max_building_height_(max_building_height)
    {
        if (!map_)
            throw std::invalid_argument("Environment needs a radio map");
        if (!(mission_.arrival_radius > 0.0) || mission_.max_steps <= 0 || !(mission_.step_length > 0.0))
            throw DomainError("mission needs positive arrival radius, step budget and step length");
        if (!map_->bounds().contains(mission_.target))
            throw DomainError("mission target outside the map");
        const auto b = map_->bounds();
        const double half = map_->cell_size / 2.0;
        movable_ = {b.x0 + half, b.y0 + half, b.x1 - half, b.y1 - half};
    }

    const RadioMap& radio_map() const { return *map_; }
    std::shared_ptr<const RadioMap> radio_map_ptr() const { return map_; }
    const MissionSpec& mission() const { return mission_; }
    const RewardConstants& rewards() const { return rewards_; }
    const ObservationNorm& normalization() const { return norm_; }
    double max_building_height() const { return max_building_height_; }

    // Region reachable by the UAV: the rectangle spanned by the outermost cell centers.
    const Rect& movable_region() const { return movable_; }

    MdpState state_at(Vec2 p) const { return {p, map_->sinr_at(p)}; }

    bool arrived(Vec2 p) const { return distance(p, mission_.target) <= mission_.arrival_radius; }

    // Uniform cell center inside the start region.
    template <class Rng>
    MdpState reset(Rng& rng) const
    {
        const auto cells = start_cells();
        std::uniform_int_distribution<std::size_t> pick(0, cells.size() - 1);
        return state_at(cells[pick(rng)]);
    }

    std::vector<Vec2> start_cells() const
    {
        std::vector<Vec2> cells;
        for (std::size_t iy = 0; iy < map_->ny; ++iy)
            for (std::size_t ix = 0; ix < map_->nx; ++ix) {
                const Vec2 c = map_->cell_center(ix, iy);
                if (mission_.start_region.contains(c))
                    cells.push_back(c);
            }
        if (cells.empty())
            throw DomainError("start region contains no cell center");
        return cells;
    }

    StepOutcome step(const MdpState& s, Action a, int step_index) const
    {
        if (step_index < 0 || step_index >= mission_.max_steps)
            throw ContractError("step: episode step budget already exhausted");
        const Vec2 dir = action_direction(a);
        const Vec2 raw{s.position.x + dir.x * mission_.step_length, s.position.y + dir.y * mission_.step_length};
        const Vec2 next{std::clamp(raw.x, movable_.x0, movable_.x1), std::clamp(raw.y, movable_.y0, movable_.y1)};

        StepOutcome out;
        out.next_state = state_at(next);
        out.clipped = next != raw;
        out.outage = map_->outage_at(next);
        out.arrived = arrived(next);
        out.reward = reward(distance(next, mission_.target), out.outage, out.arrived, rewards_);
        out.done = out.arrived || step_index + 1 >= mission_.max_steps;
        return out;
    }

    Observation observe(const MdpState& s) const
    {
        const auto b = map_->bounds();
        const double mid = (norm_.sinr_hi_db + norm_.sinr_lo_db) / 2.0;
        const double half = (norm_.sinr_hi_db - norm_.sinr_lo_db) / 2.0;
        // -inf (dead cell) clamps to -1
        const double sinr = std::clamp((s.sinr_db - mid) / half, -1.0, 1.0);
        return {(s.position.x - b.x0) / b.width(), (s.position.y - b.y0) / b.height(),
                mission_.altitude / norm_.height_limit_m, std::isnan(sinr) ? -1.0 : sinr};
    }

private:
    std::shared_ptr<const RadioMap> map_;
    MissionSpec mission_;
    RewardConstants rewards_;
    ObservationNorm norm_;
    double max_building_height_;
    Rect movable_;
};

// One episode's progress; refuses to step once finished.
class Episode {
public:
    Episode(const Environment& env, MdpState start) : env_(&env), state_(start)
    {
        trajectory_.push_back(start.position);
        done_ = env.arrived(start.position);
        arrived_ = done_;
    }

    StepOutcome step(Action a)
    {
        if (done_)
            throw ContractError("step called on a finished episode");
        StepOutcome out = env_->step(state_, a, steps_);
        ++steps_;
        state_ = out.next_state;
        trajectory_.push_back(state_.position);
        done_ = out.done;
        arrived_ = out.arrived;
        return out;
    }

    const MdpState& state() const { return state_; }
    bool done() const { return done_; }
    bool arrived() const { return arrived_; }
    int steps() const { return steps_; }
    const std::vector<Vec2>& trajectory() const { return trajectory_; }

private:
    const Environment* env_;
    MdpState state_;
    std::vector<Vec2> trajectory_;
    int steps_ = 0;
    bool done_ = false;
    bool arrived_ = false;
};

// Gamma: outage indicator summed over the positions reached by each move.
// trajectory[0] is the start position and is not a move.
inline int episode_outage_count(const std::vector<Vec2>& trajectory, const RadioMap& map)
{
    int gamma = 0;
    for (std::size_t i = 1; i < trajectory.size(); ++i)
        gamma += map.outage_at(trajectory[i]) ? 1 : 0;
    return gamma;
}

struct ConstraintReport {
    int steps = 0;
    int outage_count = 0;
    double final_distance = std::numeric_limits<double>::infinity();
    bool start_in_region = false; // q(0) = q_I
    bool arrived = false;         // q(T) = q_F
    bool outage_ok = false;       // Gamma < Gamma_hat
    bool altitude_ok = false;     // h(u) > h_B
    bool steps_ok = false;        // n <= N
};

inline ConstraintReport check_constraints(const std::vector<Vec2>& trajectory, const MissionSpec& mission,
                                          const RadioMap& map, double max_building_height)
{
    ConstraintReport r;
    r.steps = trajectory.empty() ? 0 : static_cast<int>(trajectory.size()) - 1;
    r.outage_count = episode_outage_count(trajectory, map);
    if (!trajectory.empty()) {
        r.final_distance = distance(trajectory.back(), mission.target);
        r.start_in_region = mission.start_region.contains(trajectory.front());
    }
    r.arrived = r.final_distance <= mission.arrival_radius;
    r.outage_ok = r.outage_count < mission.outage_budget;
    r.altitude_ok = mission.altitude > max_building_height;
    r.steps_ok = r.steps <= mission.max_steps;
    return r;
}

} // namespace ctlnav
