#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "ctlnav/cityworld/mdp.hpp"
#include "ctlnav/core/errors.hpp"

namespace ctlnav {

struct Transition {
    Observation state{};
    int action = 0;
    double reward = 0.0;
    Observation next_state{};
    bool done = false; // terminal: no bootstrap from next_state
    bool outage = false;
};

// Fixed-capacity FIFO ring; uniform sampling with replacement.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity)
    {
        if (capacity == 0)
            throw DomainError("replay capacity must be positive");
        items_.reserve(std::min<std::size_t>(capacity, 1 << 16));
    }

    void push(const Transition& t)
    {
        if (items_.size() < capacity_) {
            items_.push_back(t);
        } else {
            items_[head_] = t;
            head_ = (head_ + 1) % capacity_;
        }
    }

    // Oldest-first view position i.
    const Transition& at(std::size_t i) const { return items_[(head_ + i) % items_.size()]; }

    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return items_.empty(); }

    void clear()
    {
        items_.clear();
        head_ = 0;
    }

    // min_size guards against learning from a nearly empty buffer.
    template <class Rng>
    std::vector<Transition> sample(std::size_t batch_size, Rng& rng, std::size_t min_size = 1) const
    {
        if (items_.empty() || items_.size() < min_size)
            throw ContractError("replay buffer holds fewer transitions than required for sampling");
        std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
        std::vector<Transition> batch;
        batch.reserve(batch_size);
        for (std::size_t i = 0; i < batch_size; ++i)
            batch.push_back(items_[pick(rng)]);
        return batch;
    }

private:
    std::size_t capacity_;
    std::vector<Transition> items_;
    std::size_t head_ = 0; // index of the oldest item once full
};

} // namespace ctlnav
