#pragma once

#include <cmath>
#include <cstdint>

#include "ctlnav/core/errors.hpp"
#include "ctlnav/neural/mlp.hpp"

namespace ctlnav {

enum class OptimizerKind { adam, sgd };

struct OptimizerState {
    OptimizerKind kind = OptimizerKind::adam;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::int64_t step = 0;
    NetworkParams first_moment;  // same layout as the parameters
    NetworkParams second_moment;
};

inline OptimizerState make_optimizer(const NetworkParams& params, double learning_rate,
                                     OptimizerKind kind = OptimizerKind::adam)
{
    if (!(learning_rate > 0.0))
        throw DomainError("learning rate must be positive");
    OptimizerState s;
    s.kind = kind;
    s.learning_rate = learning_rate;
    s.first_moment = zeros_like(params.layer_dims);
    s.second_moment = zeros_like(params.layer_dims);
    return s;
}

// One adaptive-moment step with bias correction (or plain gradient descent).
inline void optimizer_step(NetworkParams& params, const NetworkParams& grads, OptimizerState& s)
{
    if (!same_shape(params, grads) || !same_shape(params, s.first_moment))
        throw ShapeError("optimizer_step: parameter, gradient and moment shapes differ");
    ++s.step;
    if (s.kind == OptimizerKind::sgd) {
        for (std::size_t l = 0; l < params.num_layers(); ++l) {
            params.weights[l] -= s.learning_rate * grads.weights[l];
            params.biases[l] -= s.learning_rate * grads.biases[l];
        }
        return;
    }
    const double c1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.step));
    const double c2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.step));
    auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
        m = s.beta1 * m + (1.0 - s.beta1) * grad;
        v = s.beta2 * v + (1.0 - s.beta2) * grad.cwiseProduct(grad);
        param.array() -= s.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + s.epsilon);
    };
    for (std::size_t l = 0; l < params.num_layers(); ++l) {
        update(params.weights[l], grads.weights[l], s.first_moment.weights[l], s.second_moment.weights[l]);
        update(params.biases[l], grads.biases[l], s.first_moment.biases[l], s.second_moment.biases[l]);
    }
}

} // namespace ctlnav
