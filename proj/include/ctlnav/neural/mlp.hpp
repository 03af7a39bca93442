#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ctlnav/core/errors.hpp"
#include "ctlnav/core/hash.hpp"

namespace ctlnav {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Dense network: ReLU on hidden layers, identity on the output layer.
// weights[l] maps layer l (cols) to layer l+1 (rows).
struct NetworkParams {
    std::vector<int> layer_dims;
    std::vector<Matrix> weights;
    std::vector<Vector> biases;

    std::size_t num_layers() const { return weights.size(); }
    int input_size() const { return layer_dims.front(); }
    int output_size() const { return layer_dims.back(); }

    std::size_t parameter_count() const
    {
        std::size_t n = 0;
        for (std::size_t l = 0; l < weights.size(); ++l)
            n += static_cast<std::size_t>(weights[l].size() + biases[l].size());
        return n;
    }
};

inline const std::vector<int>& default_q_architecture()
{
    static const std::vector<int> dims{4, 64, 64, 64, 4};
    return dims;
}

inline void check_dims(const std::vector<int>& dims)
{
    if (dims.size() < 2)
        throw ShapeError("a network needs at least an input and an output layer");
    for (int d : dims)
        if (d <= 0)
            throw ShapeError("layer sizes must be positive");
}

inline bool same_shape(const NetworkParams& a, const NetworkParams& b) { return a.layer_dims == b.layer_dims; }

// Zero-valued parameters of the given shape; also the layout of gradients.
inline NetworkParams zeros_like(const std::vector<int>& dims)
{
    check_dims(dims);
    NetworkParams p;
    p.layer_dims = dims;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        p.weights.push_back(Matrix::Zero(dims[l + 1], dims[l]));
        p.biases.push_back(Vector::Zero(dims[l + 1]));
    }
    return p;
}

// Gaussian weights with std gain/sqrt(fan_in), zero biases. The gain is 1 for
// the first layer (raw inputs) and sqrt(2) after a rectifier, which keeps the
// pre-activation variance close to the input variance at every depth.
inline NetworkParams init_network(const std::vector<int>& dims, std::uint64_t seed)
{
    NetworkParams p = zeros_like(dims);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        const double gain = l == 0 ? 1.0 : std::sqrt(2.0);
        const double scale = gain / std::sqrt(static_cast<double>(dims[l]));
        auto& w = p.weights[l];
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c)
                w(r, c) = scale * normal(rng);
    }
    return p;
}

// Batched forward pass; columns of `inputs` are samples.
inline Matrix forward_batch(const NetworkParams& p, const Matrix& inputs)
{
    if (inputs.rows() != p.input_size())
        throw ShapeError("forward: input size does not match the network");
    Matrix a = inputs;
    for (std::size_t l = 0; l < p.num_layers(); ++l) {
        Matrix z = p.weights[l] * a;
        z.colwise() += p.biases[l];
        if (l + 1 < p.num_layers())
            a = z.cwiseMax(0.0);
        else
            a = std::move(z);
    }
    return a;
}

inline Vector forward(const NetworkParams& p, std::span<const double> input)
{
    if (static_cast<int>(input.size()) != p.input_size())
        throw ShapeError("forward: input size does not match the network");
    for (double v : input)
        if (!std::isfinite(v))
            throw DomainError("forward: non-finite input");
    const Eigen::Map<const Vector> x(input.data(), static_cast<Eigen::Index>(input.size()));
    return forward_batch(p, x);
}

struct LossAndGradients {
    double loss = 0.0;
    NetworkParams gradients;
};

// L = (1/N) sum_j (Q(x_j)[a_j] - t_j)^2; only the selected outputs carry error.
inline LossAndGradients loss_and_gradients(const NetworkParams& p, const Matrix& inputs,
                                           std::span<const int> actions, std::span<const double> targets)
{
    const auto n = inputs.cols();
    if (n == 0)
        throw DomainError("loss_and_gradients: empty batch");
    if (static_cast<std::size_t>(n) != actions.size() || actions.size() != targets.size())
        throw ShapeError("loss_and_gradients: batch components differ in length");
    if (inputs.rows() != p.input_size())
        throw ShapeError("loss_and_gradients: input size does not match the network");

    const std::size_t layers = p.num_layers();
    std::vector<Matrix> act(layers + 1); // act[0] = inputs, act[l] = output of layer l
    act[0] = inputs;
    for (std::size_t l = 0; l < layers; ++l) {
        Matrix z = p.weights[l] * act[l];
        z.colwise() += p.biases[l];
        act[l + 1] = l + 1 < layers ? Matrix(z.cwiseMax(0.0)) : std::move(z);
    }

    LossAndGradients out;
    out.gradients = zeros_like(p.layer_dims);
    Matrix delta = Matrix::Zero(p.output_size(), n);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const int a = actions[static_cast<std::size_t>(j)];
        if (a < 0 || a >= p.output_size())
            throw ShapeError("loss_and_gradients: action index out of range");
        const double t = targets[static_cast<std::size_t>(j)];
        if (!std::isfinite(t))
            throw DomainError("loss_and_gradients: non-finite target");
        const double err = act[layers](a, j) - t;
        out.loss += err * err * inv_n;
        delta(a, j) = 2.0 * err * inv_n;
    }

    for (std::size_t l = layers; l-- > 0;) {
        out.gradients.weights[l].noalias() = delta * act[l].transpose();
        out.gradients.biases[l] = delta.rowwise().sum();
        if (l == 0)
            break;
        Matrix back = p.weights[l].transpose() * delta;
        // rectifier derivative, taken as 0 at the kink
        delta = back.cwiseProduct((act[l].array() > 0.0).cast<double>().matrix());
    }
    return out;
}

inline double global_norm(const NetworkParams& g)
{
    double sq = 0.0;
    for (std::size_t l = 0; l < g.num_layers(); ++l)
        sq += g.weights[l].squaredNorm() + g.biases[l].squaredNorm();
    return std::sqrt(sq);
}

// Rescales g so its global L2 norm is at most max_norm. Returns the norm before clipping.
inline double clip_global_norm(NetworkParams& g, double max_norm)
{
    const double norm = global_norm(g);
    if (max_norm > 0.0 && norm > max_norm) {
        const double s = max_norm / norm;
        for (std::size_t l = 0; l < g.num_layers(); ++l) {
            g.weights[l] *= s;
            g.biases[l] *= s;
        }
    }
    return norm;
}

// Target network sync: a deep copy (Eigen matrices own their storage).
inline void copy_into_target(const NetworkParams& online, NetworkParams& target) { target = online; }

inline std::uint64_t checksum(const NetworkParams& p)
{
    Fnv1a h;
    for (int d : p.layer_dims)
        h.update(&d, sizeof d);
    for (std::size_t l = 0; l < p.num_layers(); ++l) {
        h.update(p.weights[l].data(), sizeof(double) * static_cast<std::size_t>(p.weights[l].size()));
        h.update(p.biases[l].data(), sizeof(double) * static_cast<std::size_t>(p.biases[l].size()));
    }
    return h.digest();
}

inline bool bitwise_equal(const NetworkParams& a, const NetworkParams& b)
{
    if (!same_shape(a, b))
        return false;
    for (std::size_t l = 0; l < a.num_layers(); ++l)
        if (a.weights[l] != b.weights[l] || a.biases[l] != b.biases[l])
            return false;
    return true;
}

} // namespace ctlnav
