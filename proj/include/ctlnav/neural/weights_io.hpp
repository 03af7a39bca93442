#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctlnav/core/errors.hpp"
#include "ctlnav/core/json_io.hpp"
#include "ctlnav/neural/mlp.hpp"

namespace ctlnav {

inline constexpr int kWeightsFormatVersion = 1;

inline nlohmann::json to_json(const NetworkParams& p)
{
    nlohmann::json layers = nlohmann::json::array();
    for (std::size_t l = 0; l < p.num_layers(); ++l) {
        const auto& w = p.weights[l];
        std::vector<double> flat;
        flat.reserve(static_cast<std::size_t>(w.size()));
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c)
                flat.push_back(w(r, c));
        std::vector<double> bias(p.biases[l].data(), p.biases[l].data() + p.biases[l].size());
        layers.push_back({{"weights", std::move(flat)}, {"biases", std::move(bias)}});
    }
    return {{"format", "ctlnav.weights"},
            {"format_version", kWeightsFormatVersion},
            {"layer_dims", p.layer_dims},
            {"layers", std::move(layers)}};
}

inline NetworkParams network_from_json(const nlohmann::json& j, const std::optional<std::vector<int>>& expected_dims)
{
    try {
        if (j.at("format").get<std::string>() != "ctlnav.weights")
            throw ParseError("not a weights file");
        const int version = j.at("format_version").get<int>();
        if (version != kWeightsFormatVersion)
            throw ParseError("weights format version " + std::to_string(version) + " is not supported");
        const auto dims = j.at("layer_dims").get<std::vector<int>>();
        check_dims(dims);
        if (expected_dims && dims != *expected_dims)
            throw ShapeError("weights file architecture does not match the expected layer sizes");
        NetworkParams p = zeros_like(dims);
        const auto& layers = j.at("layers");
        if (layers.size() != p.num_layers())
            throw ParseError("weights file layer count does not match layer_dims");
        for (std::size_t l = 0; l < p.num_layers(); ++l) {
            const auto flat = layers.at(l).at("weights").get<std::vector<double>>();
            const auto bias = layers.at(l).at("biases").get<std::vector<double>>();
            auto& w = p.weights[l];
            if (flat.size() != static_cast<std::size_t>(w.size()) ||
                bias.size() != static_cast<std::size_t>(p.biases[l].size()))
                throw ParseError("weights file layer " + std::to_string(l) + " has the wrong number of values");
            std::size_t k = 0;
            for (Eigen::Index r = 0; r < w.rows(); ++r)
                for (Eigen::Index c = 0; c < w.cols(); ++c)
                    w(r, c) = flat[k++];
            for (std::size_t i = 0; i < bias.size(); ++i)
                p.biases[l](static_cast<Eigen::Index>(i)) = bias[i];
        }
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed weights file: ") + e.what());
    }
}

inline void save_weights(const std::string& path, const NetworkParams& p) { write_json_file(path, to_json(p)); }

inline NetworkParams load_weights(const std::string& path,
                                  const std::optional<std::vector<int>>& expected_dims = std::nullopt)
{
    return network_from_json(read_json_file(path), expected_dims);
}

} // namespace ctlnav
