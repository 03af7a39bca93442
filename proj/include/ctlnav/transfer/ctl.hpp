#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctlnav/agent/dqn.hpp"
#include "ctlnav/agent/hyperparams.hpp"
#include "ctlnav/agent/metrics_io.hpp"
#include "ctlnav/agent/training.hpp"
#include "ctlnav/cityworld/env_config.hpp"
#include "ctlnav/core/json_io.hpp"
#include "ctlnav/core/version.hpp"
#include "ctlnav/neural/weights_io.hpp"

namespace ctlnav {

// Reward constants with the optional per-stage overrides applied. Keys use
// the reward's own symbols: k1, k2, R_n, R_arrive.
inline RewardConstants apply_reward_override(const nlohmann::json& overrides, RewardConstants base = {})
{
    if (overrides.is_null())
        return base;
    if (!overrides.is_object())
        throw ParseError("reward overrides must be an object");
    for (const auto& [key, value] : overrides.items()) {
        if (!value.is_number())
            throw ParseError("reward override '" + key + "' must be a number");
        const double v = value.get<double>();
        if (key == "k1")
            base.k1 = v;
        else if (key == "k2")
            base.k2 = v;
        else if (key == "R_n")
            base.step_penalty = v;
        else if (key == "R_arrive")
            base.arrive_reward = v;
        else
            throw ParseError("unknown reward override '" + key + "' (allowed: k1, k2, R_n, R_arrive)");
    }
    return base;
}

struct StageSpec {
    std::string name;
    EnvConfig env;
    nlohmann::json hyperparams = nlohmann::json::object(); // overrides on the stage defaults
    nlohmann::json reward = nlohmann::json::object();      // overrides on the env's reward constants
    bool emergency = false;
    std::size_t bs_index = 0;
};

struct TransferPlan {
    std::vector<StageSpec> stages;
    std::optional<std::string> source_checkpoint; // none: stage 1 trains from scratch
    Hyperparams base;                             // scratch hyperparameters
};

struct StageResult {
    int stage_index = 0;
    std::string name;
    std::optional<int> episodes_to_convergence;
    double final_success_rate = 0.0; // over the last success window
    std::string checkpoint_path;
    std::vector<EpisodeRecord> records;
    Hyperparams hyperparams; // effective, after overrides
    RewardConstants reward;
    bool transferred = false;

    bool converged() const { return episodes_to_convergence.has_value(); }
};

// Stage environment after the emergency flag and reward overrides.
inline EnvConfig effective_env(const StageSpec& s)
{
    EnvConfig c = s.env;
    if (s.emergency)
        c.emergency_bs = s.bs_index;
    c.reward = apply_reward_override(s.reward, c.reward);
    return c;
}

// Hyperparameters a stage trains with: the base set, switched to the
// fine-tuning rates when the stage starts from transferred weights.
inline Hyperparams effective_hyperparams(const TransferPlan& plan, std::size_t stage, bool transferred)
{
    Hyperparams h = transferred ? with_transfer_rates(plan.base) : plan.base;
    return hyperparams_from_json(plan.stages.at(stage).hyperparams, h);
}

// New agent seeded with pre-trained weights: online and target networks equal
// the source, optimizer moments are zero and the replay buffer is empty.
inline Agent transfer_init(const NetworkParams& source, const Hyperparams& stage_hp, std::uint64_t seed)
{
    if (source.layer_dims != stage_hp.layer_dims)
        throw ShapeError("checkpoint architecture does not match the stage network");
    return Agent(stage_hp, source, seed);
}

inline Agent transfer_init(const std::string& checkpoint, const Hyperparams& stage_hp, std::uint64_t seed)
{
    if (!std::filesystem::exists(checkpoint))
        throw ParseError("checkpoint not found: " + checkpoint);
    return transfer_init(load_weights(checkpoint, stage_hp.layer_dims), stage_hp, seed);
}

inline double trailing_success_rate(const std::vector<EpisodeRecord>& records, int window)
{
    if (records.empty())
        return 0.0;
    const auto n = std::min<std::size_t>(records.size(), static_cast<std::size_t>(window));
    int s = 0;
    for (auto it = records.end() - static_cast<std::ptrdiff_t>(n); it != records.end(); ++it)
        s += it->success ? 1 : 0;
    return static_cast<double>(s) / static_cast<double>(n);
}

struct RunInfo {
    std::uint64_t seed = 0;
    std::string kind = "train";
    bool deterministic = true;
    nlohmann::json extra = nlohmann::json::object();
};

inline nlohmann::json run_manifest(const RunInfo& info, const Hyperparams& hp, const EnvConfig& env,
                                   const std::optional<int>& converged, std::size_t episodes)
{
    nlohmann::json j{{"code_version", kVersion},
                     {"kind", info.kind},
                     {"seed", info.seed},
                     {"deterministic", info.deterministic},
                     {"hyperparams", to_json(hp)},
                     {"env_config", to_json(env)},
                     {"env_config_hash", config_hash(env)},
                     {"episodes", episodes},
                     {"converged_episode", converged ? nlohmann::json(*converged) : nlohmann::json(nullptr)}};
    for (const auto& [k, v] : info.extra.items())
        j[k] = v;
    return j;
}

// Writes metrics.csv, sinr.csv, weights.json and manifest.json into dir.
inline std::string persist_run(const std::filesystem::path& dir, const Agent& agent, const TrainResult& result,
                               const EnvConfig& env, const RunInfo& info)
{
    std::filesystem::create_directories(dir);
    write_metrics_csv((dir / "metrics.csv").string(), result.records);
    write_sinr_csv((dir / "sinr.csv").string(), result.records);
    const auto weights = (dir / "weights.json").string();
    save_weights(weights, agent.online());
    write_json_file((dir / "manifest.json").string(),
                    run_manifest(info, agent.hyperparams(), env, result.converged_episode, result.records.size()), 2);
    return weights;
}

// Trains until the success criterion holds or max_episodes, then saves the
// checkpoint whether or not it converged.
inline StageResult run_stage(Agent& agent, const World& world, const std::filesystem::path& out_dir, int stage_index,
                             const RunInfo& info)
{
    const auto& hp = agent.hyperparams();
    TrainResult tr = train(agent, *world.env, train_options(hp));
    StageResult r;
    r.stage_index = stage_index;
    r.episodes_to_convergence = tr.converged_episode;
    r.final_success_rate = trailing_success_rate(tr.records, hp.success_window);
    r.hyperparams = hp;
    r.reward = world.config.reward;
    r.checkpoint_path = persist_run(out_dir, agent, tr, world.config, info);
    r.records = std::move(tr.records);
    return r;
}

// Runs the stages in order; each stage after the first (or every stage, given
// a source checkpoint) starts from the previous stage's weights. Finished
// stages stay on disk if a later one fails.
inline std::vector<StageResult> run_ctl(const TransferPlan& plan, std::uint64_t seed, const std::filesystem::path& out_dir)
{
    if (plan.stages.empty())
        throw DomainError("transfer plan needs at least one stage");
    std::vector<StageResult> results;
    std::optional<std::string> checkpoint = plan.source_checkpoint;
    for (std::size_t k = 0; k < plan.stages.size(); ++k) {
        const auto& stage = plan.stages[k];
        const bool transferred = checkpoint.has_value();
        const Hyperparams hp = effective_hyperparams(plan, k, transferred);
        const World world = build_world(effective_env(stage));
        Agent agent = transferred ? transfer_init(*checkpoint, hp, seed) : Agent(hp, seed);

        RunInfo info;
        info.seed = seed;
        info.kind = "ctl_stage";
        info.extra = {{"stage_index", k},
                      {"stage_name", stage.name},
                      {"transferred", transferred},
                      {"source_checkpoint", transferred ? nlohmann::json(*checkpoint) : nlohmann::json(nullptr)},
                      {"reward_overrides", stage.reward}};
        const auto dir = out_dir / ("stage" + std::to_string(k + 1) + (stage.name.empty() ? "" : "_" + stage.name));
        StageResult r = run_stage(agent, world, dir, static_cast<int>(k), info);
        r.name = stage.name;
        r.transferred = transferred;
        checkpoint = r.checkpoint_path;
        results.push_back(std::move(r));
    }
    return results;
}

inline nlohmann::json to_json(const StageSpec& s)
{
    return {{"name", s.name},
            {"env", to_json(s.env)},
            {"hyperparams", s.hyperparams},
            {"reward", s.reward},
            {"emergency", s.emergency},
            {"bs_index", s.bs_index}};
}

inline nlohmann::json to_json(const TransferPlan& p)
{
    nlohmann::json stages = nlohmann::json::array();
    for (const auto& s : p.stages)
        stages.push_back(to_json(s));
    return {{"source_checkpoint", p.source_checkpoint ? nlohmann::json(*p.source_checkpoint) : nlohmann::json(nullptr)},
            {"hyperparams", to_json(p.base)},
            {"stages", std::move(stages)}};
}

// Stage "env" entries are inline objects or paths relative to base_dir.
inline TransferPlan transfer_plan_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {},
                                            Hyperparams base = {})
{
    try {
        TransferPlan plan;
        plan.base = hyperparams_from_json(j.value("hyperparams", nlohmann::json::object()), base);
        if (j.contains("source_checkpoint") && !j.at("source_checkpoint").is_null())
            plan.source_checkpoint = (base_dir / j.at("source_checkpoint").get<std::string>()).string();
        for (const auto& s : j.at("stages")) {
            StageSpec st;
            st.name = s.value("name", std::string{});
            const auto& env = s.at("env");
            st.env = env.is_string() ? env_config_from_json(read_json_file((base_dir / env.get<std::string>()).string()))
                                     : env_config_from_json(env);
            st.hyperparams = s.value("hyperparams", nlohmann::json::object());
            st.reward = s.value("reward", nlohmann::json::object());
            apply_reward_override(st.reward); // reject unknown keys at load time
            st.emergency = s.value("emergency", false);
            st.bs_index = s.value("bs_index", std::size_t{0});
            plan.stages.push_back(std::move(st));
        }
        if (plan.stages.empty())
            throw ParseError("transfer plan needs at least one stage");
        return plan;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed transfer plan: ") + e.what());
    }
}

} // namespace ctlnav
