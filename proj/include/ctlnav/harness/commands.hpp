#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctlnav/agent/metrics_io.hpp"
#include "ctlnav/agent/training.hpp"
#include "ctlnav/cityworld/env_config.hpp"
#include "ctlnav/core/json_io.hpp"
#include "ctlnav/harness/compare.hpp"
#include "ctlnav/harness/curves.hpp"
#include "ctlnav/harness/stats.hpp"
#include "ctlnav/neural/weights_io.hpp"
#include "ctlnav/radiomap/radio_map.hpp"
#include "ctlnav/transfer/ctl.hpp"

namespace ctlnav {

namespace fs = std::filesystem;

inline std::string seed_dir_name(std::uint64_t seed) { return "seed_" + std::to_string(seed); }

// Writes radio_map.json and city.json; returns the summary printed on stdout.
inline nlohmann::json cmd_map(const EnvConfig& cfg, const fs::path& out)
{
    fs::create_directories(out);
    const World w = build_world(cfg);
    save_radio_map((out / "radio_map.json").string(), *w.radio_map);
    write_json_file((out / "city.json").string(), to_json(w.city), 2);
    std::vector<double> finite;
    for (double v : w.radio_map->sinr_db)
        if (std::isfinite(v))
            finite.push_back(v);
    nlohmann::json s{{"command", "map"},
                     {"env", to_string(cfg.env_id)},
                     {"cells", w.radio_map->sinr_db.size()},
                     {"outage_fraction", w.radio_map->outage_fraction()},
                     {"mean_building_height", mean_building_height(w.city)}};
    if (!finite.empty())
        for (double p : {5.0, 25.0, 50.0, 75.0, 95.0})
            s["sinr_p" + std::to_string(static_cast<int>(p))] = percentile(finite, p);
    return s;
}

// One scratch run per seed under out/seed_N.
inline std::vector<nlohmann::json> cmd_train(const EnvConfig& cfg, const Hyperparams& hp,
                                             const std::vector<std::uint64_t>& seeds, const fs::path& out,
                                             bool deterministic, std::ostream& log)
{
    validate(hp);
    const World w = build_world(cfg);
    std::vector<nlohmann::json> lines;
    for (auto seed : seeds) {
        Agent agent(hp, seed);
        const TrainResult tr = train(agent, *w.env, train_options(hp));
        const auto dir = out / seed_dir_name(seed);
        RunInfo info;
        info.seed = seed;
        info.deterministic = deterministic;
        persist_run(dir, agent, tr, cfg, info);
        write_curves_csv((dir / "curves.csv").string(), make_curves(tr.records, hp.success_window));
        nlohmann::json line{{"command", "train"},
                            {"seed", seed},
                            {"episodes", tr.records.size()},
                            {"converged_episode", detail::opt_json(tr.converged_episode)},
                            {"dir", dir.string()}};
        log << line.dump() << '\n' << std::flush;
        lines.push_back(std::move(line));
    }
    return lines;
}

inline std::vector<nlohmann::json> cmd_transfer(const TransferPlan& plan, const std::vector<std::uint64_t>& seeds,
                                                const fs::path& out, std::ostream& log)
{
    std::vector<nlohmann::json> lines;
    for (auto seed : seeds) {
        const auto results = run_ctl(plan, seed, out / seed_dir_name(seed));
        for (const auto& r : results) {
            nlohmann::json line{{"command", "transfer"},
                                {"seed", seed},
                                {"stage", r.stage_index + 1},
                                {"name", r.name},
                                {"transferred", r.transferred},
                                {"converged_episode", detail::opt_json(r.episodes_to_convergence)},
                                {"final_success_rate", r.final_success_rate},
                                {"checkpoint", r.checkpoint_path}};
            log << line.dump() << '\n' << std::flush;
            lines.push_back(std::move(line));
        }
    }
    return lines;
}

// Treatment arm: the plan as written. Baseline arm: scratch training on the
// last stage's environment with the plan's base hyperparameters.
inline ComparisonReport cmd_compare(const TransferPlan& plan, const std::vector<std::uint64_t>& seeds,
                                    const fs::path& out, std::ostream& log)
{
    const StageSpec& last = plan.stages.back();
    const EnvConfig target_env = effective_env(last);
    const Hyperparams base_hp = hyperparams_from_json(last.hyperparams, plan.base);
    const World w = build_world(target_env);

    std::vector<SeedOutcome> outcomes;
    std::vector<Curves> base_curves, treat_curves;
    for (auto seed : seeds) {
        SeedOutcome o;
        o.seed = seed;

        Agent scratch(base_hp, seed);
        const TrainResult tr = train(scratch, *w.env, train_options(base_hp));
        RunInfo info;
        info.seed = seed;
        info.kind = "baseline";
        persist_run(out / "baseline" / seed_dir_name(seed), scratch, tr, target_env, info);
        o.baseline = tr.converged_episode;
        base_curves.push_back(make_curves(tr.records, base_hp.success_window));

        const auto stages = run_ctl(plan, seed, out / "treatment" / seed_dir_name(seed));
        o.treatment = stages.back().episodes_to_convergence;
        treat_curves.push_back(make_curves(stages.back().records, stages.back().hyperparams.success_window));

        log << nlohmann::json{{"command", "compare"},
                              {"seed", seed},
                              {"baseline", detail::opt_json(o.baseline)},
                              {"treatment", detail::opt_json(o.treatment)}}
                   .dump()
            << '\n'
            << std::flush;
        outcomes.push_back(o);
    }
    ComparisonReport report = compare_arms(std::move(outcomes));
    fs::create_directories(out);
    write_json_file((out / "report.json").string(), to_json(report), 2);
    write_arm_curves_csv((out / "baseline_curves.csv").string(), base_curves);
    write_arm_curves_csv((out / "treatment_curves.csv").string(), treat_curves);
    return report;
}

// Greedy rollouts of a checkpoint. n_starts == 0 evaluates every start cell;
// otherwise starts are drawn uniformly from the start region with `seed`.
inline nlohmann::json cmd_eval(const std::string& checkpoint, const EnvConfig& cfg, int n_starts, std::uint64_t seed,
                               const fs::path& out)
{
    const World w = build_world(cfg);
    const NetworkParams net = load_weights(checkpoint);
    if (net.input_size() != kObservationSize || net.output_size() != kNumActions)
        throw ShapeError("checkpoint is not a 4-input, 4-action Q-network");
    std::vector<Vec2> starts;
    if (n_starts <= 0) {
        starts = w.env->start_cells();
    } else {
        std::mt19937_64 rng(seed);
        for (int i = 0; i < n_starts; ++i)
            starts.push_back(w.env->reset(rng).position);
    }
    fs::create_directories(out);
    nlohmann::json rows = nlohmann::json::array();
    int arrived = 0, outage_ok = 0, steps_ok = 0;
    for (std::size_t i = 0; i < starts.size(); ++i) {
        const Rollout r = greedy_rollout(net, *w.env, starts[i]);
        write_trajectory_csv((out / ("trajectory_" + std::to_string(i) + ".csv")).string(), r);
        arrived += r.report.arrived;
        outage_ok += r.report.outage_ok;
        steps_ok += r.report.steps_ok;
        rows.push_back({{"start", {starts[i].x, starts[i].y}},
                        {"steps", r.report.steps},
                        {"outage_count", r.report.outage_count},
                        {"final_distance", r.report.final_distance},
                        {"arrived", r.report.arrived},
                        {"outage_ok", r.report.outage_ok},
                        {"steps_ok", r.report.steps_ok},
                        {"altitude_ok", r.report.altitude_ok}});
    }
    const double n = static_cast<double>(starts.size());
    nlohmann::json summary{{"command", "eval"},
                           {"starts", starts.size()},
                           {"arrived_rate", arrived / n},
                           {"outage_ok_rate", outage_ok / n},
                           {"steps_ok_rate", steps_ok / n}};
    write_json_file((out / "eval.json").string(), {{"summary", summary}, {"rollouts", rows}}, 2);
    return summary;
}

// curves.csv for a persisted run directory.
inline nlohmann::json cmd_curves(const fs::path& run_dir, int window)
{
    const Curves c = curves_from_run_dir(run_dir.string(), window);
    write_curves_csv((run_dir / "curves.csv").string(), c);
    return {{"command", "curves"}, {"episodes", c.reward.size()}, {"path", (run_dir / "curves.csv").string()}};
}

} // namespace ctlnav
