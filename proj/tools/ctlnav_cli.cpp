#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ctlnav/core/version.hpp"
#include "ctlnav/harness/commands.hpp"
#include "ctlnav/harness/profiles.hpp"

using namespace ctlnav;

namespace {

// "1,2,5" or "1-5" or a mix of both.
std::vector<std::uint64_t> parse_seeds(const std::string& text)
{
    std::vector<std::uint64_t> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (item.empty())
            throw ParseError("empty entry in --seeds");
        std::size_t used = 0;
        const auto dash = item.find('-');
        try {
            if (dash == std::string::npos) {
                out.push_back(std::stoull(item, &used));
                if (used != item.size())
                    throw ParseError("bad seed '" + item + "'");
            } else {
                const auto lo = std::stoull(item.substr(0, dash));
                const auto hi = std::stoull(item.substr(dash + 1));
                if (hi < lo)
                    throw ParseError("bad seed range '" + item + "'");
                for (auto s = lo; s <= hi; ++s)
                    out.push_back(s);
            }
        } catch (const std::logic_error&) {
            throw ParseError("bad seed '" + item + "'");
        }
        if (comma == std::string::npos)
            break;
        pos = comma + 1;
    }
    return out;
}

void print_error(const char* kind, const std::string& message)
{
    std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << '\n';
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"UAV connectivity-aware navigation with deep Q-learning and transfer"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    std::string config, seeds_text = "1", out = "out", algo = "ddqn", profile_text = "desk", env_text = "env1";
    std::string scenario_text = "standard", checkpoint, run_dir;
    bool deterministic = false;
    int starts = 100, window = 50;
    std::uint64_t eval_seed = 1;

    auto add_common = [&](CLI::App* c) {
        c->add_option("--config", config, "environment config or transfer plan (JSON)");
        c->add_option("--seeds", seeds_text, "seed list, e.g. 1,2,3 or 1-5");
        c->add_option("--out", out, "output directory");
        c->add_option("--profile", profile_text, "paper or desk")->check(CLI::IsMember({"paper", "desk"}));
        c->add_flag("--deterministic", deterministic, "record the run as deterministic (single-threaded)");
    };
    auto add_env = [&](CLI::App* c) {
        c->add_option("--env", env_text, "env1, env2 or env3 when no --config is given");
        c->add_option("--scenario", scenario_text, "standard or emergency")
            ->check(CLI::IsMember({"standard", "emergency"}));
    };

    auto* map = app.add_subcommand("map", "build a radio map");
    add_common(map);
    add_env(map);
    auto* trn = app.add_subcommand("train", "train from scratch");
    add_common(trn);
    add_env(trn);
    trn->add_option("--algo", algo, "dqn or ddqn")->check(CLI::IsMember({"dqn", "ddqn"}));
    auto* tfr = app.add_subcommand("transfer", "run a transfer plan");
    add_common(tfr);
    auto* cmp = app.add_subcommand("compare", "transfer plan against scratch training");
    add_common(cmp);
    auto* evl = app.add_subcommand("eval", "greedy rollouts of a checkpoint");
    add_common(evl);
    add_env(evl);
    evl->add_option("--checkpoint", checkpoint, "weights file")->required();
    evl->add_option("--starts", starts, "number of random starts; 0 for every start cell");
    evl->add_option("--eval-seed", eval_seed, "seed for drawing starts");
    auto* crv = app.add_subcommand("curves", "moving-average curves of a run directory");
    crv->add_option("--run", run_dir, "run directory holding metrics.csv and sinr.csv")->required();
    crv->add_option("--window", window, "moving-average window");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error("UsageError", e.what());
        return 2;
    }

    try {
        const Profile profile = profile_from_string(profile_text);
        const auto env_config = [&] {
            if (!config.empty())
                return env_config_from_json(read_json_file(config));
            const Scenario sc = scenario_text == "emergency" ? Scenario::emergency : Scenario::standard;
            return make_env_config(env_id_from_string(env_text), profile, sc);
        };
        const auto plan = [&] {
            if (config.empty())
                throw ParseError("--config with a transfer plan is required");
            return transfer_plan_from_json(read_json_file(config), fs::path(config).parent_path(),
                                           profile_hyperparams(profile));
        };

        if (*map) {
            std::cout << cmd_map(env_config(), out).dump() << '\n';
        } else if (*trn) {
            cmd_train(env_config(), profile_hyperparams(profile, algorithm_from_string(algo)), parse_seeds(seeds_text),
                      out, deterministic, std::cout);
        } else if (*tfr) {
            cmd_transfer(plan(), parse_seeds(seeds_text), out, std::cout);
        } else if (*cmp) {
            const auto report = cmd_compare(plan(), parse_seeds(seeds_text), out, std::cout);
            std::cout << to_json(report).dump() << '\n';
        } else if (*evl) {
            std::cout << cmd_eval(checkpoint, env_config(), starts, eval_seed, out).dump() << '\n';
        } else if (*crv) {
            std::cout << cmd_curves(run_dir, window).dump() << '\n';
        }
    } catch (const ParseError& e) {
        print_error("ParseError", e.what());
        return 2;
    } catch (const ShapeError& e) {
        print_error("ShapeError", e.what());
        return 2;
    } catch (const DomainError& e) {
        print_error("DomainError", e.what());
        return 3;
    } catch (const std::exception& e) {
        print_error("Error", e.what());
        return 1;
    }
    return 0;
}
