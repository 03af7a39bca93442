#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "ctlnav/agent/metrics_io.hpp"
#include "ctlnav/agent/training.hpp"
#include "ctlnav/harness/stats.hpp"

namespace ctlnav {

// Trailing moving averages of one run, indexed by episode - 1.
struct Curves {
    std::vector<double> reward;
    std::vector<double> success;
    std::vector<double> sinr_db;
};

inline Curves make_curves(const std::vector<EpisodeRecord>& records, int window)
{
    std::vector<double> r, s, q;
    for (const auto& e : records) {
        r.push_back(e.total_reward);
        s.push_back(e.success ? 1.0 : 0.0);
        q.push_back(e.mean_sinr_db);
    }
    return {moving_average(r, window), moving_average(s, window), moving_average(q, window)};
}

inline void write_curves_csv(const std::string& path, const Curves& c)
{
    std::ofstream out(path);
    if (!out)
        throw ParseError("cannot write " + path);
    out << "episode,reward_ma,success_ma,sinr_ma\n";
    for (std::size_t i = 0; i < c.reward.size(); ++i)
        out << i + 1 << ',' << detail::format_double(c.reward[i]) << ',' << detail::format_double(c.success[i]) << ','
            << detail::format_double(c.sinr_db[i]) << '\n';
}

// Mean and population standard deviation across runs per episode. Runs that
// stopped early drop out of later rows; n says how many remain.
inline void write_arm_curves_csv(const std::string& path, const std::vector<Curves>& runs)
{
    std::ofstream out(path);
    if (!out)
        throw ParseError("cannot write " + path);
    out << "episode,n,reward_mean,reward_sd,success_mean,success_sd,sinr_mean,sinr_sd\n";
    std::size_t longest = 0;
    for (const auto& c : runs)
        longest = std::max(longest, c.reward.size());
    for (std::size_t i = 0; i < longest; ++i) {
        std::vector<double> r, s, q;
        for (const auto& c : runs) {
            if (i < c.reward.size()) {
                r.push_back(c.reward[i]);
                s.push_back(c.success[i]);
                q.push_back(c.sinr_db[i]);
            }
        }
        out << i + 1 << ',' << r.size();
        for (const auto* v : {&r, &s, &q})
            out << ',' << detail::format_double(mean(*v)) << ',' << detail::format_double(std::sqrt(variance(*v)));
        out << '\n';
    }
}

// Rebuilds the curves of a persisted run from its metrics.csv and sinr.csv.
inline Curves curves_from_run_dir(const std::string& dir, int window)
{
    auto records = read_metrics_csv(dir + "/metrics.csv");
    const auto sinr = read_sinr_csv(dir + "/sinr.csv");
    if (sinr.size() != records.size())
        throw ParseError("metrics.csv and sinr.csv disagree on episode count in " + dir);
    for (std::size_t i = 0; i < records.size(); ++i)
        records[i].mean_sinr_db = sinr[i];
    return make_curves(records, window);
}

} // namespace ctlnav
