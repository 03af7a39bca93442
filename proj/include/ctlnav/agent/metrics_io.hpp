#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ctlnav/agent/training.hpp"
#include "ctlnav/core/errors.hpp"

namespace ctlnav {

inline constexpr const char* kMetricsHeader = "episode,total_reward,steps,success,outage_count,epsilon";

namespace detail {

inline std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

inline void write_metrics_csv(const std::string& path, const std::vector<EpisodeRecord>& records)
{
    std::ofstream out(path);
    if (!out)
        throw ParseError("cannot write " + path);
    out << kMetricsHeader << '\n';
    for (const auto& r : records)
        out << r.episode << ',' << detail::format_double(r.total_reward) << ',' << r.steps << ','
            << (r.success ? 1 : 0) << ',' << r.outage_count << ',' << detail::format_double(r.epsilon) << '\n';
}

// Mean per-step SINR lives beside the metrics file: episode,mean_sinr_db.
inline void write_sinr_csv(const std::string& path, const std::vector<EpisodeRecord>& records)
{
    std::ofstream out(path);
    if (!out)
        throw ParseError("cannot write " + path);
    out << "episode,mean_sinr_db\n";
    for (const auto& r : records)
        out << r.episode << ',' << detail::format_double(r.mean_sinr_db) << '\n';
}

inline std::vector<std::vector<std::string>> read_csv(const std::string& path, const std::string& expected_header)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != expected_header)
        throw ParseError(path + ": unexpected CSV header");
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        rows.push_back(std::move(cells));
    }
    return rows;
}

inline std::vector<EpisodeRecord> read_metrics_csv(const std::string& path)
{
    std::vector<EpisodeRecord> records;
    try {
        for (const auto& c : read_csv(path, kMetricsHeader)) {
            if (c.size() != 6)
                throw ParseError(path + ": metrics row needs 6 columns");
            EpisodeRecord r;
            r.episode = std::stoi(c[0]);
            r.total_reward = std::stod(c[1]);
            r.steps = std::stoi(c[2]);
            r.success = c[3] == "1";
            r.outage_count = std::stoi(c[4]);
            r.epsilon = std::stod(c[5]);
            records.push_back(r);
        }
    } catch (const std::logic_error& e) {
        throw ParseError(path + ": bad number: " + e.what());
    }
    return records;
}

inline std::vector<double> read_sinr_csv(const std::string& path)
{
    std::vector<double> values;
    for (const auto& c : read_csv(path, "episode,mean_sinr_db")) {
        if (c.size() != 2)
            throw ParseError(path + ": sinr row needs 2 columns");
        values.push_back(std::stod(c[1]));
    }
    return values;
}

inline void write_trajectory_csv(const std::string& path, const Rollout& r)
{
    std::ofstream out(path);
    if (!out)
        throw ParseError("cannot write " + path);
    out << "step,x,y,sinr_db,outage\n";
    for (std::size_t i = 0; i < r.trajectory.size(); ++i)
        out << i << ',' << detail::format_double(r.trajectory[i].x) << ',' << detail::format_double(r.trajectory[i].y)
            << ',' << detail::format_double(r.sinr_db[i]) << ',' << (r.outage[i] ? 1 : 0) << '\n';
}

} // namespace ctlnav
