#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctlnav/agent/metrics_io.hpp"
#include "ctlnav/agent/training.hpp"
#include "ctlnav/harness/stats.hpp"

namespace ctlnav {

struct SeedOutcome {
    std::uint64_t seed = 0;
    std::optional<int> baseline;  // episodes to convergence, none if it never converged
    std::optional<int> treatment;
};

struct ComparisonReport {
    std::vector<SeedOutcome> seeds;
    int paired = 0; // seeds where both arms converged
    std::optional<double> median_baseline;
    std::optional<double> median_treatment;
    std::optional<double> median_delta; // baseline - treatment, per seed
    std::optional<double> speedup;      // (median_baseline - median_treatment) / median_baseline
    int treatment_no_later = 0;         // treatment converged and baseline did not, or did later or equal
    std::vector<std::uint64_t> excluded; // seeds missing from the medians
};

inline ComparisonReport compare_arms(std::vector<SeedOutcome> seeds)
{
    ComparisonReport r;
    std::vector<double> base, treat, delta;
    for (const auto& s : seeds) {
        if (s.treatment && (!s.baseline || *s.treatment <= *s.baseline))
            ++r.treatment_no_later;
        if (s.baseline && s.treatment) {
            base.push_back(*s.baseline);
            treat.push_back(*s.treatment);
            delta.push_back(*s.baseline - *s.treatment);
        } else {
            r.excluded.push_back(s.seed);
        }
    }
    r.paired = static_cast<int>(base.size());
    if (r.paired > 0) {
        r.median_baseline = median(base);
        r.median_treatment = median(treat);
        r.median_delta = median(delta);
        if (*r.median_baseline > 0.0)
            r.speedup = (*r.median_baseline - *r.median_treatment) / *r.median_baseline;
    }
    r.seeds = std::move(seeds);
    return r;
}

// First 1-based episode at which the trailing window met the threshold.
inline std::optional<int> convergence_episode(const std::vector<EpisodeRecord>& records, int window, double threshold)
{
    if (window < 1)
        throw DomainError("success window must be >= 1");
    int successes = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        successes += records[i].success ? 1 : 0;
        if (i >= static_cast<std::size_t>(window))
            successes -= records[i - static_cast<std::size_t>(window)].success ? 1 : 0;
        if (i + 1 >= static_cast<std::size_t>(window) && static_cast<double>(successes) / window >= threshold)
            return static_cast<int>(i) + 1;
    }
    return std::nullopt;
}

namespace detail {
template <class T>
nlohmann::json opt_json(const std::optional<T>& v)
{
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}
} // namespace detail

inline nlohmann::json to_json(const ComparisonReport& r)
{
    nlohmann::json seeds = nlohmann::json::array();
    for (const auto& s : r.seeds)
        seeds.push_back({{"seed", s.seed},
                         {"baseline", detail::opt_json(s.baseline)},
                         {"treatment", detail::opt_json(s.treatment)}});
    return {{"seeds", seeds},
            {"paired", r.paired},
            {"median_baseline", detail::opt_json(r.median_baseline)},
            {"median_treatment", detail::opt_json(r.median_treatment)},
            {"median_delta", detail::opt_json(r.median_delta)},
            {"speedup_percent", r.speedup ? nlohmann::json(100.0 * *r.speedup) : nlohmann::json(nullptr)},
            {"treatment_no_later", r.treatment_no_later},
            {"excluded_seeds", r.excluded}};
}

} // namespace ctlnav
