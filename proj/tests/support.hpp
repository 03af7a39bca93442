#pragma once

// Fixtures and independent oracles shared by the unit and acceptance tests.
// The oracles avoid the library's radio code paths on purpose.

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "ctlnav/cityworld/env_config.hpp"
#include "ctlnav/cityworld/mdp.hpp"
#include "ctlnav/neural/mlp.hpp"
#include "ctlnav/radiomap/radio_map.hpp"

namespace ctlnav::fixtures {

inline std::filesystem::path temp_dir(const std::string& name)
{
#ifdef CTLNAV_TEST_TMP
    const std::filesystem::path root = CTLNAV_TEST_TMP;
#else
    const std::filesystem::path root = std::filesystem::temp_directory_path() / "ctlnav_tests";
#endif
    const auto dir = root / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline BaseStation make_bs(double x, double y, double height = 20.0, double rotation = 0.0)
{
    BaseStation bs;
    bs.position = {x, y};
    bs.height = height;
    bs.sector_azimuth_deg = {rotation, rotation + 120.0, rotation + 240.0};
    return bs;
}

// Empty square city with the given stations.
inline CityMap empty_city(double extent, std::vector<BaseStation> stations)
{
    CityMap c;
    c.extent_x = c.extent_y = extent;
    c.base_stations = std::move(stations);
    return c;
}

// Random city: a few boxes of random size and height plus `n_bs` stations.
inline CityMap random_city(std::uint64_t seed, double extent = 1000.0, int n_bs = 3, int n_buildings = 40)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    CityMap c;
    c.extent_x = c.extent_y = extent;
    for (int i = 0; i < n_buildings; ++i) {
        const double w = 20.0 + 60.0 * u(rng), h = 20.0 + 60.0 * u(rng);
        const double x = (extent - w) * u(rng), y = (extent - h) * u(rng);
        c.buildings.push_back({{x, y, x + w, y + h}, 10.0 + 70.0 * u(rng)});
    }
    for (int b = 0; b < n_bs; ++b) {
        auto bs = make_bs(extent * u(rng), extent * u(rng), 5.0 + 20.0 * u(rng), 120.0 * u(rng));
        bs.tx_power_w = 10.0 + 40.0 * u(rng);
        bs.downtilt_deg = 2.0 + 12.0 * u(rng);
        c.base_stations.push_back(bs);
    }
    return c;
}

// LoS by projecting onto the ground plane: the segment is blocked iff over the
// part of it whose footprint lies inside a building's rectangle, the segment's
// height drops to the roof or below.
inline bool oracle_blocked(const Vec3& a, const Vec3& b, const Building& bld)
{
    double lo = 0.0, hi = 1.0;
    const double pa[2] = {a.x, a.y}, pb[2] = {b.x, b.y};
    const double mn[2] = {bld.footprint.x0, bld.footprint.y0}, mx[2] = {bld.footprint.x1, bld.footprint.y1};
    for (int k = 0; k < 2; ++k) {
        const double d = pb[k] - pa[k];
        if (d == 0.0) {
            if (pa[k] < mn[k] || pa[k] > mx[k])
                return false;
            continue;
        }
        const double t1 = (mn[k] - pa[k]) / d, t2 = (mx[k] - pa[k]) / d;
        lo = std::max(lo, std::min(t1, t2));
        hi = std::min(hi, std::max(t1, t2));
        if (lo > hi)
            return false;
    }
    const double z_lo = a.z + (b.z - a.z) * lo, z_hi = a.z + (b.z - a.z) * hi;
    return std::min(z_lo, z_hi) <= bld.height && std::max(z_lo, z_hi) >= 0.0;
}

// 3GPP element pattern plus the closed-form array factor of a uniform
// half-wavelength line array, from explicit unit vectors.
inline double oracle_gain_db(const BaseStation& bs, std::size_t sector, const Vec3& uav, const PropagationParams& p)
{
    const double deg = 180.0 / std::numbers::pi;
    const double dx = uav.x - bs.position.x, dy = uav.y - bs.position.y, dz = uav.z - bs.height;
    const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
    const double zenith = std::acos(dz / r) * deg;
    const double theta = std::clamp(zenith - bs.downtilt_deg, 0.0, 180.0);
    // signed angle between the sector boresight and the horizontal direction
    const double az = bs.sector_azimuth_deg[sector] / deg;
    const double bx = std::cos(az), by = std::sin(az);
    double phi = std::atan2(bx * dy - by * dx, bx * dx + by * dy) * deg;
    if (phi >= 180.0)
        phi -= 360.0;
    const double av = std::min(12.0 * std::pow((theta - 90.0) / p.theta_3db_deg, 2), p.slav_db);
    const double ah = std::min(12.0 * std::pow(phi / p.phi_3db_deg, 2), p.am_db);
    const double element = p.g_max_db - std::min(av + ah, p.am_db);

    const int n = p.n_elements;
    const double psi = std::numbers::pi * std::sin(theta / deg) * std::sin(phi / deg);
    std::complex<double> sum = 0.0;
    for (int k = 0; k < n; ++k)
        sum += std::polar(1.0 / n, psi * k);
    return element + 10.0 * std::log10(1.0 + std::abs(sum));
}

struct OracleSinr {
    double sinr_db;
    int serving_bs;
    int serving_sector;
};

// Straight-line re-implementation summing powers in the linear domain.
inline OracleSinr oracle_sinr(const Vec3& uav, const CityMap& city, const PropagationParams& p)
{
    struct L {
        int b, s;
        double w;
    };
    std::vector<L> links;
    for (std::size_t b = 0; b < city.base_stations.size(); ++b) {
        const auto& bs = city.base_stations[b];
        if (bs.tx_power_w <= 0.0)
            continue;
        const Vec3 ant{bs.position.x, bs.position.y, bs.height};
        bool los = true;
        for (const auto& bld : city.buildings)
            if (oracle_blocked(uav, ant, bld))
                los = false;
        const double d = std::sqrt(std::pow(uav.x - ant.x, 2) + std::pow(uav.y - ant.y, 2) + std::pow(uav.z - ant.z, 2));
        const double loss = los ? p.x_los * std::pow(d, -p.alpha_los) : p.x_nlos * std::pow(d, -p.alpha_nlos);
        for (std::size_t s = 0; s < 3; ++s)
            links.push_back({int(b), int(s), bs.tx_power_w * std::pow(10.0, oracle_gain_db(bs, s, uav, p) / 10.0) * loss});
    }
    OracleSinr r{-std::numeric_limits<double>::infinity(), -1, -1};
    double best = 0.0;
    for (const auto& l : links)
        if (l.w > best) {
            best = l.w;
            r.serving_bs = l.b;
            r.serving_sector = l.s;
        }
    if (r.serving_bs < 0)
        return r;
    double interference = 0.0;
    for (const auto& l : links)
        if (l.b != r.serving_bs)
            interference += l.w;
    r.sinr_db = 10.0 * std::log10(best / (interference + p.n0_w_per_hz * p.bandwidth_hz));
    return r;
}

// Small environment over an empty 200 m city with one station, 10 m cells.
struct SmallWorld {
    CityMap city;
    std::shared_ptr<const RadioMap> map;
    std::shared_ptr<const Environment> env;
};

inline MissionSpec small_mission()
{
    MissionSpec m;
    m.start_region = {0.0, 0.0, 50.0, 50.0};
    m.target = {150.0, 150.0};
    m.max_steps = 50;
    return m;
}

inline SmallWorld small_world(MissionSpec mission = small_mission(), RewardConstants rc = {}, double extent = 200.0)
{
    SmallWorld w;
    w.city = empty_city(extent, {make_bs(extent / 2, extent / 2)});
    w.map = std::make_shared<const RadioMap>(build_radio_map(w.city, PropagationParams{}, 90.0, 10.0));
    w.env = std::make_shared<const Environment>(w.map, mission, rc);
    return w;
}

// Batch MSE over the selected outputs, evaluated with scalar loops. Optionally
// records which hidden units are active so callers can detect kink crossings.
inline double oracle_loss(const NetworkParams& p, const Matrix& x, const std::vector<int>& actions,
                          const std::vector<double>& targets, std::vector<bool>* pattern = nullptr)
{
    double loss = 0.0;
    if (pattern)
        pattern->clear();
    const std::size_t layers = p.weights.size();
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        std::vector<double> a(static_cast<std::size_t>(x.rows()));
        for (Eigen::Index i = 0; i < x.rows(); ++i)
            a[static_cast<std::size_t>(i)] = x(i, j);
        for (std::size_t l = 0; l < layers; ++l) {
            const auto& w = p.weights[l];
            std::vector<double> z(static_cast<std::size_t>(w.rows()));
            for (Eigen::Index r = 0; r < w.rows(); ++r) {
                double acc = p.biases[l](r);
                for (Eigen::Index c = 0; c < w.cols(); ++c)
                    acc += w(r, c) * a[static_cast<std::size_t>(c)];
                z[static_cast<std::size_t>(r)] = acc;
            }
            if (l + 1 < layers)
                for (auto& v : z) {
                    if (pattern)
                        pattern->push_back(v > 0.0);
                    v = v > 0.0 ? v : 0.0;
                }
            a = std::move(z);
        }
        const double e = a[static_cast<std::size_t>(actions[static_cast<std::size_t>(j)])] - targets[static_cast<std::size_t>(j)];
        loss += e * e;
    }
    return loss / static_cast<double>(x.cols());
}

// Pointer to the k-th scalar parameter, weights before biases, layer by layer.
inline double* parameter_at(NetworkParams& p, std::size_t k)
{
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        const auto nw = static_cast<std::size_t>(p.weights[l].size());
        if (k < nw)
            return p.weights[l].data() + k;
        k -= nw;
        const auto nb = static_cast<std::size_t>(p.biases[l].size());
        if (k < nb)
            return p.biases[l].data() + k;
        k -= nb;
    }
    throw std::out_of_range("parameter index");
}

struct GradientCheck {
    double max_rel_error = 0.0;
    std::size_t checked = 0;
    std::size_t skipped = 0; // probes whose +-h step flipped a rectifier
};

// Central differences on `probes` random parameters (all when probes == 0).
inline GradientCheck finite_difference_check(const NetworkParams& p, const NetworkParams& grads, const Matrix& x,
                                             const std::vector<int>& actions, const std::vector<double>& targets,
                                             std::size_t probes, std::uint64_t seed, double h = 1e-5)
{
    GradientCheck out;
    NetworkParams q = p, g = grads;
    const std::size_t n = q.parameter_count();
    std::vector<std::size_t> idx;
    if (probes == 0 || probes >= n) {
        for (std::size_t k = 0; k < n; ++k)
            idx.push_back(k);
    } else {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        for (std::size_t i = 0; i < probes; ++i)
            idx.push_back(pick(rng));
    }
    for (std::size_t k : idx) {
        double* v = parameter_at(q, k);
        const double keep = *v;
        std::vector<bool> pu, pd;
        *v = keep + h;
        const double up = oracle_loss(q, x, actions, targets, &pu);
        *v = keep - h;
        const double down = oracle_loss(q, x, actions, targets, &pd);
        *v = keep;
        if (pu != pd) {
            ++out.skipped;
            continue;
        }
        ++out.checked;
        const double fd = (up - down) / (2.0 * h);
        const double an = *parameter_at(g, k);
        const double rel = std::abs(fd - an) / std::max({1e-6, std::abs(fd), std::abs(an)});
        out.max_rel_error = std::max(out.max_rel_error, rel);
    }
    return out;
}

} // namespace ctlnav::fixtures
