#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>

#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

#include "ctlnav/radiomap/antenna.hpp"
#include "ctlnav/radiomap/fading.hpp"
#include "ctlnav/radiomap/los.hpp"
#include "ctlnav/radiomap/propagation.hpp"
#include "ctlnav/radiomap/radio_map.hpp"
#include "ctlnav/radiomap/sinr.hpp"
#include "support.hpp"

using namespace ctlnav;
using ctlnav::fixtures::empty_city;
using ctlnav::fixtures::make_bs;

namespace {

const double kAf3db = 10.0 * std::log10(2.0); // boresight array gain with unit-norm vectors

// Point seen from `bs` along sector `s` boresight, tilted `downtilt` below the horizon.
Vec3 on_boresight(const BaseStation& bs, std::size_t s, double horizontal)
{
    const double az = deg_to_rad(bs.sector_azimuth_deg[s]);
    const double drop = horizontal * std::tan(deg_to_rad(bs.downtilt_deg));
    return {bs.position.x + horizontal * std::cos(az), bs.position.y + horizontal * std::sin(az), bs.height - drop};
}

} // namespace

// ---- path loss ----

TEST(PathLoss, PowerLawValues)
{
    PropagationParams p;
    EXPECT_DOUBLE_EQ(path_loss(1.0, true, p), p.x_los);
    EXPECT_DOUBLE_EQ(path_loss(100.0, true, p), p.x_los * std::pow(100.0, -2.2));
    EXPECT_DOUBLE_EQ(path_loss(100.0, false, p), p.x_nlos * std::pow(100.0, -3.5));
}

TEST(PathLoss, MonotoneAndNlosBelowLos)
{
    PropagationParams p;
    double prev_l = std::numeric_limits<double>::infinity(), prev_n = prev_l;
    for (double d = 1.0; d < 3000.0; d *= 1.1) {
        const double l = path_loss(d, true, p), n = path_loss(d, false, p);
        EXPECT_LT(l, prev_l);
        EXPECT_LT(n, prev_n);
        EXPECT_LE(n, l);
        prev_l = l;
        prev_n = n;
    }
}

TEST(PathLoss, RejectsNonPositiveDistance)
{
    PropagationParams p;
    EXPECT_THROW(path_loss(0.0, true, p), DomainError);
    EXPECT_THROW(path_loss(-5.0, false, p), DomainError);
    EXPECT_THROW(log_distance_path_loss(0.5, 38.4, 2.2, 1.0), DomainError);
}

TEST(PathLoss, LogDistanceAndSimpleRss)
{
    EXPECT_DOUBLE_EQ(log_distance_path_loss(1.0, 38.4, 2.2, 1.0), 38.4);
    EXPECT_NEAR(log_distance_path_loss(100.0, 38.4, 2.2, 1.0), 38.4 + 44.0, 1e-12);
    BaseStation bs = make_bs(0, 0, 20.0);
    bs.tx_power_w = 1.0; // 30 dBm
    EXPECT_NEAR(simple_rss({100.0, 0.0, 20.0}, bs, 38.4, 2.2, 1.0, -104.0), 30.0 - 82.4 - 104.0, 1e-9);
}

// ---- line of sight ----

TEST(LineOfSight, SegmentThroughBoxIsBlocked)
{
    const Vec3 lo{10, 10, 0}, hi{20, 20, 50};
    EXPECT_TRUE(segment_hits_box({0, 15, 10}, {30, 15, 10}, lo, hi));
    EXPECT_FALSE(segment_hits_box({0, 15, 60}, {30, 15, 60}, lo, hi));
    EXPECT_FALSE(segment_hits_box({0, 0, 10}, {5, 30, 10}, lo, hi));
    // ends before reaching the box
    EXPECT_FALSE(segment_hits_box({0, 15, 10}, {9, 15, 10}, lo, hi));
}

TEST(LineOfSight, BoundaryContactCountsAsBlocked)
{
    const Vec3 lo{10, 10, 0}, hi{20, 20, 50};
    // grazes the roof plane exactly
    EXPECT_TRUE(segment_hits_box({0, 15, 50}, {30, 15, 50}, lo, hi));
    // runs along a wall face
    EXPECT_TRUE(segment_hits_box({10, 0, 10}, {10, 30, 10}, lo, hi));
    // touches the vertical edge at (10, 10) only
    EXPECT_TRUE(segment_hits_box({0, 20, 10}, {20, 0, 10}, lo, hi));
    // ends exactly on a roof corner
    EXPECT_TRUE(segment_hits_box({20, 20, 100}, {20, 20, 50}, lo, hi));
    EXPECT_FALSE(segment_hits_box({20, 20, 100}, {20, 20, 50.001}, lo, hi));
}

TEST(LineOfSight, AgreesWithProjectionOracle)
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const CityMap city = fixtures::random_city(seed, 500.0, 2, 60);
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(0.0, 500.0), z(0.0, 100.0);
        for (int i = 0; i < 2000; ++i) {
            const Vec3 a{u(rng), u(rng), z(rng)}, b{u(rng), u(rng), z(rng)};
            bool blocked = false;
            for (const auto& bld : city.buildings)
                blocked = blocked || fixtures::oracle_blocked(a, b, bld);
            ASSERT_EQ(is_los(a, b, city), !blocked);
        }
    }
}

TEST(LineOfSight, DenseSamplingNeverSeesThroughABlockedVerdict)
{
    // Any sample strictly inside a box along the segment forces a blocked verdict.
    const CityMap city = fixtures::random_city(11, 500.0, 2, 60);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 500.0), z(0.0, 100.0);
    int blocked_by_samples = 0;
    for (int i = 0; i < 1000; ++i) {
        const Vec3 a{u(rng), u(rng), z(rng)}, b{u(rng), u(rng), z(rng)};
        bool inside = false;
        for (int k = 0; k <= 2000 && !inside; ++k) {
            const double t = k / 2000.0;
            const Vec3 q{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y), a.z + t * (b.z - a.z)};
            for (const auto& bld : city.buildings)
                if (q.x > bld.footprint.x0 && q.x < bld.footprint.x1 && q.y > bld.footprint.y0 &&
                    q.y < bld.footprint.y1 && q.z < bld.height)
                    inside = true;
        }
        if (inside) {
            ++blocked_by_samples;
            EXPECT_FALSE(is_los(a, b, city));
        }
    }
    EXPECT_GT(blocked_by_samples, 50);
}

// ---- antenna ----

TEST(Antenna, ElementPatternPeakAndBound)
{
    PropagationParams p;
    EXPECT_DOUBLE_EQ(element_pattern(90.0, 0.0, p), p.g_max_db);
    for (double th = 0.0; th <= 180.0; th += 2.5)
        for (double ph = -180.0; ph < 180.0; ph += 2.5) {
            const double g = element_pattern(th, ph, p);
            ASSERT_LE(g, p.g_max_db);
            ASSERT_GE(g, p.g_max_db - p.am_db);
        }
}

TEST(Antenna, ElementPatternHandValues)
{
    PropagationParams p;
    // half-power beamwidth: 12 * (1/2)^2 = 3 dB down at +-32.5 degrees
    EXPECT_NEAR(element_pattern(90.0, 32.5, p), 8.0 - 3.0, 1e-12);
    EXPECT_NEAR(element_pattern(90.0 + 32.5, 0.0, p), 8.0 - 3.0, 1e-12);
    EXPECT_NEAR(element_pattern(90.0 + 32.5, 32.5, p), 8.0 - 6.0, 1e-12);
    // both planes saturate, total attenuation capped at Am
    EXPECT_NEAR(element_pattern(0.0, 179.0, p), 8.0 - 30.0, 1e-12);
}

TEST(Antenna, ArrayFactorNonNegativeAndBoresightValue)
{
    PropagationParams p;
    const auto w = boresight_weights(p.n_elements);
    EXPECT_NEAR(array_factor(steering_vector(90.0, 0.0, p.n_elements), w), kAf3db, 1e-12);
    for (double th = 0.0; th <= 180.0; th += 5.0)
        for (double ph = -180.0; ph < 180.0; ph += 5.0) {
            const double af = array_factor(steering_vector(th, ph, p.n_elements), w);
            ASSERT_GE(af, 0.0);
            ASSERT_LE(af, kAf3db + 1e-12);
        }
}

TEST(Antenna, ArrayFactorLengthMismatch)
{
    EXPECT_THROW(array_factor(steering_vector(90.0, 0.0, 8), boresight_weights(4)), ShapeError);
}

TEST(Antenna, BoresightGainIsPeakPlusArrayGain)
{
    PropagationParams p;
    const BaseStation bs = make_bs(500, 500, 20.0, 30.0);
    for (std::size_t s = 0; s < 3; ++s) {
        const Vec3 target = on_boresight(bs, s, 300.0);
        const auto ang = sector_angles(bs, s, target);
        EXPECT_NEAR(ang.theta_deg, 90.0, 1e-9);
        EXPECT_NEAR(ang.phi_deg, 0.0, 1e-9);
        EXPECT_NEAR(antenna_gain(bs, s, target, p), p.g_max_db + kAf3db, 1e-9);
    }
}

TEST(Antenna, RotationInvariance)
{
    PropagationParams p;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double delta = 180.0 * u(rng);
        BaseStation a = make_bs(0, 0, 20.0, 10.0), b = make_bs(0, 0, 20.0, 10.0 + delta);
        const Vec3 uav{400.0 * u(rng), 400.0 * u(rng), 90.0};
        const double c = std::cos(deg_to_rad(delta)), s = std::sin(deg_to_rad(delta));
        const Vec3 rotated{c * uav.x - s * uav.y, s * uav.x + c * uav.y, uav.z};
        for (std::size_t k = 0; k < 3; ++k)
            ASSERT_NEAR(antenna_gain(a, k, uav, p), antenna_gain(b, k, rotated, p), 1e-9);
    }
}

TEST(Antenna, MatchesSphericalAngleOracle)
{
    PropagationParams p;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        BaseStation bs = make_bs(1000.0 * u(rng), 1000.0 * u(rng), 5.0 + 20.0 * u(rng), 360.0 * u(rng));
        bs.downtilt_deg = 15.0 * u(rng);
        const Vec3 uav{1000.0 * u(rng), 1000.0 * u(rng), 30.0 + 100.0 * u(rng)};
        for (std::size_t s = 0; s < 3; ++s)
            ASSERT_NEAR(antenna_gain(bs, s, uav, p), fixtures::oracle_gain_db(bs, s, uav, p), 1e-9);
    }
}

TEST(Antenna, SectorIndexOutOfRange)
{
    EXPECT_THROW(sector_angles(make_bs(0, 0), 3, {10, 10, 90}), std::out_of_range);
}

// ---- fading ----

TEST(Fading, LargeShapeConcentratesAtOne)
{
    std::mt19937_64 rng(1);
    double s = 0.0, s2 = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double f = sample_fading(1e4, rng);
        s += f;
        s2 += f * f;
    }
    const double mean = s / n;
    EXPECT_NEAR(mean, 1.0, 1e-3);
    EXPECT_LT(s2 / n - mean * mean, 1e-3);
}

TEST(Fading, UnitMeanForSeveralShapes)
{
    for (double m : {0.5, 1.0, 3.0}) {
        std::mt19937_64 rng(static_cast<std::uint64_t>(m * 10));
        double s = 0.0;
        for (int i = 0; i < 100000; ++i)
            s += sample_fading(m, rng);
        EXPECT_NEAR(s / 100000.0, 1.0, 0.02) << "m = " << m;
    }
}

TEST(Fading, KolmogorovSmirnovAgainstGammaCdf)
{
    for (double m : {0.5, 1.0, 3.0}) {
        std::mt19937_64 rng(42);
        std::vector<double> x(100000);
        for (auto& v : x)
            v = sample_fading(m, rng);
        std::sort(x.begin(), x.end());
        double ks = 0.0;
        const double n = static_cast<double>(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double cdf = boost::math::gamma_p(m, m * x[i]);
            ks = std::max({ks, std::abs(cdf - i / n), std::abs((i + 1) / n - cdf)});
        }
        EXPECT_LT(ks, 0.01) << "m = " << m;
    }
}

TEST(Fading, RejectsInvalidShape)
{
    std::mt19937_64 rng(1);
    EXPECT_THROW(sample_fading(0.3, rng), DomainError);
    EXPECT_THROW(sample_fading(std::nan(""), rng), DomainError);
}

// ---- SINR ----

TEST(Sinr, SignalEqualToNoiseGivesZeroDb)
{
    PropagationParams p;
    const CityMap city = empty_city(1000.0, {make_bs(500, 500)});
    const Vec3 uav{700, 520, 90};
    const auto first = sinr_at(uav, city, p);
    EXPECT_EQ(first.interference_w, 0.0);
    p.n0_w_per_hz = first.signal_w / p.bandwidth_hz;
    EXPECT_NEAR(sinr_at(uav, city, p).sinr_db, 0.0, 1e-9);
}

TEST(Sinr, IdenticalColocatedStations)
{
    PropagationParams p;
    const CityMap city = empty_city(1000.0, {make_bs(500, 500), make_bs(500, 500)});
    const Vec3 uav{800, 450, 90};
    const auto r = sinr_at(uav, city, p);
    EXPECT_EQ(r.serving_bs, 0); // tie goes to the lower index
    // the twin's serving-sector copy alone already matches the signal
    EXPECT_GE(r.interference_w, r.signal_w);
    EXPECT_LT(r.sinr_db, 0.0);
    EXPECT_NEAR(r.sinr_db, linear_to_db(r.signal_w / (r.interference_w + r.noise_w)), 1e-12);
}

TEST(Sinr, MatchesLinearDomainOracle)
{
    PropagationParams p;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const CityMap city = fixtures::random_city(seed, 1000.0, 3, 40);
        std::mt19937_64 rng(seed + 100);
        std::uniform_real_distribution<double> u(0.0, 1000.0);
        for (int i = 0; i < 300; ++i) {
            const Vec3 uav{u(rng), u(rng), 90.0};
            const auto r = sinr_at(uav, city, p);
            const auto o = fixtures::oracle_sinr(uav, city, p);
            ASSERT_NEAR(r.sinr_db, o.sinr_db, 1e-9);
            ASSERT_EQ(r.serving_bs, o.serving_bs);
            ASSERT_EQ(r.serving_sector, o.serving_sector);
        }
    }
}

TEST(Sinr, InvariantUnderStationPermutation)
{
    PropagationParams p;
    CityMap city = fixtures::random_city(7, 1000.0, 4, 30);
    CityMap perm = city;
    std::reverse(perm.base_stations.begin(), perm.base_stations.end());
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1000.0);
    for (int i = 0; i < 300; ++i) {
        const Vec3 uav{u(rng), u(rng), 90.0};
        const auto a = sinr_at(uav, city, p), b = sinr_at(uav, perm, p);
        ASSERT_NEAR(a.sinr_db, b.sinr_db, 1e-9);
        ASSERT_EQ(a.serving_bs, 3 - b.serving_bs);
    }
}

TEST(Sinr, OutOfBoundsThrows)
{
    const CityMap city = empty_city(1000.0, {make_bs(500, 500)});
    EXPECT_THROW(sinr_at({-1, 10, 90}, city, PropagationParams{}), DomainError);
    EXPECT_THROW(sinr_at({10, 1000.5, 90}, city, PropagationParams{}), DomainError);
}

TEST(Sinr, SampledModeDiffersButDeterministicModeIgnoresRng)
{
    PropagationParams p;
    const CityMap city = fixtures::random_city(3, 1000.0, 3, 20);
    const Vec3 uav{400, 600, 90};
    std::mt19937_64 r1(1), r2(1);
    EXPECT_EQ(sinr_at(uav, city, p, FadingMode::deterministic, r1).sinr_db, sinr_at(uav, city, p).sinr_db);
    const double s1 = sinr_at(uav, city, p, FadingMode::sampled, r2).sinr_db;
    const double s2 = sinr_at(uav, city, p, FadingMode::sampled, r2).sinr_db;
    EXPECT_NE(s1, s2);
}

TEST(Sinr, SimpleBackendUsesLogDistanceModel)
{
    PropagationParams p;
    p.backend = PropagationBackend::simple;
    BaseStation bs = make_bs(0, 0, 20.0);
    const CityMap city = empty_city(1000.0, {bs});
    const Vec3 uav{300, 400, 20};
    const auto r = sinr_at(uav, city, p);
    const double rx_dbm = watts_to_dbm(bs.tx_power_w) - (38.4 + 22.0 * std::log10(500.0));
    EXPECT_NEAR(r.sinr_db, rx_dbm - p.simple_sigma2_dbm, 1e-9);
}

TEST(Outage, InclusiveThreshold)
{
    EXPECT_TRUE(outage(0.0, 0.0));
    EXPECT_FALSE(outage(0.001, 0.0));
    EXPECT_TRUE(outage(-30.0, 0.0));
    EXPECT_TRUE(outage(-std::numeric_limits<double>::infinity(), 0.0));
    EXPECT_TRUE(outage(std::nan(""), 0.0));
}

// ---- radio map ----

TEST(RadioMapBuild, EveryCellEqualsPointQuery)
{
    PropagationParams p;
    const CityMap city = fixtures::random_city(4, 500.0, 3, 25);
    const RadioMap m = build_radio_map(city, p, 90.0, 10.0);
    ASSERT_EQ(m.nx, 50u);
    ASSERT_EQ(m.ny, 50u);
    for (std::size_t iy = 0; iy < m.ny; ++iy)
        for (std::size_t ix = 0; ix < m.nx; ++ix) {
            const Vec2 c = m.cell_center(ix, iy);
            const double v = sinr_at(Vec3{c.x, c.y, 90.0}, city, p).sinr_db;
            ASSERT_EQ(m.sinr_db[m.index(ix, iy)], v);
            ASSERT_EQ(m.outage[m.index(ix, iy)] != 0, v <= 0.0);
        }
}

TEST(RadioMapBuild, PureFunction)
{
    const CityMap city = fixtures::random_city(8, 300.0, 2, 10);
    const RadioMap a = build_radio_map(city, PropagationParams{}, 90.0, 10.0);
    const RadioMap b = build_radio_map(city, PropagationParams{}, 90.0, 10.0);
    ASSERT_EQ(a.sinr_db.size(), b.sinr_db.size());
    EXPECT_EQ(0, std::memcmp(a.sinr_db.data(), b.sinr_db.data(), a.sinr_db.size() * sizeof(double)));
    EXPECT_EQ(a.outage, b.outage);
}

TEST(RadioMapBuild, InterferenceLimitedIgnoresPowerScale)
{
    PropagationParams p;
    CityMap city = fixtures::random_city(12, 1000.0, 4, 20);
    for (auto& bs : city.base_stations)
        bs.tx_power_w = 40.0;
    CityMap doubled = city;
    for (auto& bs : doubled.base_stations)
        bs.tx_power_w *= 2.0;
    const RadioMap a = build_radio_map(city, p, 90.0, 50.0), b = build_radio_map(doubled, p, 90.0, 50.0);
    for (std::size_t i = 0; i < a.sinr_db.size(); ++i) {
        const Vec2 c = a.cell_center(i % a.nx, i / a.nx);
        const auto r = sinr_at(Vec3{c.x, c.y, 90.0}, city, p);
        if (r.interference_w > 1000.0 * r.noise_w)
            EXPECT_LT(std::abs(a.sinr_db[i] - b.sinr_db[i]), 1e-3);
    }
}

TEST(RadioMapBuild, SingleStationSinrFallsAlongARay)
{
    PropagationParams p;
    const BaseStation bs = make_bs(0, 0, 20.0, 45.0);
    const CityMap city = empty_city(2000.0, {bs});
    double prev = std::numeric_limits<double>::infinity();
    for (double r = 100.0; r < 2700.0; r += 20.0) {
        const double x = r * std::cos(deg_to_rad(45.0)), y = r * std::sin(deg_to_rad(45.0));
        if (x > 2000.0)
            break;
        const double s = sinr_at(Vec3{x, y, 90.0}, city, p).sinr_db;
        EXPECT_LT(s, prev) << "r = " << r;
        prev = s;
    }
}

TEST(RadioMapBuild, Preconditions)
{
    CityMap city = empty_city(1000.0, {make_bs(500, 500)});
    EXPECT_THROW(build_radio_map(city, PropagationParams{}, 90.0, 30.0), DomainError); // 30 does not divide 1000
    city.buildings.push_back({{100, 100, 150, 150}, 95.0});
    EXPECT_THROW(build_radio_map(city, PropagationParams{}, 90.0, 10.0), DomainError);
}

TEST(RadioMapIo, RoundTripIsBitwise)
{
    const CityMap city = fixtures::random_city(2, 400.0, 3, 15);
    RadioMap m = build_radio_map(city, PropagationParams{}, 90.0, 10.0);
    m.sinr_db[7] = -std::numeric_limits<double>::infinity(); // a dead cell survives too
    m.recompute_outage();
    const auto path = (fixtures::temp_dir("radiomap_io") / "map.json").string();
    save_radio_map(path, m);
    const RadioMap l = load_radio_map(path);
    EXPECT_EQ(l.nx, m.nx);
    EXPECT_EQ(l.ny, m.ny);
    EXPECT_EQ(l.cell_size, m.cell_size);
    EXPECT_EQ(l.altitude, m.altitude);
    EXPECT_EQ(l.phi_th_db, m.phi_th_db);
    EXPECT_EQ(l.origin, m.origin);
    ASSERT_EQ(l.sinr_db.size(), m.sinr_db.size());
    EXPECT_EQ(0, std::memcmp(l.sinr_db.data(), m.sinr_db.data(), m.sinr_db.size() * sizeof(double)));
    EXPECT_EQ(l.outage, m.outage);
}

TEST(RadioMapIo, TruncatedAndWrongVersionFilesFail)
{
    const CityMap city = empty_city(100.0, {make_bs(50, 50)});
    const RadioMap m = build_radio_map(city, PropagationParams{}, 90.0, 10.0);
    const auto dir = fixtures::temp_dir("radiomap_bad");
    const std::string text = to_json(m).dump();
    std::ofstream((dir / "trunc.json").string()) << text.substr(0, text.size() / 2);
    EXPECT_THROW(load_radio_map((dir / "trunc.json").string()), ParseError);

    auto j = to_json(m);
    j["format_version"] = 99;
    write_json_file((dir / "v99.json").string(), j);
    EXPECT_THROW(load_radio_map((dir / "v99.json").string()), ParseError);

    j = to_json(m);
    j["sinr_db"].erase(0);
    write_json_file((dir / "short.json").string(), j);
    EXPECT_THROW(load_radio_map((dir / "short.json").string()), ParseError);
}

TEST(RadioMapIo, FullScaleGridReportsItsDims)
{
    const CityMap city = empty_city(2000.0, {make_bs(1000, 1000)});
    const RadioMap m = build_radio_map(city, PropagationParams{}, 90.0, 10.0);
    const auto j = to_json(m);
    EXPECT_EQ(j.at("dims").at(0).get<int>(), 200);
    EXPECT_EQ(j.at("dims").at(1).get<int>(), 200);
}

TEST(RadioMapLookup, CellOfEdges)
{
    const RadioMap m = build_radio_map(empty_city(100.0, {make_bs(50, 50)}), PropagationParams{}, 90.0, 10.0);
    EXPECT_EQ(m.cell_of({0, 0}), (std::pair<std::size_t, std::size_t>{0, 0}));
    EXPECT_EQ(m.cell_of({100, 100}), (std::pair<std::size_t, std::size_t>{9, 9}));
    EXPECT_EQ(m.cell_of({15, 25}), (std::pair<std::size_t, std::size_t>{1, 2}));
    EXPECT_THROW(m.cell_of({-0.1, 5}), DomainError);
}
