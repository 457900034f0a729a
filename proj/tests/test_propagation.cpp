// SPDX-License-Identifier: Apache-2.0
//
// copxsim - coexistence simulator for deployable and public radio networks
// Copyright (C) 2026 The copxsim authors

#include "doctest.h"

#include "copx/csv.hpp"
#include "copx/propagation.hpp"
#include "copx/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

using namespace copx;

namespace
{

const RmaParams kParams{};

double los(double d2d, double d3d, double hbs = 32.0, double hut = 1.5)
{
    return rma_pathloss(LinkState::Los, d2d, d3d, hbs, hut, kParams);
}

double nlos(double d2d, double d3d, double hbs = 32.0, double hut = 1.5)
{
    return rma_pathloss(LinkState::Nlos, d2d, d3d, hbs, hut, kParams);
}

} // namespace

TEST_CASE("breakpoint distance")
{
    CHECK(breakpoint_distance(32.0, 1.5, 700e6) == doctest::Approx(703.7167544041137).epsilon(1e-12));
    CHECK(breakpoint_distance(20.0, 1.5, 700e6) == doctest::Approx(439.822971502571).epsilon(1e-12));
}

TEST_CASE("LOS probability")
{
    CHECK(los_probability(0.0) == 1.0);
    CHECK(los_probability(10.0) == 1.0);
    CHECK(los_probability(1010.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    double prev = 1.0;
    for (double d = 10.0; d < 20000.0; d += 37.0)
    {
        const double p = los_probability(d);
        CHECK(p <= prev);
        CHECK(p >= 0.0);
        prev = p;
    }
}

TEST_CASE("pathloss reference values")
{
    CHECK(los(100.0, 100.0) == doctest::Approx(69.73841440061206).epsilon(1e-9));
    CHECK(los(100.0, std::hypot(100.0, 30.5)) == doctest::Approx(70.14030388598682).epsilon(1e-9));
}

TEST_CASE("pathloss slope beyond the breakpoint")
{
    const double dbp = breakpoint_distance(32.0, 1.5, 700e6);
    CHECK(los(2.0 * dbp, 2.0 * dbp) - los(dbp, dbp) == doctest::Approx(40.0 * std::log10(2.0)).epsilon(1e-9));
}

TEST_CASE("pathloss continuity at the breakpoint")
{
    for (double hbs : {10.0, 20.0, 25.0, 32.0, 100.0})
    {
        for (double hut : {1.0, 1.5, 5.0})
        {
            const double dbp = breakpoint_distance(hbs, hut, 700e6);
            const double below = los(dbp * (1.0 - 1e-12), dbp * (1.0 - 1e-12), hbs, hut);
            const double above = los(dbp * (1.0 + 1e-12), dbp * (1.0 + 1e-12), hbs, hut);
            CHECK(std::abs(above - below) < 1e-9);
        }
    }
}

TEST_CASE("NLOS never below LOS and monotone in distance")
{
    for (double hbs : {20.0, 25.0, 32.0})
    {
        double prev_los = 0.0;
        double prev_nlos = 0.0;
        for (double d = 10.0; d <= 15000.0; d *= 1.05)
        {
            const double d3 = std::hypot(d, hbs - 1.5);
            const double l = los(d, d3, hbs);
            const double n = nlos(d, d3, hbs);
            CHECK(n >= l);
            CHECK(l > 0.0);
            CHECK(l >= prev_los - 1e-9);
            CHECK(n >= prev_nlos - 1e-9);
            prev_los = l;
            prev_nlos = n;
        }
    }
}

TEST_CASE("short distances are clamped")
{
    CHECK(los(1.0, 30.5) == doctest::Approx(los(10.0, std::hypot(10.0, 30.5))));
    CHECK(los(0.0, 30.5) == doctest::Approx(los(10.0, std::hypot(10.0, 30.5))));
}

TEST_CASE("non-finite distance is rejected")
{
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(los(nan, 100.0), ConfigError);
    CHECK_THROWS_AS(nlos(100.0, std::numeric_limits<double>::infinity()), ConfigError);
}

TEST_CASE("matches the independent oracle at 1000 points")
{
    const csv::Table t = csv::parse(csv::read_file(COPX_SOURCE_DIR "/tests/data/rma_oracle_points.csv"));
    REQUIRE(t.rows.size() == 1000);
    const int state = t.column("state");
    const int d2d = t.column("d2d_m");
    const int d3d = t.column("d3d_m");
    const int hbs = t.column("h_bs_m");
    const int hut = t.column("h_ut_m");
    const int fc = t.column("carrier_hz");
    const int dbp = t.column("d_bp_m");
    const int plos = t.column("p_los");
    const int pl = t.column("pathloss_db");
    int straddling = 0;
    for (const auto& row : t.rows)
    {
        const auto at = [&](int c) { return std::stod(row[static_cast<std::size_t>(c)]); };
        RmaParams params;
        params.carrier_ghz = at(fc) / 1e9;
        const LinkState s = row[static_cast<std::size_t>(state)] == "LOS" ? LinkState::Los : LinkState::Nlos;
        CHECK(std::abs(rma_pathloss(s, at(d2d), at(d3d), at(hbs), at(hut), params) - at(pl)) <= 0.01);
        CHECK(std::abs(breakpoint_distance(at(hbs), at(hut), at(fc)) - at(dbp)) <= 1e-6);
        CHECK(std::abs(los_probability(at(d2d)) - at(plos)) <= 1e-12);
        if (std::abs(at(d2d) / at(dbp) - 1.0) < 0.01)
        {
            ++straddling;
        }
    }
    CHECK(straddling >= 50);
}

TEST_CASE("shadowing")
{
    CHECK(shadowing_sigma_db(LinkState::Los, false) == 4.0);
    CHECK(shadowing_sigma_db(LinkState::Los, true) == 6.0);
    CHECK(shadowing_sigma_db(LinkState::Nlos, false) == 8.0);
    CHECK(shadowing_sigma_db(LinkState::Nlos, true) == 8.0);

    std::mt19937_64 rng(7);
    const int n = 40000;
    double sum = 0.0;
    double sq = 0.0;
    for (int i = 0; i < n; ++i)
    {
        const double x = sample_shadowing(LinkState::Nlos, false, rng);
        sum += x;
        sq += x * x;
    }
    const double mean = sum / n;
    CHECK(std::abs(mean) < 0.15);
    CHECK(std::sqrt(sq / n - mean * mean) == doctest::Approx(8.0).epsilon(0.02));
}

TEST_CASE("antenna pattern")
{
    const AntennaConfig sector{};
    CHECK(antenna_gain(sector, 0.0, 0.0) == 15.0);
    CHECK(antenna_gain(sector, 120.0, 185.0) == doctest::Approx(3.0));
    CHECK(antenna_gain(sector, 0.0, 180.0) == doctest::Approx(-15.0));
    CHECK(antenna_gain(sector, 350.0, 10.0) == doctest::Approx(15.0 - 12.0 * std::pow(20.0 / 65.0, 2)));
    CHECK(antenna_gain(sector, 0.0, 40.0) == doctest::Approx(antenna_gain(sector, 0.0, -40.0)));

    AntennaConfig omni{AntennaPattern::Omni, 5.0, 65.0, 30.0};
    for (double b : {-170.0, 0.0, 33.0, 179.0})
    {
        CHECK(antenna_gain(omni, 0.0, b) == 5.0);
    }
    CHECK(wrap_angle_deg(190.0) == doctest::Approx(-170.0));
    CHECK(wrap_angle_deg(-180.0) == doctest::Approx(180.0));
    CHECK(wrap_angle_deg(720.0) == doctest::Approx(0.0));
}

TEST_CASE("cell gain composition")
{
    BaseStationSpec bs = make_macro(Position{0.0, 0.0, 32.0});
    const SectorInstance sector{0, 0, 0.0};
    UserSpec user;
    user.position = Position{1000.0, 0.0, 1.5};
    const LinkTerms t = link_terms(bs, sector, user, LinkState::Los, 0.0, kParams);
    CHECK(t.antenna_db == doctest::Approx(15.0));
    CHECK(t.gain_db == doctest::Approx(15.0 - t.pathloss_db));

    const LinkTerms shadowed = link_terms(bs, sector, user, LinkState::Los, -3.0, kParams);
    CHECK(shadowed.gain_db == doctest::Approx(t.gain_db - 3.0));

    bs.antenna.boresight_gain_dbi += 2.5;
    CHECK(link_terms(bs, sector, user, LinkState::Los, 0.0, kParams).gain_db == doctest::Approx(t.gain_db + 2.5));

    user.position = Position{8000.0, 0.0, 1.5};
    CHECK(link_terms(bs, sector, user, LinkState::Nlos, 0.0, kParams).out_of_validity);
    CHECK_FALSE(link_terms(bs, sector, user, LinkState::Los, 0.0, kParams).out_of_validity);
}

TEST_CASE("gain table draws are shared by co-located sectors")
{
    const ScenarioConfig config = build_preset(Preset::MacroTruck);
    const auto sectors = make_sectors(config);
    const auto users = drop_users(config, 3);
    std::mt19937_64 a(11);
    std::mt19937_64 b(11);
    const LinkGainTable t1 = build_link_gains(config.base_stations, sectors, users, config.rma(), {}, a);
    const LinkGainTable t2 = build_link_gains(config.base_stations, sectors, users, config.rma(), {}, b);
    for (const auto& s : sectors)
    {
        for (const auto& u : users)
        {
            CHECK(t1.gain_db(s.sector_id, u.user_id) == t2.gain_db(s.sector_id, u.user_id));
            const auto site_first = std::find_if(sectors.begin(), sectors.end(),
                                                 [&](const SectorInstance& o) { return o.bs_index == s.bs_index; });
            const auto& first = t1.terms(site_first->sector_id, u.user_id);
            CHECK(t1.terms(s.sector_id, u.user_id).shadowing_db == first.shadowing_db);
            CHECK(t1.terms(s.sector_id, u.user_id).state == first.state);
        }
    }
    CHECK_THROWS_AS(t1.gain_db(static_cast<int>(sectors.size()), 0), std::out_of_range);
    CHECK_THROWS_AS(t1.gain_db(0, static_cast<int>(users.size())), std::out_of_range);
}

TEST_CASE("shadowing switch and forced LOS")
{
    const ScenarioConfig config = build_preset(Preset::MacroOnly);
    const auto sectors = make_sectors(config);
    const auto users = drop_users(config, 5);
    std::mt19937_64 rng(1);
    PropagationOptions opts;
    opts.shadowing = false;
    opts.force_los = true;
    const LinkGainTable t = build_link_gains(config.base_stations, sectors, users, config.rma(), opts, rng);
    for (const auto& u : users)
    {
        CHECK(t.terms(0, u.user_id).shadowing_db == 0.0);
        CHECK(t.terms(0, u.user_id).state == LinkState::Los);
    }
}
