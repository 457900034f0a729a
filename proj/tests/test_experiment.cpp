// SPDX-License-Identifier: Apache-2.0
//
// copxsim - coexistence simulator for deployable and public radio networks
// Copyright (C) 2026 The copxsim authors

#include "doctest.h"

#include "copx/csv.hpp"
#include "copx/experiment.hpp"

#include <cmath>
#include <set>
#include <sstream>

using namespace copx;

namespace
{

std::string aggregate_text(const AggregateMetrics& m)
{
    std::ostringstream out;
    write_aggregate_csv(out, m);
    write_cell_load_csv(out, m);
    return out.str();
}

std::string sweep_text(const SweepTable& t)
{
    std::ostringstream out;
    write_sweep_csv(out, t);
    return out.str();
}

SweepSpec uav_sweep(double d_min, double d_max, double step, int realizations)
{
    SweepSpec spec;
    spec.base = RunSpec{build_preset(Preset::MacroUav), realizations, 1};
    spec.d_min_m = d_min;
    spec.d_max_m = d_max;
    spec.step_m = step;
    return spec;
}

SweepTable constant_table(const std::vector<double>& distances, int users, double served, double req)
{
    SweepTable t;
    t.dl_req_bps = req;
    t.n_mc_users = users;
    for (double d : distances)
    {
        for (int u = 0; u < users; ++u)
        {
            SweepRow row;
            row.distance_m = d;
            row.user_id = u;
            row.mean_dl_served_bps = served;
            t.rows.push_back(row);
        }
    }
    return t;
}

} // namespace

TEST_CASE("seed derivation")
{
    CHECK(mix64(0) == 0xe220a8397b1dcdafULL);
    CHECK(derive_seed(1, SeedStream::Users) != derive_seed(1, SeedStream::Propagation));
    CHECK(derive_seed(1, SeedStream::Users) != derive_seed(2, SeedStream::Users));
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 20; ++i)
    {
        for (std::uint64_t k = 0; k < 1001; ++k)
        {
            seen.insert(sweep_seed(1, i, k));
        }
    }
    CHECK(seen.size() == 20 * 1001);
}

TEST_CASE("sweep grid")
{
    const auto g = sweep_grid(0.0, 10000.0, 10.0);
    CHECK(g.size() == 1001);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == 10000.0);
    CHECK(g[537] == 5370.0);
    CHECK(sweep_grid(5.0, 5.0, 10.0).size() == 1);
    CHECK_THROWS_AS(sweep_grid(10.0, 0.0, 10.0), ConfigError);
    CHECK_THROWS_AS(sweep_grid(0.0, 10.0, 0.0), ConfigError);
    CHECK_THROWS_AS(sweep_grid(-1.0, 10.0, 1.0), ConfigError);
}

TEST_CASE("scenario runs are deterministic and worker independent")
{
    const RunSpec spec{build_preset(Preset::MacroTruck), 6, 11};
    const std::string a = aggregate_text(run_scenario(spec, 1));
    CHECK(a == aggregate_text(run_scenario(spec, 1)));
    CHECK(a == aggregate_text(run_scenario(spec, 4)));
    const RunSpec other{spec.config, 6, 12};
    CHECK(a != aggregate_text(run_scenario(other, 1)));

    const RunSpec none{spec.config, 0, 1};
    CHECK_THROWS_AS(run_scenario(none), ConfigError);
}

TEST_CASE("aggregate metrics")
{
    const RunSpec spec{build_preset(Preset::MacroUav), 4, 1};
    const auto m = run_scenario(spec, 1);
    CHECK(m.n_realizations == 4);
    CHECK(m.users.size() == 115);
    CHECK(m.mean_dl_load.size() == 7);
    CHECK(m.convergence.realizations == 4);
    for (const auto& u : m.users)
    {
        CHECK(u.mean_dl_served_bps <= u.dl_req_bps);
        CHECK(u.dl_fully_served_fraction >= 0.0);
        CHECK(u.dl_fully_served_fraction <= 1.0);
    }
    const auto s = summarize(m);
    CHECK(s.min_dl_bps <= s.median_dl_bps);
    CHECK(s.median_dl_bps <= s.max_dl_bps);
    CHECK(s.mc_users_full_mean_dl == mc_users_with_full_mean(m, Direction::Dl));

    auto no_mc = spec.config;
    no_mc.n_mc_users = 0;
    CHECK_THROWS_AS(summarize(run_scenario(RunSpec{no_mc, 2, 1}, 1)), ConfigError);

    const auto t = csv::parse(aggregate_text(m).substr(0, aggregate_text(m).find("sector_id")));
    CHECK(t.header.size() == 11);
    CHECK(t.rows.size() == 115);
}

TEST_CASE("summaries")
{
    SUBCASE("constant full service")
    {
        const auto s = summarize(constant_table({0.0, 10.0, 20.0}, 15, 2e6, 2e6));
        CHECK(s.worst_user_mean_bps == 2e6);
        CHECK(s.worst_cluster_mean_bps == 2e6);
        REQUIRE(s.full_service_distance_m.has_value());
        CHECK(*s.full_service_distance_m == 0.0);
    }
    SUBCASE("single row")
    {
        const auto s = summarize(constant_table({30.0}, 1, 1.2e6, 2e6));
        REQUIRE(s.per_distance.size() == 1);
        CHECK(s.per_distance[0].min_bps == s.per_distance[0].median_bps);
        CHECK(s.per_distance[0].median_bps == s.per_distance[0].max_bps);
        CHECK_FALSE(s.full_service_distance_m.has_value());
    }
    SUBCASE("threshold lies within the grid")
    {
        auto t = constant_table({0.0, 10.0, 20.0, 30.0}, 2, 2e6, 2e6);
        t.rows[2].mean_dl_served_bps = 1e6;
        const auto s = summarize(t);
        REQUIRE(s.full_service_distance_m.has_value());
        CHECK(*s.full_service_distance_m == 20.0);
        CHECK(*s.full_service_distance_m <= 30.0);
        CHECK(s.worst_user_mean_bps == 1e6);
        CHECK(s.worst_cluster_mean_bps == 1.5e6);
        CHECK(s.worst_cluster_distance_m == 10.0);
    }
    CHECK_THROWS_AS(summarize(SweepTable{}), ConfigError);
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
}

TEST_CASE("sweep determinism and layout")
{
    const auto spec = uav_sweep(0.0, 10000.0, 2500.0, 3);
    const auto t = run_distance_sweep(spec, 1);
    CHECK(t.points.size() == 5);
    CHECK(t.rows.size() == 5 * 15);
    CHECK(t.rows[16].distance_m == 2500.0);
    CHECK(t.rows[16].user_id == 1);
    const std::string text = sweep_text(t);
    CHECK(text == sweep_text(run_distance_sweep(spec, 1)));
    CHECK(text == sweep_text(run_distance_sweep(spec, 3)));

    const auto parsed = csv::parse(text);
    CHECK(parsed.header == std::vector<std::string>{"distance_m", "user_id", "mean_dl_served_mbps", "mean_dl_sinr_db",
                                                    "serving_network_mode_fraction", "dl_fully_served_fraction"});
    CHECK(parsed.rows.size() == 75);

    CHECK_THROWS_AS(run_distance_sweep(SweepSpec{RunSpec{build_preset(Preset::MacroOnly), 2, 1}}), ConfigError);
}

TEST_CASE("policy variants share the row layout")
{
    auto spec = uav_sweep(0.0, 10000.0, 5000.0, 2);
    spec.mc_access = McAccess::DeployableOnly;
    const auto a = run_distance_sweep(spec, 1);
    spec.mc_access = McAccess::AnyNetwork;
    const auto b = run_distance_sweep(spec, 1);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i)
    {
        CHECK(a.rows[i].distance_m == b.rows[i].distance_m);
        CHECK(a.rows[i].user_id == b.rows[i].user_id);
        CHECK(a.rows[i].serving_network_mode_fraction == 0.0);
    }
}

TEST_CASE("sweep at the original geometry equals the static scenario")
{
    const auto spec = uav_sweep(0.0, 12000.0, 10.0, 4);
    const ScenarioConfig& config = spec.base.config;
    const double original = distance_2d(config.base_stations[0].site,
                                        config.base_stations[static_cast<std::size_t>(deployable_index(config))].site);
    CHECK(original >= 10000.0);
    const std::uint64_t k = 77;
    const auto swept = run_sweep_point(spec, original, k);
    for (int i = 0; i < spec.base.n_realizations; ++i)
    {
        const auto users = drop_users(config, derive_seed(1 + static_cast<std::uint64_t>(i), SeedStream::Users));
        const auto moved = translate_mc_cluster(config, users, original);
        CHECK(distance_2d(moved.config.mc_area.center, config.mc_area.center) < 1e-9);
        const auto fixed =
            run_realization(config, users, derive_seed(sweep_seed(1, static_cast<std::uint64_t>(i), k), SeedStream::Propagation));
        for (std::size_t u = 0; u < users.size(); ++u)
        {
            if (users[u].user_class != UserClass::Mc)
            {
                continue;
            }
            const auto& a = swept[static_cast<std::size_t>(i)].reports[u];
            const auto& b = fixed.reports[u];
            CHECK(a.dl.served_bps == doctest::Approx(b.dl.served_bps).epsilon(1e-9));
            CHECK(a.ul.served_bps == doctest::Approx(b.ul.served_bps).epsilon(1e-9));
        }
    }
}

TEST_CASE("10 km row resembles the static scenario")
{
    const auto spec = uav_sweep(10000.0, 10000.0, 10.0, 20);
    const auto t = run_distance_sweep(spec);
    const auto m = run_scenario(spec.base);
    CHECK(std::abs(t.points[0].mc_fully_served_dl_fraction - m.mc_fully_served_dl_fraction) <= 0.1);
}

TEST_CASE("statistical trend: served traffic falls as the deployable approaches the macro")
{
    auto spec = uav_sweep(100.0, 5000.0, 10.0, 20);
    spec.mc_access = McAccess::DeployableOnly;
    spec.deployable_power_dbm = kUavLowPowerDbm;
    const auto t = run_distance_sweep(spec);
    int violations = 0;
    for (std::size_t k = 0; k + 1 < t.points.size(); ++k)
    {
        const double nearer = t.points[k].mean_dl_served_bps;
        const double farther = t.points[k + 1].mean_dl_served_bps;
        CHECK_MESSAGE(nearer <= farther + 0.1e6, "at " << t.points[k].distance_m << " m");
        violations += nearer > farther ? 1 : 0;
    }
    MESSAGE("single-step increases towards the macro: " << violations);
    CHECK(t.points.front().mean_dl_served_bps < t.points.back().mean_dl_served_bps);
}
