// SPDX-License-Identifier: Apache-2.0
//
// copxsim - coexistence simulator for deployable and public radio networks
// Copyright (C) 2026 The copxsim authors
//
// Acceptance run: one PASS/FAIL line per criterion, tolerances fixed below.
// Exit status is the number of failed criteria (capped at 100).

#include "CLI11.hpp"
#include "json.hpp"
#include "copx/config_json.hpp"
#include "copx/csv.hpp"
#include "copx/experiment.hpp"
#include "copx/propagation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#ifndef COPX_SOURCE_DIR
#define COPX_SOURCE_DIR "."
#endif

namespace
{

using namespace copx;

// Pinned tolerances and thresholds.
constexpr int kRealizations = 20;
constexpr std::uint64_t kSeed = 1;
constexpr double kAccountingRelTol = 1e-9;
constexpr double kOracleTolDb = 0.01;
constexpr double kMacroOnlyMaxFraction = 0.20;
constexpr double kMacroMcMaxFraction = 0.40;
constexpr double kSinrUpliftDb = 15.0;
constexpr double kUlHeavyReqBps = 2e6;
constexpr double kFarFieldFromM = 5000.0;
constexpr double kFarFieldMinFraction = 0.95;
constexpr double kNearFieldBelowM = 1000.0;
constexpr double kNearFieldMaxBps = 0.2e6;
constexpr double kWorstCaseMinBps = 0.8e6;
constexpr double kCountSlack = 1e-12;
constexpr double kMaxSecondsPerRealization = 1.0;
constexpr double kMaxSweepSeconds = 600.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict
{
    int failures = 0;

    void report(int id, bool pass, const std::string& name, const std::string& detail)
    {
        if (!pass)
        {
            ++failures;
        }
        std::printf("criterion %2d %s  %-34s %s\n", id, pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
        std::fflush(stdout);
    }
};

std::string fmt(const char* f, double a)
{
    char buf[96];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

// Largest accounting residual over a set of reports, relative to the request.
struct AccountingCheck
{
    double worst = 0.0;
    long users = 0;

    void add(const std::vector<TrafficReport>& reports)
    {
        for (const auto& r : reports)
        {
            for (const auto* t : {&r.dl, &r.ul})
            {
                const double resid = t->req_bps - t->dropped_bps - t->blocked_bps - t->served_bps;
                const double rel = std::abs(resid) / std::max(t->req_bps, 1.0);
                worst = std::max(worst, rel);
                const bool negative = t->dropped_bps < 0.0 || t->blocked_bps < 0.0 || t->served_bps < 0.0;
                if (negative)
                {
                    worst = std::max(worst, 1.0);
                }
            }
            ++users;
        }
    }
};

struct ScenarioRun
{
    AggregateMetrics metrics;
    double seconds_per_realization = 0.0;
};

ScenarioRun run_checked(const ScenarioConfig& config, AccountingCheck& acc)
{
    std::vector<RealizationResult> results(kRealizations);
    const auto t0 = Clock::now();
    for (int i = 0; i < kRealizations; ++i)
    {
        results[static_cast<std::size_t>(i)] = run_realization(config, kSeed + static_cast<std::uint64_t>(i));
    }
    ScenarioRun out;
    out.seconds_per_realization = seconds_since(t0) / kRealizations;
    for (const auto& r : results)
    {
        acc.add(r.reports);
    }
    out.metrics = aggregate(results);
    return out;
}

double mc_fraction_full_mean(const AggregateMetrics& m, Direction d, int n_mc)
{
    return static_cast<double>(mc_users_with_full_mean(m, d)) / n_mc;
}

std::vector<double> mc_sinrs(const AggregateMetrics& m)
{
    std::vector<double> v;
    for (const auto& u : m.users)
    {
        if (u.user_class == UserClass::Mc)
        {
            v.push_back(u.mean_dl_sinr_db);
        }
    }
    return v;
}

// Sum of the mean DL loads of the sectors of one base station.
double site_dl_load(const ScenarioConfig& config, const AggregateMetrics& m, int bs_index)
{
    double load = 0.0;
    for (const auto& s : make_sectors(config))
    {
        if (s.bs_index == bs_index)
        {
            load += m.mean_dl_load[static_cast<std::size_t>(s.sector_id)];
        }
    }
    return load;
}

double oracle_check(const std::string& path, int& points)
{
    const csv::Table t = csv::parse(csv::read_file(path));
    const auto state = t.column("state");
    const auto d2d = t.column("d2d_m");
    const auto hbs = t.column("h_bs_m");
    const auto hut = t.column("h_ut_m");
    const auto fc = t.column("carrier_hz");
    const auto d3d = t.column("d3d_m");
    const auto dbp = t.column("d_bp_m");
    const auto plos = t.column("p_los");
    const auto pl = t.column("pathloss_db");
    double worst = 0.0;
    points = static_cast<int>(t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i)
    {
        const auto& row = t.rows[i];
        const double f = std::stod(row[fc]);
        RmaParams params;
        params.carrier_ghz = f / 1e9;
        const LinkState s = (row[state] == "LOS" || row[state] == "los") ? LinkState::Los : LinkState::Nlos;
        const double mine = rma_pathloss(s, std::stod(row[d2d]), std::stod(row[d3d]), std::stod(row[hbs]),
                                         std::stod(row[hut]), params);
        worst = std::max(worst, std::abs(mine - std::stod(row[pl])));
        worst = std::max(worst, std::abs(breakpoint_distance(std::stod(row[hbs]), std::stod(row[hut]), f) -
                                         std::stod(row[dbp])));
        worst = std::max(worst, std::abs(los_probability(std::stod(row[d2d])) - std::stod(row[plos])));
    }
    return worst;
}

// Jump of the LOS curve across the breakpoint for a few height pairs, with
// the 3D distance held equal to the 2D one so both branches meet at d_BP.
double breakpoint_jump()
{
    double worst = 0.0;
    const RmaParams params;
    for (double hbs : {10.0, 20.0, 25.0, 32.0, 150.0})
    {
        for (double hut : {1.0, 1.5, 5.0, 10.0})
        {
            const double dbp = breakpoint_distance(hbs, hut, params.carrier_ghz * 1e9);
            const double eps = 1e-9 * dbp;
            const auto at = [&](double d2) {
                return rma_pathloss(LinkState::Los, d2, d2, hbs, hut, params);
            };
            worst = std::max(worst, std::abs(at(dbp + eps) - at(dbp - eps)));
        }
    }
    return worst;
}

std::string sweep_csv(const SweepTable& t)
{
    std::ostringstream s;
    write_sweep_csv(s, t);
    return s.str();
}

std::string aggregate_csv(const AggregateMetrics& m)
{
    std::ostringstream s;
    write_aggregate_csv(s, m);
    write_cell_load_csv(s, m);
    return s.str();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Acceptance checks for copxsim"};
    double step_m = 10.0;
    int workers = 0;
    std::string manifest_path = "acceptance_manifest.json";
    std::string oracle_path = std::string(COPX_SOURCE_DIR) + "/tests/data/rma_oracle_points.csv";
    app.add_option("--step", step_m, "Sweep grid step in metres (the full check uses 10)")
        ->check(CLI::PositiveNumber);
    app.add_option("--workers", workers, "Worker threads for sweeps (0: all cores)");
    app.add_option("--manifest", manifest_path, "Where to write the parameter manifest");
    app.add_option("--oracle", oracle_path, "Oracle path-loss points");
    CLI11_PARSE(app, argc, argv);

    Verdict v;
    AccountingCheck acc;
    nlohmann::json manifest;
    manifest["seed"] = kSeed;
    manifest["realizations"] = kRealizations;
    manifest["sweep_step_m"] = step_m;

    const ScenarioConfig only = build_preset(Preset::MacroOnly);
    const ScenarioConfig mc = build_preset(Preset::MacroMc);
    const ScenarioConfig truck = build_preset(Preset::MacroTruck);
    const ScenarioConfig uav = build_preset(Preset::MacroUav);
    const int n_mc = only.n_mc_users;

    // The parameter set every criterion runs under.
    manifest["parameters"] = {
        {"macro_gain_dbi", only.base_stations.front().antenna.boresight_gain_dbi},
        {"truck_gain_dbi", truck.base_stations[static_cast<std::size_t>(deployable_index(truck))].antenna.boresight_gain_dbi},
        {"uav_gain_dbi", uav.base_stations[static_cast<std::size_t>(deployable_index(uav))].antenna.boresight_gain_dbi},
        {"ue_noise_figure_db", only.noise.ue_noise_figure_db},
        {"bs_noise_figure_db", only.noise.bs_noise_figure_db},
        {"drop_sinr_threshold_db", only.drop_sinr_threshold_db},
        {"mc_area_radius_m", only.mc_area.radius_m},
    };
    manifest["config_hash"] = {{"macro-only", config_hash(only)},
                               {"macro-mc", config_hash(mc)},
                               {"macro-truck", config_hash(truck)},
                               {"macro-uav", config_hash(uav)}};

    // Static scenarios.
    const auto r_only = run_checked(only, acc);
    const auto r_mc = run_checked(mc, acc);
    const auto r_truck = run_checked(truck, acc);
    const auto r_uav = run_checked(uav, acc);

    ScenarioConfig truck_ul_cfg = truck;
    truck_ul_cfg.mc_service.ul_req_bps = kUlHeavyReqBps;
    ScenarioConfig uav_ul_cfg = uav;
    uav_ul_cfg.mc_service.ul_req_bps = kUlHeavyReqBps;
    const auto r_truck_ul = run_checked(truck_ul_cfg, acc);
    const auto r_uav_ul = run_checked(uav_ul_cfg, acc);

    double slowest = 0.0;
    for (const auto* r : {&r_only, &r_mc, &r_truck, &r_uav, &r_truck_ul, &r_uav_ul})
    {
        slowest = std::max(slowest, r->seconds_per_realization);
    }

    // Sweeps: both policies at both UAV powers.
    struct Variant
    {
        McAccess access;
        double power_dbm;
        SweepTable table;
    };
    std::vector<Variant> variants{{McAccess::DeployableOnly, kUavLowPowerDbm, {}},
                                  {McAccess::DeployableOnly, kUavPowerDbm, {}},
                                  {McAccess::AnyNetwork, kUavLowPowerDbm, {}},
                                  {McAccess::AnyNetwork, kUavPowerDbm, {}}};
    double sweep_seconds = 0.0;
    for (auto& var : variants)
    {
        SweepSpec spec;
        spec.base = RunSpec{uav, kRealizations, kSeed};
        spec.d_min_m = 0.0;
        spec.d_max_m = 10000.0;
        spec.step_m = step_m;
        spec.deployable_power_dbm = var.power_dbm;
        spec.mc_access = var.access;
        const auto t0 = Clock::now();
        var.table = run_distance_sweep(spec, workers);
        sweep_seconds = std::max(sweep_seconds, seconds_since(t0));
        for (double d : {0.0, 500.0, 2500.0, 10000.0})
        {
            for (const auto& r : run_sweep_point(spec, d, 0))
            {
                acc.add(r.reports);
            }
        }
    }

    // 1
    v.report(1, acc.worst <= kAccountingRelTol, "accounting identity",
             fmt("max relative residual %.3g over %.0f user reports", acc.worst, static_cast<double>(acc.users)));

    // 2
    int points = 0;
    double oracle_worst = 0.0;
    std::string oracle_detail;
    bool oracle_ok = false;
    try
    {
        oracle_worst = oracle_check(oracle_path, points);
        const double jump = breakpoint_jump();
        oracle_ok = points >= 1000 && oracle_worst <= kOracleTolDb && jump <= kOracleTolDb;
        oracle_detail = fmt("max |diff| %.3g dB over %.0f points", oracle_worst, points) +
                        fmt(", breakpoint jump %.3g dB", jump);
    }
    catch (const std::exception& e)
    {
        oracle_detail = std::string("oracle data unreadable: ") + e.what();
    }
    v.report(2, oracle_ok, "propagation oracle", oracle_detail);

    // 3
    const double f_only = mc_fraction_full_mean(r_only.metrics, Direction::Dl, n_mc);
    v.report(3, f_only <= kMacroOnlyMaxFraction, "macro-only coverage gap",
             fmt("fully served DL fraction %.3f (max %.2f)", f_only, kMacroOnlyMaxFraction));

    // 4
    const double f_mc = mc_fraction_full_mean(r_mc.metrics, Direction::Dl, n_mc);
    v.report(4, f_mc <= kMacroMcMaxFraction && f_mc >= f_only, "macro-mc still short",
             fmt("fully served DL fraction %.3f (max %.2f", f_mc, kMacroMcMaxFraction) +
                 fmt(", macro-only %.3f)", f_only));

    // 5
    const int truck_dl = mc_users_with_full_mean(r_truck.metrics, Direction::Dl);
    const int truck_ul = mc_users_with_full_mean(r_truck.metrics, Direction::Ul);
    v.report(5, truck_dl == n_mc && truck_ul == n_mc, "macro-truck full service",
             fmt("DL %.0f/", truck_dl) + fmt("%.0f, UL ", n_mc) + fmt("%.0f/", truck_ul) + fmt("%.0f", n_mc));

    // 6
    const double sinr_only = median(mc_sinrs(r_only.metrics));
    const double sinr_truck = median(mc_sinrs(r_truck.metrics));
    v.report(6, sinr_truck - sinr_only >= kSinrUpliftDb, "truck SINR uplift",
             fmt("median MC DL SINR %.2f dB vs %.2f dB", sinr_truck, sinr_only) +
                 fmt(" (uplift %.2f, min %.0f dB)", sinr_truck - sinr_only, kSinrUpliftDb));

    // 7
    const int truck_ul_full = mc_users_with_full_mean(r_truck_ul.metrics, Direction::Ul);
    const int uav_ul_full = mc_users_with_full_mean(r_uav_ul.metrics, Direction::Ul);
    v.report(7, truck_ul_full == n_mc && uav_ul_full <= n_mc - 1, "2 Mbps UL: truck vs UAV",
             fmt("truck %.0f/", truck_ul_full) + fmt("%.0f full, UAV ", n_mc) + fmt("%.0f/", uav_ul_full) +
                 fmt("%.0f full", n_mc));

    // 8
    double far_worst = 1.0;
    double far_at = 0.0;
    for (const auto& var : variants)
    {
        for (const auto& p : var.table.points)
        {
            if (p.distance_m >= kFarFieldFromM && p.mc_fully_served_dl_fraction < far_worst)
            {
                far_worst = p.mc_fully_served_dl_fraction;
                far_at = p.distance_m;
            }
        }
    }
    v.report(8, far_worst >= kFarFieldMinFraction, "sweep far field",
             fmt("min fully served fraction %.3f at %.0f m", far_worst, far_at) +
                 fmt(" (min %.2f)", kFarFieldMinFraction));

    // 9
    double near_worst = 0.0;
    double near_at = 0.0;
    for (const auto& p : variants[0].table.points)
    {
        if (p.distance_m < kNearFieldBelowM && p.mean_dl_served_bps >= near_worst)
        {
            near_worst = p.mean_dl_served_bps;
            near_at = p.distance_m;
        }
    }
    v.report(9, near_worst < kNearFieldMaxBps, "near field, deployable-only",
             fmt("max mean served DL %.3f Mbps at %.0f m", near_worst / 1e6, near_at) +
                 fmt(" (must be < %.1f)", kNearFieldMaxBps / 1e6));

    // 10
    const SweepSummary any_low = summarize(variants[2].table);
    const SweepSummary any_high = summarize(variants[3].table);
    v.report(10, any_low.worst_cluster_mean_bps >= kWorstCaseMinBps, "worst case, any-network",
             fmt("24 dBm: %.3f Mbps at %.0f m", any_low.worst_cluster_mean_bps / 1e6,
                 any_low.worst_cluster_distance_m) +
                 fmt("; 40 dBm: %.3f Mbps at %.0f m", any_high.worst_cluster_mean_bps / 1e6,
                     any_high.worst_cluster_distance_m));

    // 11
    int order_violations = 0;
    double order_at = -1.0;
    for (std::size_t pair = 0; pair < 2; ++pair)
    {
        const auto& low = variants[2 * pair].table.points;
        const auto& high = variants[2 * pair + 1].table.points;
        for (std::size_t k = 0; k < low.size(); ++k)
        {
            if (high[k].mean_fully_served_count + kCountSlack < low[k].mean_fully_served_count)
            {
                ++order_violations;
                order_at = low[k].distance_m;
            }
        }
    }
    v.report(11, order_violations == 0, "power ordering",
             order_violations == 0 ? std::string("40 dBm count >= 24 dBm count at every distance, both policies")
                                   : fmt("%.0f violations, last at %.0f m", order_violations, order_at));

    // 12
    bool offload = true;
    std::string offload_detail;
    for (int b = 0; b < static_cast<int>(only.base_stations.size()); ++b)
    {
        if (only.base_stations[static_cast<std::size_t>(b)].kind != BsKind::Macro)
        {
            continue;
        }
        const double before = site_dl_load(only, r_only.metrics, b);
        const double after = site_dl_load(truck, r_truck.metrics, b);
        offload = offload && after <= before;
        offload_detail += fmt("macro %.0f: ", b) + fmt("%.3f -> %.3f  ", before, after);
    }
    v.report(12, offload, "macro offload", offload_detail);

    // 13
    bool same = aggregate_csv(run_scenario(RunSpec{uav, kRealizations, kSeed}, 1)) ==
                    aggregate_csv(run_scenario(RunSpec{uav, kRealizations, kSeed}, 3)) &&
                aggregate_csv(run_scenario(RunSpec{uav, kRealizations, kSeed}, 1)) ==
                    aggregate_csv(r_uav.metrics);
    {
        SweepSpec spec;
        spec.base = RunSpec{uav, kRealizations, kSeed};
        spec.d_min_m = 0.0;
        spec.d_max_m = 10000.0;
        spec.step_m = 500.0;
        spec.deployable_power_dbm = kUavLowPowerDbm;
        spec.mc_access = McAccess::DeployableOnly;
        const std::string a = sweep_csv(run_distance_sweep(spec, 1));
        const std::string b = sweep_csv(run_distance_sweep(spec, 4));
        const std::string c = sweep_csv(run_distance_sweep(spec, 1));
        same = same && a == b && a == c;
    }
    v.report(13, same, "determinism", same ? "byte-identical CSVs across repeats and worker counts"
                                           : "CSV bytes differ");

    std::printf("timing: %.3f s per realization (limit %.1f), slowest sweep %.1f s (limit %.0f)\n", slowest,
                kMaxSecondsPerRealization, sweep_seconds, kMaxSweepSeconds);

    manifest["timing"] = {{"seconds_per_realization", slowest}, {"slowest_sweep_seconds", sweep_seconds}};
    manifest["failures"] = v.failures;
    try
    {
        csv::write_file_atomic(manifest_path, manifest.dump(2) + "\n");
    }
    catch (const IoError& e)
    {
        std::fprintf(stderr, "warning: %s\n", e.what());
    }
    std::printf("%d of 13 criteria failed\n", v.failures);
    return std::min(v.failures, 100);
}
