// SPDX-License-Identifier: Apache-2.0
//
// copxsim - coexistence simulator for deployable and public radio networks
// Copyright (C) 2026 The copxsim authors
//
// Monte-Carlo realizations of a scenario and the macro-to-deployable
// distance sweep.

#pragma once

#include "copx/scenario.hpp"
#include "copx/traffic.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace copx
{

enum class SeedStream : std::uint64_t
{
    Users = 1,
    Propagation = 2,
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, SeedStream stream);
/// Propagation seed of realization i at sweep index k.
std::uint64_t sweep_seed(std::uint64_t base_seed, std::uint64_t realization, std::uint64_t index);

struct RealizationResult
{
    std::vector<TrafficReport> reports;
    std::vector<double> dl_loads;
    std::vector<double> ul_loads;
    int iterations = 0;
    bool converged = false;
};

/// Full pipeline for one drop: users -> gains -> attachment/admission ->
/// load coupling -> drop check -> accounting.
RealizationResult run_realization(const ScenarioConfig& config, std::uint64_t seed);

/// Same pipeline with a given user drop and propagation seed.
RealizationResult run_realization(const ScenarioConfig& config, const std::vector<UserSpec>& users,
                                  std::uint64_t propagation_seed);

struct ConvergenceStats
{
    int realizations = 0;
    int converged = 0;
    int max_iterations = 0;
    double mean_iterations = 0.0;

    void add(const RealizationResult& r);
    void merge(const ConvergenceStats& other);
};

struct RunSpec
{
    ScenarioConfig config;
    int n_realizations = 20;
    std::uint64_t base_seed = 1;
};

struct UserAggregate
{
    int user_id = 0;
    UserClass user_class = UserClass::Normal;
    double dl_req_bps = 0.0;
    double ul_req_bps = 0.0;
    double mean_dl_served_bps = 0.0;
    double mean_ul_served_bps = 0.0;
    double mean_dl_sinr_db = 0.0; ///< over realizations where the user was attached
    double mean_ul_sinr_db = 0.0;
    double dl_fully_served_fraction = 0.0; ///< fraction of realizations
    double ul_fully_served_fraction = 0.0;
    double public_fraction = 0.0; ///< fraction of realizations served by the public network
};

struct AggregateMetrics
{
    int n_realizations = 0;
    std::vector<UserAggregate> users;
    /// Mean over realizations of the fraction of MC users fully served.
    double mc_fully_served_dl_fraction = 0.0;
    double mc_fully_served_ul_fraction = 0.0;
    std::vector<double> mean_dl_load; ///< per sector
    std::vector<double> mean_ul_load;
    ConvergenceStats convergence;
};

/// true when served is req up to 1e-9 relative.
bool fully_served(double served_bps, double req_bps);

/// Number of MC users whose mean served traffic equals the request.
int mc_users_with_full_mean(const AggregateMetrics& m, Direction d);

/// Realization i uses seed base_seed + i. `workers` <= 0 uses the hardware
/// concurrency.
AggregateMetrics run_scenario(const RunSpec& spec, int workers = 0);

/// Aggregation of finished realizations, in order.
AggregateMetrics aggregate(std::span<const RealizationResult> realizations);

struct SweepSpec
{
    RunSpec base;
    double d_min_m = 0.0;
    double d_max_m = 10000.0;
    double step_m = 10.0;
    std::optional<double> deployable_power_dbm;
    std::optional<McAccess> mc_access;
};

std::vector<double> sweep_grid(double d_min_m, double d_max_m, double step_m);

struct SweepRow
{
    double distance_m = 0.0;
    int user_id = 0;
    double mean_dl_served_bps = 0.0;
    double mean_dl_sinr_db = 0.0;
    double serving_network_mode_fraction = 0.0; ///< fraction of realizations served by public
    double dl_fully_served_fraction = 0.0;
};

struct SweepPoint
{
    double distance_m = 0.0;
    double mc_fully_served_dl_fraction = 0.0; ///< mean over realizations
    double mean_fully_served_count = 0.0;
    double mean_dl_served_bps = 0.0; ///< mean over MC users and realizations
};

struct SweepTable
{
    double dl_req_bps = 0.0;
    int n_mc_users = 0;
    std::vector<SweepRow> rows; ///< one per (distance, MC user), distance-major
    std::vector<SweepPoint> points;
    ConvergenceStats convergence;
};

/// User drops come from base_seed + i alone and are shared across distances;
/// propagation at index k uses sweep_seed(base_seed, i, k).
SweepTable run_distance_sweep(const SweepSpec& spec, int workers = 0);

/// One grid point of the sweep, exposed for consistency checks.
std::vector<RealizationResult> run_sweep_point(const SweepSpec& spec, double distance_m,
                                               std::uint64_t index);

struct DistanceSummary
{
    double distance_m = 0.0;
    double min_bps = 0.0;
    double median_bps = 0.0;
    double max_bps = 0.0;
    double mean_bps = 0.0;
};

struct SweepSummary
{
    std::vector<DistanceSummary> per_distance;
    /// Smallest distance from which all MC users are fully served (per-user
    /// mean) at every larger grid distance.
    std::optional<double> full_service_distance_m;
    double worst_user_mean_bps = 0.0;     ///< min over rows
    double worst_cluster_mean_bps = 0.0;  ///< min over distances of the MC-user mean
    double worst_cluster_distance_m = 0.0;
};

struct ScenarioSummary
{
    double min_dl_bps = 0.0;
    double median_dl_bps = 0.0;
    double max_dl_bps = 0.0;
    double min_ul_bps = 0.0;
    double median_ul_bps = 0.0;
    double max_ul_bps = 0.0;
    double median_dl_sinr_db = 0.0;
    double mc_fully_served_dl_fraction = 0.0;
    double mc_fully_served_ul_fraction = 0.0;
    int mc_users_full_mean_dl = 0;
    int mc_users_full_mean_ul = 0;
};

/// Throws ConfigError on an empty table.
SweepSummary summarize(const SweepTable& table);
/// Statistics over MC users; throws ConfigError if there are none.
ScenarioSummary summarize(const AggregateMetrics& metrics);

double median(std::vector<double> values);

void write_aggregate_csv(std::ostream& out, const AggregateMetrics& m);
/// sector_id,mean_dl_load,mean_ul_load
void write_cell_load_csv(std::ostream& out, const AggregateMetrics& m);
void write_sweep_csv(std::ostream& out, const SweepTable& t);

} // namespace copx
