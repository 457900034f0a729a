// SPDX-License-Identifier: Apache-2.0
//
// copxsim - coexistence simulator for deployable and public radio networks
// Copyright (C) 2026 The copxsim authors
//
// Cell selection, admission, drop decisions, MC-priority bandwidth
// allocation, load coupling between interfering cells and the
// served = requested - dropped - blocked accounting.

#pragma once

#include "copx/radio.hpp"
#include "copx/scenario.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace copx
{

/// What the traffic layer needs to know about a sector.
struct CellInfo
{
    int sector_id = 0;
    NetworkId network = NetworkId::Public;
    double tx_power_dbm = 0.0;
};

std::vector<CellInfo> make_cells(const ScenarioConfig& config,
                                 std::span<const SectorInstance> sectors);

struct NetworkSet
{
    bool public_network = false;
    bool deployable = false;

    bool contains(NetworkId n) const
    {
        return n == NetworkId::Public ? public_network : deployable;
    }
};

NetworkSet allowed_networks(UserClass cls, const AccessPolicy& policy);

struct Attachment
{
    int user_id = 0;
    int serving_sector_id = -1; ///< -1: not attached (admission-blocked)
    NetworkSet allowed_networks;
};

/// Strongest DL received power (tx power + cell gain) among the sectors the
/// user may access; ties go to the lowest sector id. Throws ConfigError if
/// the user may access no sector.
Attachment select_cell(const UserSpec& user, const LinkGainTable& gains,
                       std::span<const CellInfo> cells, const AccessPolicy& policy);

struct AdmissionResult
{
    std::vector<int> admitted;
    std::vector<int> blocked;
};

/// Normal users are all rejected when block_normal_users is set; MC users
/// are always admitted.
AdmissionResult apply_admission(std::span<const UserSpec> users, const AccessPolicy& policy);

struct DropDecision
{
    bool dl = false;
    bool ul = false;
};

/// A direction is dropped iff its SINR is strictly below the threshold.
DropDecision drop_check(double dl_sinr_db, double ul_sinr_db, double threshold_db);

struct CellDemand
{
    int user_id = 0;
    UserClass user_class = UserClass::Normal;
    double demand_hz = 0.0; ///< +inf when the link carries no rate
};

struct UserAllocation
{
    int user_id = 0;
    double demand_hz = 0.0;
    double allocated_hz = 0.0;
};

struct CellAllocation
{
    int sector_id = 0;
    Direction direction = Direction::Dl;
    std::vector<UserAllocation> users; ///< in service order
    double residual_bandwidth_hz = 0.0;
    double load = 0.0;
};

/// Greedy fill: MC users first, then ascending demand, ties by user id. Each
/// user receives min(demand, residual). Users with infinite demand get
/// nothing.
CellAllocation allocate_cell(int sector_id, Direction direction, std::span<const CellDemand> demands,
                             double carrier_bandwidth_hz);

enum class DropReason
{
    None,
    AdmissionBlocked,
    LinkQuality
};

std::string to_string(DropReason r);

struct DirectionTraffic
{
    double req_bps = 0.0;
    double dropped_bps = 0.0;
    double blocked_bps = 0.0;
    double served_bps = 0.0;
};

/// served = min(req, achievable); blocked = req - served - dropped. A
/// dropped direction is fully dropped. Throws std::logic_error if any
/// component would be negative.
DirectionTraffic account(double req_bps, bool dropped, double achievable_bps);

struct TrafficReport
{
    int user_id = 0;
    UserClass user_class = UserClass::Normal;
    int serving_sector_id = -1;
    NetworkId network = NetworkId::Public;
    DirectionTraffic dl;
    DirectionTraffic ul;
    double dl_sinr_db = 0.0;
    double ul_sinr_db = 0.0;
    DropReason drop_reason = DropReason::None;
};

/// Everything the load-coupling solver reads. References must outlive it.
struct NetworkState
{
    const LinkGainTable& gains;
    std::span<const CellInfo> cells;
    std::span<const UserSpec> users;
    std::span<const Attachment> attachments; ///< indexed by user id
    double bandwidth_hz = 10e6;
    double drop_threshold_db = -6.0;
    NoiseModel noise;
    LinkRateModel rate;
    PowerControlParams power_control;
    LoadCouplingParams coupling;
};

/// Per-user UL link quantities at the converged point.
struct UlUserState
{
    double sinr_db = 0.0;
    double tx_power_dbm = 0.0;
    double achievable_bps = 0.0;
};

struct CouplingResult
{
    std::vector<double> dl_loads; ///< per sector, from the final allocation
    std::vector<double> ul_loads;
    std::vector<double> dl_sinr_db; ///< per user; NaN if not attached
    std::vector<double> ul_sinr_db;
    std::vector<DropDecision> drops;
    std::vector<double> dl_achievable_bps;
    std::vector<double> ul_achievable_bps;
    std::vector<CellAllocation> dl_allocations; ///< per sector
    std::vector<CellAllocation> ul_allocations;
    std::vector<double> max_load_trace; ///< max load over sectors and directions, per iteration
    int iterations = 0;
    bool converged = false;
};

/// Fixed point loads -> SINR -> demands -> allocations -> loads, starting
/// from full load and damped as load = d*old + (1-d)*new. Converged when two
/// successive undamped iterates differ by less than the tolerance; the last
/// iterate is used otherwise.
CouplingResult solve_load_coupling(const NetworkState& state);

/// Builds the per-user reports from a solved network.
std::vector<TrafficReport> build_reports(const NetworkState& state, const CouplingResult& solved);

/// CSV with user_id, class, serving_sector, network, SINRs and the eight
/// traffic fields in Mbps.
void write_report_csv(std::ostream& out, std::span<const TrafficReport> reports);

/// UL rate on `bandwidth_hz` for a user with the given path loss (for power
/// control), linear gain to its cell and interference-plus-noise PSD.
double ul_rate_bps(double bandwidth_hz, double pathloss_db, double gain_linear,
                   double interference_noise_mw_per_hz, const PowerControlParams& pc,
                   const LinkRateModel& rate);

/// Smallest bandwidth delivering `req_bps` in UL, or a value above
/// `carrier_hz` when even the full carrier falls short (+inf if the link
/// carries nothing).
double ul_demand_hz(double req_bps, double pathloss_db, double gain_linear,
                    double interference_noise_mw_per_hz, double carrier_hz,
                    const PowerControlParams& pc, const LinkRateModel& rate);

} // namespace copx
