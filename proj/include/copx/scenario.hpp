// SPDX-License-Identifier: Apache-2.0
//
// copxsim - coexistence simulator for deployable and public radio networks
// Copyright (C) 2026 The copxsim authors
//
// Deployment description: base stations, MC area, user populations and
// policies, plus the four coexistence presets and the rigid translation of
// the MC cluster used by the distance sweep.

#pragma once

#include "copx/propagation.hpp"
#include "copx/radio.hpp"
#include "copx/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace copx
{

struct McArea
{
    Position center;
    double radius_m = 250.0; ///< calibrated; see README
};

struct LoadCouplingParams
{
    double damping = 0.5;     ///< weight of the previous iterate
    double tolerance = 1e-3;  ///< on max |delta load|
    int max_iterations = 50;
    bool full_load = false;   ///< interferers always at load 1
};

struct ScenarioConfig
{
    std::vector<BaseStationSpec> base_stations;
    McArea mc_area;
    int n_mc_users = 15;
    int n_normal_per_macro = 50;
    double normal_user_radius_m = 5000.0;
    AccessPolicy policy;
    double carrier_hz = 700e6;
    double bandwidth_hz = 10e6; ///< per direction (FDD)
    std::uint64_t seed = 1;
    double drop_sinr_threshold_db = -6.0;

    ServiceProfile mc_service{2e6, 0.5e6};
    ServiceProfile normal_service{1e6, 0.5e6};
    double user_height_m = 1.5;
    double user_tx_power_dbm = 23.0;

    double avg_building_height_m = 5.0;
    double street_width_m = 20.0;
    PropagationOptions propagation;
    NoiseModel noise;
    LinkRateModel rate;
    PowerControlParams power_control;
    LoadCouplingParams coupling;

    RmaParams rma() const;
};

enum class Preset
{
    MacroOnly,
    MacroMc,
    MacroTruck,
    MacroUav
};

std::string to_string(Preset p);
/// Accepts "macro-only", "macro-mc", "macro-truck", "macro-uav".
Preset parse_preset(const std::string& name);

/// Knobs that shape a preset's deployable BS.
struct PresetOptions
{
    bool low_power = false;                       ///< 33 dBm truck / 24 dBm UAV
    std::optional<double> deployable_power_dbm;   ///< wins over low_power
    std::optional<double> truck_edge_azimuth_deg; ///< default: towards the reference macro
};

inline constexpr double kTruckPowerDbm = 46.0;
inline constexpr double kTruckLowPowerDbm = 33.0;
inline constexpr double kUavPowerDbm = 40.0;
inline constexpr double kUavLowPowerDbm = 24.0;

BaseStationSpec make_macro(Position site);
BaseStationSpec make_truck(Position site, double tx_power_dbm = kTruckPowerDbm);
BaseStationSpec make_uav(Position site, double tx_power_dbm = kUavPowerDbm);

/// Builds one of the coexistence presets. `overrides_json` is a partial
/// ScenarioConfig JSON object merged over the macro-only base before the
/// deployable BS is placed, so an overridden MC area moves the deployable
/// with it. An override carrying `base_stations` replaces the list outright.
ScenarioConfig build_preset(Preset preset, const std::string& overrides_json = "{}",
                            const PresetOptions& options = {});

/// Throws ConfigError on the first violated invariant.
void validate(const ScenarioConfig& config);

/// Expands base stations into sectors; ids are global, in BS order.
std::vector<SectorInstance> make_sectors(const ScenarioConfig& config);

/// Index of the reference macro (the first public BS).
int reference_macro_index(const ScenarioConfig& config);

/// Index of the single deployable BS, or -1 when there is none. Throws if
/// there are several.
int deployable_index(const ScenarioConfig& config);

/// MC users uniform in the MC-area disc (ids first), then for each macro
/// n_normal_per_macro normal users uniform in its disc.
std::vector<UserSpec> drop_users(const ScenarioConfig& config, std::uint64_t seed);

struct TranslatedScenario
{
    ScenarioConfig config;
    std::vector<UserSpec> users;
};

/// Rigidly moves the MC area, the MC users and the deployable BS along the
/// line from the reference macro through the original MC-area center until
/// the deployable BS is `distance_m` (horizontal) away from the reference
/// macro.
TranslatedScenario translate_mc_cluster(const ScenarioConfig& config,
                                        const std::vector<UserSpec>& users, double distance_m);

} // namespace copx
