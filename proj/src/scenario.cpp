// SPDX-License-Identifier: Apache-2.0
//
// copxsim - coexistence simulator for deployable and public radio networks
// Copyright (C) 2026 The copxsim authors

#include "copx/scenario.hpp"

#include "copx/config_json.hpp"

#include <random>

namespace copx
{

namespace
{

constexpr Position kReferenceMacroSite{-7500.0, -7500.0, 32.0};
constexpr Position kSecondMacroSite{7500.0, 7500.0, 32.0};
constexpr double kTruckHeight = 20.0;
constexpr double kUavHeight = 25.0;

void check(bool ok, const std::string& message)
{
    if (!ok)
    {
        throw ConfigError(message);
    }
}

bool finite(const Position& p)
{
    return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

void validate_bs(const BaseStationSpec& bs, std::size_t i)
{
    const std::string where = "base_stations[" + std::to_string(i) + "]: ";
    check(finite(bs.site), where + "non-finite site");
    check(bs.site.z > 0.0, where + "site height must be positive");
    check(std::isfinite(bs.tx_power_dbm), where + "non-finite tx_power_dbm");
    check(std::isfinite(bs.rotation_deg), where + "non-finite rotation_deg");
    const int expected_sectors = bs.kind == BsKind::Uav ? 1 : 3;
    check(bs.n_sectors == expected_sectors,
          where + to_string(bs.kind) + " requires " + std::to_string(expected_sectors) + " sector(s)");
    const AntennaPattern expected_pattern =
        bs.n_sectors == 1 ? AntennaPattern::Omni : AntennaPattern::TriSector;
    check(bs.antenna.pattern == expected_pattern, where + "antenna pattern does not match sector count");
    const NetworkId expected_network = bs.kind == BsKind::Macro ? NetworkId::Public : NetworkId::Deployable;
    check(bs.network == expected_network, where + to_string(bs.kind) + " must belong to the " +
                                              to_string(expected_network) + " network");
    check(std::isfinite(bs.antenna.boresight_gain_dbi), where + "non-finite boresight gain");
    check(bs.antenna.phi_3db_deg > 0.0 && std::isfinite(bs.antenna.phi_3db_deg),
          where + "phi_3db_deg must be positive");
    check(bs.antenna.front_back_ratio_db >= 0.0 && std::isfinite(bs.antenna.front_back_ratio_db),
          where + "front_back_ratio_db must be >= 0");
}

Position truck_edge_site(const McArea& area, const Position& reference,
                         std::optional<double> azimuth_deg)
{
    double ux = 0.0;
    double uy = 0.0;
    if (azimuth_deg)
    {
        ux = std::cos(*azimuth_deg * M_PI / 180.0);
        uy = std::sin(*azimuth_deg * M_PI / 180.0);
    }
    else
    {
        const double d = distance_2d(area.center, reference);
        check(d > 0.0, "MC area center coincides with the reference macro");
        ux = (reference.x - area.center.x) / d;
        uy = (reference.y - area.center.y) / d;
    }
    return {area.center.x + area.radius_m * ux, area.center.y + area.radius_m * uy, kTruckHeight};
}

// Uniform point in a disc, z at user height.
Position draw_in_disc(const Position& center, double radius, double height, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const double r = radius * std::sqrt(uniform(rng));
    const double theta = 2.0 * M_PI * uniform(rng);
    return {center.x + r * std::cos(theta), center.y + r * std::sin(theta), height};
}

} // namespace

RmaParams ScenarioConfig::rma() const
{
    return RmaParams{avg_building_height_m, street_width_m, carrier_hz / 1e9};
}

std::string to_string(Preset p)
{
    switch (p)
    {
    case Preset::MacroOnly:
        return "macro-only";
    case Preset::MacroMc:
        return "macro-mc";
    case Preset::MacroTruck:
        return "macro-truck";
    case Preset::MacroUav:
        return "macro-uav";
    }
    return "?";
}

Preset parse_preset(const std::string& name)
{
    for (Preset p : {Preset::MacroOnly, Preset::MacroMc, Preset::MacroTruck, Preset::MacroUav})
    {
        if (to_string(p) == name)
        {
            return p;
        }
    }
    throw ConfigError("unknown preset '" + name + "'");
}

BaseStationSpec make_macro(Position site)
{
    BaseStationSpec bs;
    bs.kind = BsKind::Macro;
    bs.site = site;
    bs.tx_power_dbm = 49.0;
    bs.n_sectors = 3;
    bs.antenna = AntennaConfig{AntennaPattern::TriSector, 15.0, 65.0, 30.0};
    bs.network = NetworkId::Public;
    return bs;
}

BaseStationSpec make_truck(Position site, double tx_power_dbm)
{
    BaseStationSpec bs;
    bs.kind = BsKind::Truck;
    bs.site = site;
    bs.tx_power_dbm = tx_power_dbm;
    bs.n_sectors = 3;
    bs.antenna = AntennaConfig{AntennaPattern::TriSector, 15.0, 65.0, 30.0};
    bs.network = NetworkId::Deployable;
    return bs;
}

BaseStationSpec make_uav(Position site, double tx_power_dbm)
{
    BaseStationSpec bs;
    bs.kind = BsKind::Uav;
    bs.site = site;
    bs.tx_power_dbm = tx_power_dbm;
    bs.n_sectors = 1;
    bs.antenna = AntennaConfig{AntennaPattern::Omni, 5.0, 65.0, 30.0};
    bs.network = NetworkId::Deployable;
    return bs;
}

ScenarioConfig build_preset(Preset preset, const std::string& overrides_json,
                            const PresetOptions& options)
{
    ScenarioConfig base;
    base.base_stations = {make_macro(kReferenceMacroSite), make_macro(kSecondMacroSite)};
    if (preset == Preset::MacroMc)
    {
        base.policy.block_normal_users = true;
    }

    nlohmann::json overrides;
    try
    {
        overrides = nlohmann::json::parse(overrides_json);
    }
    catch (const nlohmann::json::parse_error& e)
    {
        throw ConfigError(std::string("overrides: ") + e.what());
    }
    check(overrides.is_object(), "overrides must be a JSON object");

    nlohmann::json doc = to_json(base);
    doc.merge_patch(overrides);
    ScenarioConfig config = config_from_json(doc);

    if (overrides.contains("base_stations"))
    {
        return config;
    }

    const Position& reference = config.base_stations.front().site;
    if (preset == Preset::MacroTruck)
    {
        const double power = options.deployable_power_dbm.value_or(
            options.low_power ? kTruckLowPowerDbm : kTruckPowerDbm);
        config.base_stations.push_back(
            make_truck(truck_edge_site(config.mc_area, reference, options.truck_edge_azimuth_deg), power));
    }
    else if (preset == Preset::MacroUav)
    {
        const double power =
            options.deployable_power_dbm.value_or(options.low_power ? kUavLowPowerDbm : kUavPowerDbm);
        const Position& c = config.mc_area.center;
        config.base_stations.push_back(make_uav({c.x, c.y, kUavHeight}, power));
    }
    validate(config);
    return config;
}

void validate(const ScenarioConfig& c)
{
    check(!c.base_stations.empty(), "at least one base station is required");
    for (std::size_t i = 0; i < c.base_stations.size(); ++i)
    {
        validate_bs(c.base_stations[i], i);
    }
    check(std::isfinite(c.mc_area.center.x) && std::isfinite(c.mc_area.center.y),
          "mc_area: non-finite center");
    check(c.mc_area.radius_m >= 0.0 && std::isfinite(c.mc_area.radius_m), "mc_area: radius_m must be >= 0");
    check(c.n_mc_users >= 0, "n_mc_users must be >= 0");
    check(c.n_normal_per_macro >= 0, "n_normal_per_macro must be >= 0");
    check(c.normal_user_radius_m >= 0.0 && std::isfinite(c.normal_user_radius_m),
          "normal_user_radius_m must be >= 0");
    check(c.carrier_hz > 0.0 && std::isfinite(c.carrier_hz), "carrier_hz must be positive");
    check(c.bandwidth_hz > 0.0 && std::isfinite(c.bandwidth_hz), "bandwidth_hz must be positive");
    check(std::isfinite(c.drop_sinr_threshold_db), "drop_sinr_threshold_db must be finite");
    for (const auto* s : {&c.mc_service, &c.normal_service})
    {
        check(s->dl_req_bps >= 0.0 && s->ul_req_bps >= 0.0 && std::isfinite(s->dl_req_bps) &&
                  std::isfinite(s->ul_req_bps),
              "service requirements must be finite and >= 0");
    }
    check(c.user_height_m > 0.0 && std::isfinite(c.user_height_m), "user_height_m must be positive");
    check(std::isfinite(c.user_tx_power_dbm), "user_tx_power_dbm must be finite");
    check(c.avg_building_height_m > 0.0 && c.street_width_m > 0.0, "rma: heights and widths must be positive");
    check(c.noise.ue_noise_figure_db >= 0.0 && c.noise.bs_noise_figure_db >= 0.0,
          "noise figures must be >= 0");
    check(std::isfinite(c.noise.thermal_density_dbm_hz), "thermal_density_dbm_hz must be finite");
    check(c.rate.bandwidth_efficiency > 0.0 && c.rate.bandwidth_efficiency <= 1.0,
          "rate_model: bandwidth_efficiency must be in (0, 1]");
    check(c.rate.se_cap_bps_hz > 0.0, "rate_model: se_cap_bps_hz must be positive");
    check(std::isfinite(c.rate.min_sinr_db), "rate_model: min_sinr_db must be finite");
    check(c.power_control.reference_bandwidth_hz > 0.0,
          "power_control: reference_bandwidth_hz must be positive");
    check(c.power_control.alpha >= 0.0 && c.power_control.alpha <= 1.0,
          "power_control: alpha must be in [0, 1]");
    check(std::isfinite(c.power_control.p0_dbm) && std::isfinite(c.power_control.max_power_dbm),
          "power_control: powers must be finite");
    check(c.coupling.damping >= 0.0 && c.coupling.damping < 1.0, "load_coupling: damping must be in [0, 1)");
    check(c.coupling.tolerance > 0.0, "load_coupling: tolerance must be positive");
    check(c.coupling.max_iterations >= 1, "load_coupling: max_iterations must be >= 1");
    deployable_index(c);
}

std::vector<SectorInstance> make_sectors(const ScenarioConfig& config)
{
    std::vector<SectorInstance> sectors;
    int id = 0;
    for (int b = 0; b < static_cast<int>(config.base_stations.size()); ++b)
    {
        const auto& bs = config.base_stations[b];
        for (int k = 0; k < bs.n_sectors; ++k)
        {
            const double azimuth = bs.n_sectors == 1 ? 0.0 : bs.rotation_deg + 120.0 * k;
            sectors.push_back(SectorInstance{id++, b, azimuth});
        }
    }
    return sectors;
}

int reference_macro_index(const ScenarioConfig& config)
{
    for (int b = 0; b < static_cast<int>(config.base_stations.size()); ++b)
    {
        if (config.base_stations[b].network == NetworkId::Public)
        {
            return b;
        }
    }
    throw ConfigError("no public base station to use as reference macro");
}

int deployable_index(const ScenarioConfig& config)
{
    int found = -1;
    for (int b = 0; b < static_cast<int>(config.base_stations.size()); ++b)
    {
        if (config.base_stations[b].network == NetworkId::Deployable)
        {
            check(found < 0, "more than one deployable base station");
            found = b;
        }
    }
    return found;
}

std::vector<UserSpec> drop_users(const ScenarioConfig& config, std::uint64_t seed)
{
    check(!(config.mc_area.radius_m <= 0.0 && config.n_mc_users > 0),
          "zero-radius MC area with MC users");
    check(!(config.normal_user_radius_m <= 0.0 && config.n_normal_per_macro > 0),
          "zero-radius normal-user area with normal users");

    std::mt19937_64 rng(seed);
    std::vector<UserSpec> users;
    auto add = [&](UserClass cls, const Position& center, double radius) {
        UserSpec u;
        u.user_id = static_cast<int>(users.size());
        u.position = draw_in_disc(center, radius, config.user_height_m, rng);
        u.user_class = cls;
        u.tx_power_dbm = config.user_tx_power_dbm;
        u.noise_figure_db = config.noise.ue_noise_figure_db;
        u.service = cls == UserClass::Mc ? config.mc_service : config.normal_service;
        users.push_back(u);
    };

    for (int i = 0; i < config.n_mc_users; ++i)
    {
        add(UserClass::Mc, config.mc_area.center, config.mc_area.radius_m);
    }
    for (const auto& bs : config.base_stations)
    {
        if (bs.kind != BsKind::Macro)
        {
            continue;
        }
        for (int i = 0; i < config.n_normal_per_macro; ++i)
        {
            add(UserClass::Normal, bs.site, config.normal_user_radius_m);
        }
    }
    return users;
}

TranslatedScenario translate_mc_cluster(const ScenarioConfig& config,
                                        const std::vector<UserSpec>& users, double distance_m)
{
    check(std::isfinite(distance_m) && distance_m >= 0.0, "distance must be finite and >= 0");
    const int dep = deployable_index(config);
    check(dep >= 0, "no deployable base station to translate");
    const Position ref = config.base_stations[reference_macro_index(config)].site;
    const Position& center = config.mc_area.center;

    const double axis_len = distance_2d(center, ref);
    check(axis_len > 0.0, "MC area center coincides with the reference macro");
    const double ux = (center.x - ref.x) / axis_len;
    const double uy = (center.y - ref.y) / axis_len;

    // Solve |w + s u| = d for the forward root, w = deployable - reference.
    const Position& site = config.base_stations[dep].site;
    const double wx = site.x - ref.x;
    const double wy = site.y - ref.y;
    const double along = wx * ux + wy * uy;
    const double across = wx * uy - wy * ux;
    const double across_sq = across * across;
    const double disc = distance_m * distance_m - across_sq;
    check(disc >= -1e-9, "distance smaller than the deployable's offset from the translation axis");
    const double s = -along + std::sqrt(std::max(disc, 0.0));
    const double tx = s * ux;
    const double ty = s * uy;

    TranslatedScenario out{config, users};
    out.config.mc_area.center.x += tx;
    out.config.mc_area.center.y += ty;
    out.config.base_stations[dep].site.x += tx;
    out.config.base_stations[dep].site.y += ty;
    for (auto& u : out.users)
    {
        if (u.user_class == UserClass::Mc)
        {
            u.position.x += tx;
            u.position.y += ty;
        }
    }
    return out;
}

std::string to_string(NetworkId v)
{
    return v == NetworkId::Public ? "public" : "deployable";
}

std::string to_string(BsKind v)
{
    switch (v)
    {
    case BsKind::Macro:
        return "macro";
    case BsKind::Truck:
        return "truck";
    case BsKind::Uav:
        return "uav";
    }
    return "?";
}

std::string to_string(UserClass v)
{
    return v == UserClass::Mc ? "mc" : "normal";
}

std::string to_string(McAccess v)
{
    return v == McAccess::AnyNetwork ? "any_network" : "deployable_only";
}

} // namespace copx
