// SPDX-License-Identifier: Apache-2.0
//
// copxsim - coexistence simulator for deployable and public radio networks
// Copyright (C) 2026 The copxsim authors
//
// Core entity types shared by all modules: geometry, base stations, sectors
// and users.

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace copx
{

/// Raised when a configuration or an argument violates a type invariant.
class ConfigError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

/// Raised on file-system failures (missing config, unwritable output).
class IoError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Cartesian position in meters: x east, y north, z height above ground.
struct Position
{
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    bool operator==(const Position&) const = default;
};

inline double distance_2d(const Position& a, const Position& b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

inline double distance_3d(const Position& a, const Position& b)
{
    return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

/// Bearing from `from` to `to` in degrees, counter-clockwise from east.
inline double bearing_deg(const Position& from, const Position& to)
{
    return std::atan2(to.y - from.y, to.x - from.x) * 180.0 / M_PI;
}

enum class NetworkId
{
    Public,
    Deployable
};

enum class BsKind
{
    Macro,
    Truck,
    Uav
};

enum class AntennaPattern
{
    TriSector,
    Omni
};

struct AntennaConfig
{
    AntennaPattern pattern = AntennaPattern::TriSector;
    double boresight_gain_dbi = 15.0;
    double phi_3db_deg = 65.0;
    double front_back_ratio_db = 30.0;

    bool operator==(const AntennaConfig&) const = default;
};

struct BaseStationSpec
{
    BsKind kind = BsKind::Macro;
    Position site;
    double tx_power_dbm = 49.0; ///< total per sector, over the full carrier
    int n_sectors = 3;
    AntennaConfig antenna;
    NetworkId network = NetworkId::Public;
    double rotation_deg = 0.0; ///< added to the {0, 120, 240} tri-sector azimuths

    bool operator==(const BaseStationSpec&) const = default;
};

/// One transmitting/receiving cell. `bs_index` refers into
/// ScenarioConfig::base_stations.
struct SectorInstance
{
    int sector_id = 0;
    int bs_index = 0;
    double azimuth_deg = 0.0;
};

enum class UserClass
{
    Normal,
    Mc
};

struct ServiceProfile
{
    double dl_req_bps = 0.0;
    double ul_req_bps = 0.0;

    bool operator==(const ServiceProfile&) const = default;
};

struct UserSpec
{
    int user_id = 0;
    Position position;
    UserClass user_class = UserClass::Normal;
    double tx_power_dbm = 23.0;
    double noise_figure_db = 9.0;
    ServiceProfile service;
};

enum class McAccess
{
    DeployableOnly,
    AnyNetwork
};

/// Normal users are always restricted to the public network.
struct AccessPolicy
{
    McAccess mc_access = McAccess::AnyNetwork;
    bool block_normal_users = false;

    bool operator==(const AccessPolicy&) const = default;
};

enum class Direction
{
    Dl,
    Ul
};

std::string to_string(NetworkId v);
std::string to_string(BsKind v);
std::string to_string(UserClass v);
std::string to_string(McAccess v);

} // namespace copx
