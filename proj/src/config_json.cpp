// SPDX-License-Identifier: Apache-2.0
//
// copxsim - coexistence simulator for deployable and public radio networks
// Copyright (C) 2026 The copxsim authors

#include "copx/config_json.hpp"

#include "copx/csv.hpp"

#include <cstdio>
#include <initializer_list>
#include <string_view>

namespace copx
{

using nlohmann::json;

namespace
{

// Reads a JSON object field by field, rejecting unknown keys.
class ObjectReader
{
  public:
    ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path))
    {
        if (!obj_.is_object())
        {
            throw ConfigError(path_ + ": expected an object");
        }
    }

    void allow(std::initializer_list<std::string_view> keys)
    {
        for (const auto& [key, value] : obj_.items())
        {
            bool known = false;
            for (auto k : keys)
            {
                known = known || k == key;
            }
            if (!known)
            {
                throw ConfigError(path_ + ": unknown field '" + key + "'");
            }
        }
    }

    bool has(const char* key) const { return obj_.contains(key); }

    const json& at(const char* key) const { return obj_.at(key); }

    std::string child_path(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

    template <typename T>
    void read(const char* key, T& out) const
    {
        if (!obj_.contains(key))
        {
            return;
        }
        const json& v = obj_.at(key);
        try
        {
            if constexpr (std::is_same_v<T, bool>)
            {
                if (!v.is_boolean())
                {
                    throw ConfigError(child_path(key) + ": expected a boolean");
                }
            }
            else if constexpr (std::is_arithmetic_v<T>)
            {
                if (!v.is_number())
                {
                    throw ConfigError(child_path(key) + ": expected a number");
                }
                if constexpr (std::is_integral_v<T>)
                {
                    if (!v.is_number_integer())
                    {
                        throw ConfigError(child_path(key) + ": expected an integer");
                    }
                    if constexpr (std::is_unsigned_v<T>)
                    {
                        if (v.is_number_integer() && !v.is_number_unsigned())
                        {
                            throw ConfigError(child_path(key) + ": expected a non-negative integer");
                        }
                    }
                }
            }
            out = v.get<T>();
        }
        catch (const json::exception& e)
        {
            throw ConfigError(child_path(key) + ": " + e.what());
        }
    }

    std::string read_enum(const char* key, const std::string& fallback) const
    {
        if (!obj_.contains(key))
        {
            return fallback;
        }
        if (!obj_.at(key).is_string())
        {
            throw ConfigError(child_path(key) + ": expected a string");
        }
        return obj_.at(key).get<std::string>();
    }

  private:
    const json& obj_;
    std::string path_;
};

template <typename E>
E enum_from(const std::string& path, const std::string& text,
            std::initializer_list<std::pair<const char*, E>> table)
{
    for (const auto& [name, value] : table)
    {
        if (text == name)
        {
            return value;
        }
    }
    throw ConfigError(path + ": invalid value '" + text + "'");
}

std::string pattern_name(AntennaPattern p)
{
    return p == AntennaPattern::Omni ? "omni" : "tri_sector";
}

json position_json(const Position& p)
{
    return json{{"x", p.x}, {"y", p.y}, {"z", p.z}};
}

Position read_position(const json& j, const std::string& path, Position p)
{
    ObjectReader r(j, path);
    r.allow({"x", "y", "z"});
    r.read("x", p.x);
    r.read("y", p.y);
    r.read("z", p.z);
    return p;
}

BaseStationSpec read_bs(const json& j, const std::string& path)
{
    ObjectReader r(j, path);
    r.allow({"kind", "site", "tx_power_dbm", "n_sectors", "antenna", "network", "rotation_deg"});
    if (!r.has("kind"))
    {
        throw ConfigError(path + ": missing 'kind'");
    }
    const auto kind = enum_from<BsKind>(r.child_path("kind"), r.read_enum("kind", ""),
                                        {{"macro", BsKind::Macro}, {"truck", BsKind::Truck}, {"uav", BsKind::Uav}});
    BaseStationSpec bs = kind == BsKind::Macro   ? make_macro({})
                         : kind == BsKind::Truck ? make_truck({0.0, 0.0, 20.0})
                                                 : make_uav({0.0, 0.0, 25.0});
    if (kind == BsKind::Macro)
    {
        bs.site.z = 32.0;
    }
    if (r.has("site"))
    {
        bs.site = read_position(r.at("site"), r.child_path("site"), bs.site);
    }
    r.read("tx_power_dbm", bs.tx_power_dbm);
    r.read("n_sectors", bs.n_sectors);
    r.read("rotation_deg", bs.rotation_deg);
    bs.network = enum_from<NetworkId>(r.child_path("network"), r.read_enum("network", to_string(bs.network)),
                                      {{"public", NetworkId::Public}, {"deployable", NetworkId::Deployable}});
    if (r.has("antenna"))
    {
        ObjectReader a(r.at("antenna"), r.child_path("antenna"));
        a.allow({"pattern", "boresight_gain_dbi", "phi_3db_deg", "front_back_ratio_db"});
        bs.antenna.pattern = enum_from<AntennaPattern>(
            a.child_path("pattern"), a.read_enum("pattern", pattern_name(bs.antenna.pattern)),
            {{"tri_sector", AntennaPattern::TriSector}, {"omni", AntennaPattern::Omni}});
        a.read("boresight_gain_dbi", bs.antenna.boresight_gain_dbi);
        a.read("phi_3db_deg", bs.antenna.phi_3db_deg);
        a.read("front_back_ratio_db", bs.antenna.front_back_ratio_db);
    }
    return bs;
}

ServiceProfile read_service(const json& j, const std::string& path, ServiceProfile s)
{
    ObjectReader r(j, path);
    r.allow({"dl_req_bps", "ul_req_bps"});
    r.read("dl_req_bps", s.dl_req_bps);
    r.read("ul_req_bps", s.ul_req_bps);
    return s;
}

json service_json(const ServiceProfile& s)
{
    return json{{"dl_req_bps", s.dl_req_bps}, {"ul_req_bps", s.ul_req_bps}};
}

} // namespace

json to_json(const ScenarioConfig& c)
{
    json bss = json::array();
    for (const auto& bs : c.base_stations)
    {
        bss.push_back(json{
            {"kind", to_string(bs.kind)},
            {"site", position_json(bs.site)},
            {"tx_power_dbm", bs.tx_power_dbm},
            {"n_sectors", bs.n_sectors},
            {"antenna",
             json{{"pattern", pattern_name(bs.antenna.pattern)},
                  {"boresight_gain_dbi", bs.antenna.boresight_gain_dbi},
                  {"phi_3db_deg", bs.antenna.phi_3db_deg},
                  {"front_back_ratio_db", bs.antenna.front_back_ratio_db}}},
            {"network", to_string(bs.network)},
            {"rotation_deg", bs.rotation_deg},
        });
    }
    return json{
        {"base_stations", bss},
        {"mc_area", json{{"center", position_json(c.mc_area.center)}, {"radius_m", c.mc_area.radius_m}}},
        {"n_mc_users", c.n_mc_users},
        {"n_normal_per_macro", c.n_normal_per_macro},
        {"normal_user_radius_m", c.normal_user_radius_m},
        {"policy",
         json{{"mc_access", to_string(c.policy.mc_access)},
              {"normal_access", "public_only"},
              {"block_normal_users", c.policy.block_normal_users}}},
        {"carrier_hz", c.carrier_hz},
        {"bandwidth_hz", c.bandwidth_hz},
        {"seed", c.seed},
        {"drop_sinr_threshold_db", c.drop_sinr_threshold_db},
        {"mc_service", service_json(c.mc_service)},
        {"normal_service", service_json(c.normal_service)},
        {"user_height_m", c.user_height_m},
        {"user_tx_power_dbm", c.user_tx_power_dbm},
        {"rma", json{{"avg_building_height_m", c.avg_building_height_m}, {"street_width_m", c.street_width_m}}},
        {"propagation", json{{"shadowing", c.propagation.shadowing}, {"force_los", c.propagation.force_los}}},
        {"noise",
         json{{"thermal_density_dbm_hz", c.noise.thermal_density_dbm_hz},
              {"ue_noise_figure_db", c.noise.ue_noise_figure_db},
              {"bs_noise_figure_db", c.noise.bs_noise_figure_db}}},
        {"rate_model",
         json{{"bandwidth_efficiency", c.rate.bandwidth_efficiency},
              {"se_cap_bps_hz", c.rate.se_cap_bps_hz},
              {"min_sinr_db", c.rate.min_sinr_db}}},
        {"power_control",
         json{{"mode", c.power_control.mode == UlPowerMode::MaxPower ? "max_power" : "fractional"},
              {"p0_dbm", c.power_control.p0_dbm},
              {"alpha", c.power_control.alpha},
              {"reference_bandwidth_hz", c.power_control.reference_bandwidth_hz},
              {"max_power_dbm", c.power_control.max_power_dbm}}},
        {"load_coupling",
         json{{"damping", c.coupling.damping},
              {"tolerance", c.coupling.tolerance},
              {"max_iterations", c.coupling.max_iterations},
              {"full_load", c.coupling.full_load}}},
    };
}

ScenarioConfig config_from_json(const json& doc)
{
    ScenarioConfig c;
    ObjectReader r(doc, "");
    r.allow({"base_stations", "mc_area", "n_mc_users", "n_normal_per_macro", "normal_user_radius_m", "policy",
             "carrier_hz", "bandwidth_hz", "seed", "drop_sinr_threshold_db", "mc_service", "normal_service",
             "user_height_m", "user_tx_power_dbm", "rma", "propagation", "noise", "rate_model", "power_control",
             "load_coupling"});

    if (r.has("base_stations"))
    {
        const json& arr = r.at("base_stations");
        if (!arr.is_array())
        {
            throw ConfigError("base_stations: expected an array");
        }
        for (std::size_t i = 0; i < arr.size(); ++i)
        {
            c.base_stations.push_back(read_bs(arr[i], "base_stations[" + std::to_string(i) + "]"));
        }
    }
    if (r.has("mc_area"))
    {
        ObjectReader a(r.at("mc_area"), "mc_area");
        a.allow({"center", "radius_m"});
        if (a.has("center"))
        {
            c.mc_area.center = read_position(a.at("center"), "mc_area.center", c.mc_area.center);
        }
        a.read("radius_m", c.mc_area.radius_m);
    }
    r.read("n_mc_users", c.n_mc_users);
    r.read("n_normal_per_macro", c.n_normal_per_macro);
    r.read("normal_user_radius_m", c.normal_user_radius_m);
    if (r.has("policy"))
    {
        ObjectReader p(r.at("policy"), "policy");
        p.allow({"mc_access", "normal_access", "block_normal_users"});
        c.policy.mc_access = enum_from<McAccess>(
            "policy.mc_access", p.read_enum("mc_access", to_string(c.policy.mc_access)),
            {{"any_network", McAccess::AnyNetwork}, {"deployable_only", McAccess::DeployableOnly}});
        enum_from<int>("policy.normal_access", p.read_enum("normal_access", "public_only"), {{"public_only", 0}});
        p.read("block_normal_users", c.policy.block_normal_users);
    }
    r.read("carrier_hz", c.carrier_hz);
    r.read("bandwidth_hz", c.bandwidth_hz);
    r.read("seed", c.seed);
    r.read("drop_sinr_threshold_db", c.drop_sinr_threshold_db);
    if (r.has("mc_service"))
    {
        c.mc_service = read_service(r.at("mc_service"), "mc_service", c.mc_service);
    }
    if (r.has("normal_service"))
    {
        c.normal_service = read_service(r.at("normal_service"), "normal_service", c.normal_service);
    }
    r.read("user_height_m", c.user_height_m);
    r.read("user_tx_power_dbm", c.user_tx_power_dbm);
    if (r.has("rma"))
    {
        ObjectReader m(r.at("rma"), "rma");
        m.allow({"avg_building_height_m", "street_width_m"});
        m.read("avg_building_height_m", c.avg_building_height_m);
        m.read("street_width_m", c.street_width_m);
    }
    if (r.has("propagation"))
    {
        ObjectReader m(r.at("propagation"), "propagation");
        m.allow({"shadowing", "force_los"});
        m.read("shadowing", c.propagation.shadowing);
        m.read("force_los", c.propagation.force_los);
    }
    if (r.has("noise"))
    {
        ObjectReader m(r.at("noise"), "noise");
        m.allow({"thermal_density_dbm_hz", "ue_noise_figure_db", "bs_noise_figure_db"});
        m.read("thermal_density_dbm_hz", c.noise.thermal_density_dbm_hz);
        m.read("ue_noise_figure_db", c.noise.ue_noise_figure_db);
        m.read("bs_noise_figure_db", c.noise.bs_noise_figure_db);
    }
    if (r.has("rate_model"))
    {
        ObjectReader m(r.at("rate_model"), "rate_model");
        m.allow({"bandwidth_efficiency", "se_cap_bps_hz", "min_sinr_db"});
        m.read("bandwidth_efficiency", c.rate.bandwidth_efficiency);
        m.read("se_cap_bps_hz", c.rate.se_cap_bps_hz);
        m.read("min_sinr_db", c.rate.min_sinr_db);
    }
    if (r.has("power_control"))
    {
        ObjectReader m(r.at("power_control"), "power_control");
        m.allow({"mode", "p0_dbm", "alpha", "reference_bandwidth_hz", "max_power_dbm"});
        c.power_control.mode = enum_from<UlPowerMode>(
            "power_control.mode", m.read_enum("mode", "fractional"),
            {{"fractional", UlPowerMode::FractionalPc}, {"max_power", UlPowerMode::MaxPower}});
        m.read("p0_dbm", c.power_control.p0_dbm);
        m.read("alpha", c.power_control.alpha);
        m.read("reference_bandwidth_hz", c.power_control.reference_bandwidth_hz);
        m.read("max_power_dbm", c.power_control.max_power_dbm);
    }
    if (r.has("load_coupling"))
    {
        ObjectReader m(r.at("load_coupling"), "load_coupling");
        m.allow({"damping", "tolerance", "max_iterations", "full_load"});
        m.read("damping", c.coupling.damping);
        m.read("tolerance", c.coupling.tolerance);
        m.read("max_iterations", c.coupling.max_iterations);
        m.read("full_load", c.coupling.full_load);
    }
    validate(c);
    return c;
}

std::string dump_config(const ScenarioConfig& config)
{
    return to_json(config).dump(2) + "\n";
}

ScenarioConfig parse_config(const std::string& text)
{
    json doc;
    try
    {
        doc = json::parse(text);
    }
    catch (const json::parse_error& e)
    {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return config_from_json(doc);
}

ScenarioConfig load_config(const std::string& path)
{
    return parse_config(csv::read_file(path));
}

std::string config_hash(const ScenarioConfig& config)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : dump_config(config))
    {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace copx
